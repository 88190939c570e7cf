import pytest
from hypothesis import settings

from phaseqrng import ideal_scenario, reference_scenario

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, one-line detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def small_cfg():
    """Reference operating point shrunk to a few thousand samples per frame."""
    return reference_scenario(**{"sampling.frame_length": 4000, "simulation.chunk_steps": 4096})


@pytest.fixture
def small_ideal():
    return ideal_scenario(**{"sampling.frame_length": 4000, "simulation.chunk_steps": 4096})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
