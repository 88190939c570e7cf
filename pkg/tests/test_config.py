import math

import pytest

from phaseqrng import ConfigError, ScenarioConfig, ideal_scenario, reference_scenario
from phaseqrng.config import load, loads


def test_defaults_roundtrip_through_yaml():
    cfg = reference_scenario()
    assert loads(cfg.dump()) == cfg
    assert cfg.coherence_time == 10e-9
    assert cfg.frame_steps == 200_000_000 - 19


def test_coherence_time_from_linewidth_model():
    cfg = ScenarioConfig()
    assert cfg.coherence_time == pytest.approx(1 / (math.pi * 30e6))


def test_ideal_scenario_is_noiseless():
    cfg = ideal_scenario()
    assert cfg.detector.fast.noiseless
    assert cfg.mzi.control_error_std == 0 and cfg.mzi.drift_amplitude == 0


def test_replace_dotted_paths():
    cfg = reference_scenario().replace(**{"mzi.delay": 2.5e-10, "detector.fast.white_noise_std": 0.0})
    assert cfg.mzi.delay == 2.5e-10 and cfg.detector.fast.white_noise_std == 0.0
    with pytest.raises(ConfigError, match="mzi.nope"):
        cfg.replace(**{"mzi.nope": 1})


def test_partial_yaml_and_infinity(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("laser:\n  coherence_time: .inf\nsampling:\n  frame_length: 1e3\n")
    cfg = load(p)
    assert math.isinf(cfg.coherence_time) and cfg.sampling.frame_length == 1000


@pytest.mark.parametrize("text,match", [
    ("mzi: {delay: 1e-9, bogus: 2}", "bogus"),
    ("lasers: {}", "unknown section"),
    ("sampling: {frame_count: 3}", "even"),
    ("sampling: {frame_length: 2.5}", "integer"),
    ("sampling: {period: 1e-11}", "time_step"),
    ("mzi: {delay: -1}", "delay"),
    ("simulation: {workers: 64, chunk_steps: 16777216}", "memory"),
    ("laser: {coherence_time: 0}", "coherence_time"),
    ("analysis: {psd_window: kaiser}", "psd_window"),
    ("mzi: [1, 2]", "mapping"),
    ("- a\n- b", "mapping"),
    ("mzi: {delay: 1e-9\n", "line"),
])
def test_invalid_configs(text, match):
    with pytest.raises(ConfigError, match=match):
        loads(text)


def test_empty_document_gives_defaults():
    assert loads("") == ScenarioConfig()


def test_infinite_coherence_survives_json_roundtrip():
    import json

    from phaseqrng.config import from_dict

    cfg = reference_scenario(**{"laser.coherence_time": math.inf})
    again = from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg and loads(cfg.dump()) == cfg


def test_shipped_scenario_file_is_the_default_operating_point():
    from pathlib import Path

    assert load(Path(__file__).resolve().parents[1] / "scenarios" / "reference.yaml") == reference_scenario()
