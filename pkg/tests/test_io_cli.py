import csv
import hashlib
import json

import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from phaseqrng import cli
from phaseqrng.extraction import BitStream
from phaseqrng.pipeline import run_pipeline
from phaseqrng.io import RawWriter, file_digest, read_raw, sidecar_path, write_raw

SMALL = ["--frame-length", "3000", "--set", "simulation.chunk_steps=4096"]


@given(st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=40), min_size=1, max_size=6))
def test_raw_writer_packs_across_parts(tmp_path_factory, parts):
    path = tmp_path_factory.mktemp("raw") / "x.raw"
    with RawWriter(path) as w:
        for p in parts:
            w.append(BitStream.from_bits(p))
        digest = w.close()
    flat = [b for p in parts for b in p]
    assert read_raw(path, len(flat)).bits().tolist() == flat
    assert digest == file_digest(path)


def test_write_raw_sidecar(tmp_path):
    s = BitStream.from_bits([1, 0, 1, 1, 0, 0, 1, 0, 1, 1], "xor-extracted", 5e8)
    digest = write_raw(tmp_path / "b.raw", s, note="x")
    meta = json.loads(sidecar_path(tmp_path / "b.raw").read_text())
    assert meta["bit_length"] == 10 and meta["byte_length"] == 2 and meta["sha256"] == digest
    back = read_raw(tmp_path / "b.raw")
    assert back == s and back.provenance == "xor-extracted"
    with pytest.raises(ValueError):
        read_raw(tmp_path / "b.raw", 17)


def test_cli_validate_exit_codes(capsys):
    assert cli.main(["validate"]) == 0
    assert cli.main(["validate", "--set", "mzi.stabilization_enabled=false"]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert cli.main(["validate", "--set", "mzi.nope=1"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_run_artifacts(tmp_path):
    out = tmp_path / "run"
    assert cli.main(["run", *SMALL, "-o", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"bin1.raw", "bin2.raw", "bin3.raw", "bin1.json", "metadata.json", "autocorr.csv", "psd.csv",
            "report.yaml"} <= names
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["files"]["bin3.raw"]["sha256"] == file_digest(out / "bin3.raw")
    assert cli.config_from_metadata(out / "metadata.json").sampling.frame_length == 3000
    report = yaml.safe_load((out / "report.yaml").read_text())
    assert report["timing"]["passed"] and report["streams"]["bin3"]["bit_length"] == 3000
    with open(out / "autocorr.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 300 and rows[0].keys() == {"stream", "lag", "coefficient"}
    assert cli.main(["analyze", str(out / "bin3.raw"), "-o", str(tmp_path / "an")]) in (0, 1)
    assert (tmp_path / "an" / "report.yaml").exists()


def test_cli_run_rejects_single_frame_xor(tmp_path, capsys):
    assert cli.main(["run", "--frames", "1", *SMALL, "-o", str(tmp_path / "r")]) == 2
    assert "even" in capsys.readouterr().err


def test_cli_run_cleans_up_on_failure(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(cli, "write_psd_csv", boom)
    out = tmp_path / "r"
    assert cli.main(["run", *SMALL, "-o", str(out)]) == 3
    assert list(out.iterdir()) == []


def test_cli_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", *SMALL, "--parameter", "T_d", "--values", "2.5e-10,6.5e-10", "-o", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["value"]) for r in rows] == [2.5e-10, 6.5e-10]
    var = [float(r["dtheta_variance"]) for r in rows]
    assert var[1] / var[0] == pytest.approx(2.6, rel=0.15)


def test_single_value_sweep_matches_run(small_cfg):
    row = cli.cmd_sweep(small_cfg, "control_error_std", [small_cfg.mzi.control_error_std])[0]
    assert row["output_sha256"] == hashlib.sha256(run_pipeline(small_cfg).output.to_bytes()).hexdigest()


def test_cli_sweep_unknown_parameter():
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--parameter", "nope", "--values", "1"])


def test_cli_analyze_missing_file_and_bad_stream(tmp_path):
    assert cli.main(["analyze", str(tmp_path / "missing.raw")]) == 3
    p = tmp_path / "zeros.raw"
    np.zeros(20_000, np.uint8).tofile(p)
    code, report = cli.cmd_analyze(p)
    assert code == 1 and report["max_abs_autocorrelation"] is None
