import json

import pytest

from radarlab import __version__
from radarlab.cli import main
from radarlab.io import read_iq_csv, write_iq_csv

SINE = {"schema_version": 1,
        "radar": {"carrier_freq": 60e9, "theta0": 0.4, "dc_i": 0.3, "dc_q": -0.2, "noise_std": 0.001,
                  "rng_seed": 4},
        "motion": {"type": "sinusoid", "amplitude": 3e-4, "freq": 1.5},
        "duration": 1.0, "n_segments": 1}


def _cfg(tmp_path, **over):
    doc = {**SINE, **over}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return str(p)


def _rows(path):
    return path.read_text().count("\n") - 1


def _manifest(out, cmd):
    return json.loads((out / f"{cmd}.manifest.json").read_text())


def test_synth_one_second(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["synth", "--config", _cfg(tmp_path), "--out", str(out)]) == 0
    assert (out / "iq.csv").read_text().splitlines()[0] == "t,i,q"
    assert _rows(out / "iq.csv") == 100 and _rows(out / "truth.csv") == 100
    assert "100 I/Q samples" in capsys.readouterr().out


def test_synth_full_recording(tmp_path):
    out = tmp_path / "o"
    assert main(["synth", "--config", _cfg(tmp_path, duration=120.0), "--out", str(out)]) == 0
    assert _rows(out / "iq.csv") == 12000


def test_missing_carrier_freq(tmp_path, capsys):
    cfg = _cfg(tmp_path, radar={"theta0": 0.1})
    assert main(["synth", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "carrier_freq" in capsys.readouterr().err


def test_unknown_field_and_bad_json(tmp_path, capsys):
    assert main(["synth", "--config", _cfg(tmp_path, colour="red"), "--out", str(tmp_path / "o")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1,\n "radar": }')
    assert main(["synth", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--config", "x.json"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["demod", "--out", "o", "--method", "fft"])
    assert exc.value.code == 2


def test_config_required_for_synth(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path / "o")]) == 2


def test_stagewise_chain(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = _cfg(tmp_path, duration=20.0, n_segments=2)
    for cmd in ("synth", "fitdc", "demod", "analyze"):
        assert main([cmd, "--config", cfg, "--out", str(out), "--method", "both"]) == 0
    fit = json.loads((out / "circle_fit.json").read_text())
    assert fit["center_i"] == pytest.approx(0.3, abs=1e-3) and fit["center_q"] == pytest.approx(-0.2, abs=1e-3)
    assert (out / "displacement_dacm.csv").exists() and (out / "displacement_arctangent.csv").exists()
    demod = json.loads((out / "demod_summary.json").read_text())
    # DACM accumulates sin of each phase step; with steps up to ~0.07 rad the
    # methods drift apart by ~1e-7 m over 20 s
    assert 0 < demod["cross_method_rms_difference_m"] < 1e-6
    summary = json.loads((out / "analyze_summary.json").read_text())
    assert len(summary["segments"]) == 2
    assert summary["segments"][0]["peak_freq_hz"] == pytest.approx(1.5, abs=0.01)
    assert (out / "spectrum_seg1.csv").read_text().startswith("freq_hz,amplitude_m\n")
    assert "cross-method RMS difference" in capsys.readouterr().out


def test_fitdc_without_config_uses_input(tmp_path):
    out = tmp_path / "o"
    assert main(["synth", "--config", _cfg(tmp_path, duration=5.0), "--out", str(out)]) == 0
    assert main(["fitdc", "--input", str(out / "iq.csv"), "--out", str(tmp_path / "p")]) == 0
    assert _manifest(tmp_path / "p", "fitdc")["seed"] is None


def test_ddc_command(tmp_path):
    out = tmp_path / "o"
    cfg = _cfg(tmp_path, duration=4.0, path="digital_if",
               if_params={"clutter_amp": 0.3, "clutter_phase": 0.5})
    assert main(["ddc", "--config", cfg, "--out", str(out), "--write-if"]) == 0
    assert _rows(out / "if.csv") == 400 * 400
    assert _rows(out / "iq.csv") == 398 and _rows(out / "truth.csv") == 398
    # re-run from the written IF samples
    assert main(["ddc", "--config", cfg, "--out", str(tmp_path / "p"), "--input", str(out / "if.csv")]) == 0
    assert (tmp_path / "p" / "iq.csv").read_bytes() == (out / "iq.csv").read_bytes()


def test_pipeline_repro_summary(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["pipeline", "--config", "pendulum-repro", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    summary = json.loads((out / "pipeline_summary.json").read_text())
    segs = summary["segments"]
    assert len(segs) == 5
    for s in segs:
        assert {"peak_freq_hz", "peak_amplitude_m", "snr_db"} <= set(s)
    assert text.count("\n      ") >= 5 and "snr_db" in text
    m = _manifest(out, "pipeline")
    assert m["config_path"] == "pendulum-repro" and m["seed"] == 20220601
    assert m["tool_version"] == __version__


def test_analyze_empty_csv(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["analyze", "--input", str(empty), "--out", str(tmp_path / "o")]) == 1
    assert "empty record" in capsys.readouterr().err


def test_missing_input_file(tmp_path, capsys):
    assert main(["demod", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]) == 1
    assert "nope.csv" in capsys.readouterr().err


def test_runtime_stage_error(tmp_path, capsys):
    cfg = _cfg(tmp_path, duration=1.0, n_segments=5)
    assert main(["pipeline", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "analysis" in capsys.readouterr().err


def test_manifest_lists_every_file(tmp_path):
    out = tmp_path / "o"
    cfg = _cfg(tmp_path, duration=20.0, n_segments=2)
    assert main(["pipeline", "--config", cfg, "--out", str(out), "--method", "both", "--seed", "9"]) == 0
    m = _manifest(out, "pipeline")
    listed = {f["path"] for f in m["emitted_files"]}
    on_disk = {p.name for p in out.iterdir()} - {"pipeline.manifest.json"}
    assert listed == on_disk
    assert m["seed"] == 9 and m["output_dir"] == str(out)
    roles = {f["path"]: f["role"] for f in m["emitted_files"]}
    assert roles["iq.csv"] == "iq" and roles["spectrum_seg0.csv"] == "spectrum"
    newest = max(out.iterdir(), key=lambda p: p.stat().st_mtime_ns)
    assert newest.name == "pipeline.manifest.json"


def test_csv_round_trip_byte_identical(tmp_path):
    out = tmp_path / "o"
    assert main(["synth", "--config", _cfg(tmp_path), "--out", str(out)]) == 0
    write_iq_csv(tmp_path / "again.csv", read_iq_csv(out / "iq.csv"))
    assert (tmp_path / "again.csv").read_bytes() == (out / "iq.csv").read_bytes()


def test_seed_changes_output(tmp_path):
    cfg = _cfg(tmp_path)
    main(["synth", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["synth", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
    assert (tmp_path / "a" / "iq.csv").read_bytes() != (tmp_path / "b" / "iq.csv").read_bytes()
