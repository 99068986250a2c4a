import json

import pytest

from bellscan import io as bio
from bellscan.cli import main
from bellscan.synth import SynthConfig, generate


@pytest.fixture
def event_file(tmp_path):
    path = tmp_path / "events.csv"
    path.write_bytes(bio.format_events(generate(SynthConfig(n_attempts=4000, seed=3, w_ref=0.6, epsilon=0.15))))
    return path


def test_synth_defaults_round_trip(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["synth", "--out", str(out)]) == 0
    assert bio.read_events(out.read_bytes()) == generate(SynthConfig())


def test_synth_rerun_byte_identical(tmp_path):
    args = ["--n", "500", "--seed", "42", "--visibility", "0.8", "--wref", "0.3",
            "--epsilon", "0.1", "--tau-nv", "11000", "--tau-ref", "2500", "--lead", "-7000",
            "--invalid-rate", "0.01"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["synth", "--out", str(a)] + args) == 0
    assert main(["synth", "--out", str(b)] + args) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(bio.read_events(a.read_bytes())) == 500


def test_synth_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 50\nseed = 5\n")
    out = tmp_path / "o.csv"
    assert main(["synth", "--config", str(cfg), "--seed", "6", "--out", str(out)]) == 0
    assert bio.read_events(out.read_bytes()) == generate(SynthConfig(n_attempts=50, seed=6))


def test_synth_bad_flag_exit_2(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "x"), "--visibility", "3"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["synth", "--n", "many"])
    assert info.value.code == 2


def test_analyze_text(event_file, capsys):
    assert main(["analyze", "--input", str(event_file), "--offset", "-20000", "--threshold", "50"]) == 0
    out = capsys.readouterr().out
    assert "CHSH" in out and "A->B0" in out and "chi2" in out


def test_analyze_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_bytes(bio.format_events([]))
    assert main(["analyze", "--input", str(path), "--format", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["N"] == 0 and rec["S_chsh"] is None and rec["p_chi2"] is None


def test_analyze_bad_data_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,x,y\n")
    assert main(["analyze", "--input", str(path)]) == 2
    assert "header" in capsys.readouterr().err
    assert main(["analyze", "--input", str(tmp_path / "missing.csv")]) == 2


def test_analyze_json_matches_csv_schema(event_file, capsys):
    main(["analyze", "--input", str(event_file), "--format", "json"])
    rec = json.loads(capsys.readouterr().out)
    assert list(rec) == bio.SCAN_FIELDS


def test_analyze_equals_scan_row(event_file, tmp_path, capsys):
    scan_out = tmp_path / "scan.csv"
    assert main(["scan", "--input", str(event_file), "--offset-min", "-30000", "--offset-max", "5000",
                 "--step", "5000", "--threshold", "50", "--output", str(scan_out)]) == 0
    rows = scan_out.read_text().splitlines()
    main(["analyze", "--input", str(event_file), "--offset", "-20000", "--threshold", "50", "--format", "csv"])
    analysed = capsys.readouterr().out.splitlines()
    assert analysed[0] == rows[0]
    assert analysed[1] in rows[1:]
    assert analysed[1].startswith("-20000,50,")


def test_scan_71_rows(event_file, tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--input", str(event_file), "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == bio.SCAN_HEADER
    assert len(lines) == 72


def test_scan2d_and_hist(event_file, tmp_path):
    scan_out, hist_out = tmp_path / "grid.csv", tmp_path / "hist.csv"
    assert main(["scan2d", "--input", str(event_file), "--offset-min", "-20000", "--offset-max", "0",
                 "--step", "5000", "--threshold-min", "0", "--threshold-max", "250",
                 "--threshold-step", "50", "--output", str(scan_out), "--jobs", "2"]) == 0
    assert len(scan_out.read_text().splitlines()) == 1 + 5 * 6
    for which in ("nosig", "chsh"):
        assert main(["hist", "--scan", str(scan_out), "--which", which, "--output", str(hist_out)]) == 0
        lines = hist_out.read_text().splitlines()
        assert lines[0] == "bin_low,count" and len(lines) == 21
        assert sum(int(line.split(",")[1]) for line in lines[1:]) <= 30


def test_hist_rejects_non_scan(event_file, tmp_path):
    assert main(["hist", "--scan", str(event_file), "--output", str(tmp_path / "h")]) == 2


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as info:
        main(["scan2d", "--help"])
    assert info.value.code == 0
    assert "default: -50000" in capsys.readouterr().out
