import json
import subprocess
import sys

import pytest

from schattenp import guarantees
from schattenp.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, build_parser, main


def summary_of(out):
    return json.loads(out[out.index("{"):])


def test_parser_has_all_subcommands_and_flags():
    parser = build_parser()
    for cmd in ("thresholds", "curve", "phase", "verify-bounds", "nsp", "rip"):
        args = parser.parse_args([cmd, "--config", "c.json", "--seed", "3", "--out", "o",
                                  "--trials", "2", "--p", "0.5,0.8", "--rank", "1,2",
                                  "--measurements", "10"])
        assert (args.seed, args.trials, args.p, args.rank, args.measurements) == \
            (3, 2, (0.5, 0.8), (1, 2), (10,))


def test_curve_command(tmp_path, capsys):
    out = tmp_path / "curve"
    assert main(["curve", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert 0.21 <= summary_of(text)["crossing_points"]["5,6"] <= 0.23
    assert (out / "curve_r5_t6.csv").exists() and (out / "curve_r5_t6.json").exists()


def test_curve_rank_flag_sets_pairs(tmp_path, capsys):
    assert main(["curve", "--rank", "1", "--p", "0.5,1", "--out", str(tmp_path)]) == EXIT_OK
    p_star = summary_of(capsys.readouterr().out)["crossing_points"]["1,2"]
    assert p_star == pytest.approx(guarantees.crossing_point(1, 2))


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "thresholds", "ranks": [2], "p_grid": [0.5, 1.0]}))
    assert main(["thresholds", "--config", str(cfg), "--rank", "3", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    lines = (tmp_path / "thresholds.csv").read_text().splitlines()
    assert len(lines) == 3 and all(line.split(",")[1] == "3" for line in lines[1:])


def test_rerun_via_cli_is_byte_identical(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["nsp", "--seed", "9", "--trials", "5", "--out", str(tmp_path / name)]) == 0
    capsys.readouterr()
    for f in ("nsp.csv", "nsp.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


@pytest.mark.parametrize(
    "argv",
    [[], ["plot"], ["curve", "--bogus"], ["curve", "--trials", "many"], ["curve", "--p", "x,y"],
     ["curve", "--p", "1.5"], ["phase", "--trials", "0"], ["nsp", "--seed", "-1"],
     ["curve", "--config", "/nonexistent/c.json"]],
)
def test_usage_errors_exit_one(argv, tmp_path, capsys):
    if len(argv) > 1:
        argv = argv + ["--out", str(tmp_path)]
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == EXIT_USAGE
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("content", ["{oops", "[1]", json.dumps({"kind": "phase"}),
                                     json.dumps({"kind": "curve", "n_x": 3})])
def test_bad_config_files_exit_one(content, tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(content)
    assert main(["curve", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_unwritable_output_exits_one(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["curve", "--out", str(blocker / "sub")]) == EXIT_USAGE


def test_bound_violation_exits_two(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(guarantees, "error_bound_rhs", lambda *args: 0.0)
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "verify-bounds", "n_v": 40, "m_v": 10}))
    code = main(["verify-bounds", "--config", str(cfg), "--trials", "2", "--out", str(tmp_path)])
    assert code == EXIT_VIOLATION
    assert "violation" in capsys.readouterr().err


def test_clean_bound_run_exits_zero(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "verify-bounds", "n_v": 40, "m_v": 10}))
    assert main(["verify-bounds", "--config", str(cfg), "--trials", "2", "--out", str(tmp_path)]) == 0
    s = summary_of(capsys.readouterr().out)
    assert s["status"] == "ok" and s["violations"] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "schattenp", "thresholds", "--p", "1",
                           "--rank", "1", "--out", str(tmp_path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert "thresholds.csv" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "schattenp", "curve", "--nope"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1
