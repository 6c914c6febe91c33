from __future__ import annotations

import json
import pathlib

import pytest

from grunskykit.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_VALIDATION, build_run_config, main, parse_args

JOBS = pathlib.Path(__file__).resolve().parents[1] / "jobs"


def _run(capsys, *argv: str) -> tuple[int, dict]:
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_success(capsys, tmp_path) -> None:
    code, out = _run(capsys, "--command", "grunsky", "--input", str(JOBS / "ellipse_map.json"),
                     "--out", str(tmp_path), "-K", "4")
    assert code == EXIT_OK
    assert out == {"status": "OK", "output_dir": str(tmp_path)}
    assert (tmp_path / "grunsky.json").exists()


def test_parse_error(capsys, tmp_path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{\"kind\": ", encoding="utf-8")
    code, out = _run(capsys, "--command", "report", "--input", str(broken), "--out", str(tmp_path / "out"))
    assert code == EXIT_VALIDATION
    assert out["error"] == "parse"


def test_overlap_error(capsys, tmp_path) -> None:
    code, out = _run(capsys, "--command", "rigging-verify", "--input", str(JOBS / "overlapping_rigging.json"),
                     "--out", str(tmp_path), "-K", "2")
    assert code == EXIT_VALIDATION
    assert out == {"error": "overlap", "message": "caps 0 and 1 overlap"}


def test_budget_error(capsys, tmp_path) -> None:
    code, out = _run(capsys, "--command", "grunsky", "--input", str(JOBS / "ellipse_map.json"),
                     "--out", str(tmp_path), "-K", "17")
    assert code == EXIT_VALIDATION
    assert out["error"] == "budget"


def test_missing_command_is_a_config_error(capsys, tmp_path) -> None:
    code, out = _run(capsys, "--input", str(JOBS / "ellipse_map.json"), "--out", str(tmp_path))
    assert code == EXIT_VALIDATION
    assert out == {"error": "config", "message": "Missing key: command"}


def test_tolerance_failure(capsys, tmp_path) -> None:
    code, out = _run(capsys, "--command", "jump", "--input", str(JOBS / "ellipse_jump.json"),
                     "--out", str(tmp_path), "-N", "512", "--tolerance", "1e-300")
    assert code == EXIT_TOLERANCE
    assert out["error"] == "tolerance"
    assert json.loads((tmp_path / "audit.json").read_text(encoding="utf-8"))["status"] == "TOLERANCE"


def test_unknown_command_choice() -> None:
    with pytest.raises(SystemExit):
        parse_args(["--command", "solve"])


def test_flags_override_run_file(tmp_path) -> None:
    run_file = tmp_path / "run.yml"
    run_file.write_text(
        "command: grunsky\n"
        f"input: {JOBS / 'ellipse_map.json'}\n"
        "output: out/from_file\n"
        "K: 4\n"
        "tolerances:\n"
        "  symmetry: 1.0e-6\n",
        encoding="utf-8",
    )
    cfg = build_run_config(parse_args(["--config", str(run_file), "-K", "6", "--out", str(tmp_path / "flag")]))
    assert cfg.command == "grunsky"
    assert cfg.K == 6
    assert cfg.output_path == str(tmp_path / "flag")
    assert cfg.tolerances.symmetry == 1e-6
    assert cfg.N is None

    loose = build_run_config(parse_args(["--config", str(run_file), "--tolerance", "0.5"]))
    assert loose.tolerances.symmetry == 0.5
    assert loose.tolerances.graph == 0.5
    assert loose.output_path == "out/from_file"


def test_malformed_rational_term_is_a_config_error(capsys, tmp_path) -> None:
    bad = tmp_path / "jump.json"
    bad.write_text(json.dumps({"map": {"kind": "laurent", "leading": 1.0, "coeffs": [0.0, 0.3]},
                               "rational": {"terms": [1]}}), encoding="utf-8")
    code, out = _run(capsys, "--command", "jump", "--input", str(bad), "--out", str(tmp_path / "out"))
    assert code == EXIT_VALIDATION
    assert out == {"error": "config", "message": "terms[0] must be a mapping/object"}


def test_same_run_gives_identical_files(capsys, tmp_path) -> None:
    argv = ("--command", "rigging-verify", "--input", str(JOBS / "annulus_rigging.json"),
            "--out", str(tmp_path), "-K", "4")
    assert _run(capsys, *argv)[0] == EXIT_OK
    first = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
    assert _run(capsys, *argv)[0] == EXIT_OK
    second = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
    assert "blocks.json" in first and "audit.json" in first
    assert first == second
