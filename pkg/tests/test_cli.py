import json

import pytest

from swlab.cli import EXIT_FAIL, EXIT_IO, EXIT_PASS, EXIT_USAGE, UsageError, main, parse_config_text
from swlab.suites import RECORD_FIELDS, RunConfig, make_record, rng_for


def _ledger(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_reduce_only_ledger(tmp_path, capsys):
    out = tmp_path / "l.jsonl"
    assert main(["reduce-check", "--grid", "16", "--seed", "4", "--out", str(out)]) == EXIT_PASS
    recs = _ledger(out)
    assert recs and all(r["check_id"].startswith("reduce.") for r in recs)
    assert all(tuple(sorted(r)) == tuple(sorted(RECORD_FIELDS)) for r in recs)
    assert "checks passed" in capsys.readouterr().out


def test_ledger_is_appended_not_overwritten(tmp_path):
    out = tmp_path / "l.jsonl"
    out.write_text('{"check_id": "earlier"}\n')
    main(["reduce-check", "--grid", "16", "--out", str(out)])
    recs = _ledger(out)
    assert recs[0] == {"check_id": "earlier"} and len(recs) > 1


def test_missing_output_directory_is_io_error(tmp_path):
    assert main(["reduce-check", "--out", str(tmp_path / "nope" / "l.jsonl")]) == EXIT_IO


def test_unknown_config_key_is_usage_error(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("grid = 16\ngird = 8\n")
    assert main(["all", "--config", str(cfg), "--out", str(tmp_path / "l.jsonl")]) == EXIT_USAGE
    assert not (tmp_path / "l.jsonl").exists()


@pytest.mark.parametrize("argv", [["frobnicate"], [], ["all", "--grid", "x"], ["reduce-check", "--tol", "0"],
                                  ["reduce-check", "--seed", "a,b"], ["reduce-check", "--config", "/no/such/file"]])
def test_usage_errors(argv, tmp_path):
    assert main(argv + (["--out", str(tmp_path / "l")] if len(argv) > 1 else [])) == EXIT_USAGE


def test_config_file_schema():
    kw = parse_config_text("# comment\nsuites = reduce, index\nseeds = 1,2\ntol = 1e-11\npatch_grids = 16,32\nh_mode = general\n")
    assert kw == {"suites": ("reduce", "index"), "seeds": (1, 2), "tol": 1e-11, "patch_grids": (16, 32), "h_mode": "general"}
    with pytest.raises(UsageError):
        parse_config_text("grid = many\n")
    with pytest.raises(UsageError):
        parse_config_text("no delimiter here\n")


def test_config_file_drives_all(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("suites = reduce\ndraws = 3\n")
    out = tmp_path / "l.jsonl"
    assert main(["all", "--config", str(cfg), "--out", str(out)]) == EXIT_PASS
    assert {r["check_id"].split(".")[0] for r in _ledger(out)} == {"reduce"}


def test_failing_check_gives_exit_one(tmp_path, monkeypatch):
    import swlab.cli as cli

    monkeypatch.setattr(cli, "run_suites", lambda cfg: [make_record("x.y", "x", 1.0, 0.0, "abs", 1e-12)])
    assert main(["reduce-check", "--out", str(tmp_path / "l")]) == EXIT_FAIL


def test_run_config_invariants():
    with pytest.raises(ValueError):
        RunConfig(suites=())
    with pytest.raises(ValueError):
        RunConfig(suites=("bogus",))
    with pytest.raises(ValueError):
        RunConfig(tol=-1.0)
    with pytest.raises(ValueError):
        RunConfig(h_mode="sometimes")


def test_record_comparisons():
    assert make_record("a", "s", 1e-13, 0.0, "abs", 1e-12).passed
    assert not make_record("a", "s", 1.1, 1.0, "rel", 0.05).passed
    assert make_record("a", "s", 3.0, 2.0, "ge", None).passed
    assert not make_record("a", "s", 3.0, 2.0, "le", None).passed
    assert make_record("a", "s", 3.0, 2.0, "le", None, asserted=False).passed
    with pytest.raises(ValueError):
        make_record("a", "s", 1.0, 1.0, "approx", 1.0)


def test_streams_are_reproducible_and_distinct():
    a = rng_for(1, "x", 0).standard_normal(4)
    assert (a == rng_for(1, "x", 0).standard_normal(4)).all()
    assert not (a == rng_for(1, "y", 0).standard_normal(4)).any()
    assert not (a == rng_for(2, "x", 0).standard_normal(4)).any()
