import json

import pytest

from pkv.cli import main
from pkv.config import SUITES, RunConfig, parse_config, with_overrides
from pkv.errors import ConfigError
from pkv.exact import I
from pkv.models import SigmaMatrix
from pkv.report import CheckReport, emit_report, parse_json, summarize, to_json, to_text
from pkv.suites import run_suites


def by_name(reports):
    return {r.name: r for r in reports}


# configuration --------------------------------------------------------------


def test_defaults():
    cfg = parse_config("")
    assert cfg.model == "complex" and cfg.n == 1 and cfg.seed == 0
    assert cfg.sigma == SigmaMatrix.identity(1) and cfg.suites == SUITES


def test_real_config():
    cfg = parse_config("model=real\nn=1\nsigma=1")
    assert cfg.model == "real" and cfg.n == 1 and cfg.sigma == SigmaMatrix.identity(1)


def test_complex_diagonal_config():
    cfg = parse_config("model=complex\nn=2\nsigma=1+0i,0;0,0+1i")
    assert cfg.sigma == SigmaMatrix.of([[1, 0], [0, I]])


def test_row_length_mismatch_names_the_line():
    with pytest.raises(ConfigError, match="row length mismatch at line 3") as err:
        parse_config("model=real\nn=2\nsigma=1,2;3")
    assert err.value.key == "sigma"
    with pytest.raises(ConfigError, match="row length mismatch at line 1"):
        parse_config("sigma=1,2;3")


def test_comments_and_blank_lines():
    cfg = parse_config("# a comment\n\nmodel = real   # trailing\nsuites = metric, holonomy\n")
    assert cfg.model == "real" and cfg.suites == ("metric", "holonomy")


@pytest.mark.parametrize("text, pattern", [
    ("model=real\ncolour=blue", "unknown key 'colour' at line 2"),
    ("n=2\nsigma=1", "n=2 does not match the 1x1 sigma at line 1"),
    ("sigma=1/0", "line 1"),
    ("model=real\nmodel=complex", "duplicate key 'model' at line 2"),
    ("suites=metric,colour", "unknown suite"),
    ("tol=-1", "tol must be positive at line 1"),
    ("n=0", "n must be at least 1"),
])
def test_config_errors(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text)


def test_sigma_file(tmp_path):
    path = tmp_path / "sigma.txt"
    path.write_text("1,0\n0,2\n", encoding="utf-8")
    cfg = parse_config(f"sigma_file={path}")
    assert cfg.n == 2 and cfg.sigma == SigmaMatrix.of([[1, 0], [0, 2]])


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PKV_SEED", "17")
    assert parse_config("seed=3").seed == 17


def test_overrides():
    cfg = with_overrides(parse_config(""), n=2)
    assert cfg.sigma == SigmaMatrix.identity(2)
    with pytest.raises(ConfigError):
        with_overrides(cfg, suites=())


# reports --------------------------------------------------------------------


def test_empty_report(capsys):
    assert emit_report([], "text") == 0
    out = capsys.readouterr().out
    assert "0 pass, 0 fail, 0 skipped" in out
    assert json.loads(to_json([]))["summary"] == {"pass": 0, "fail": 0, "skipped": 0}


def test_failing_report(capsys):
    r = CheckReport("Ric=0", "fail", "plumbing", {"component": [0, 1]})
    assert emit_report([r], "text") == 1
    assert '"component": [0, 1]' in capsys.readouterr().out


def test_fail_needs_a_witness():
    with pytest.raises(ValueError):
        CheckReport("x", "fail", "plumbing")
    with pytest.raises(ValueError):
        CheckReport("x", "pass", "")


def test_json_round_trip():
    reports = [CheckReport("a", "pass", "plumbing", None, 1.25),
               CheckReport("b", "indeterminate", "orbit spans", {"dims": [1, 1]}, 2.5),
               CheckReport("c", "fail", "plumbing", "bad", 0.0)]
    config, back = parse_json(to_json(reports, {"model": "real"}))
    assert config == {"model": "real"}
    assert [r.to_dict() for r in back] == [r.to_dict() for r in reports]
    assert summarize(back) == {"pass": 1, "fail": 1, "skipped": 1}
    assert to_text(back).count("\n") == 4


def test_unwritable_output():
    with pytest.raises(Exception, match="cannot write"):
        emit_report([], "text", "/nonexistent/dir/report.txt")


# runs -----------------------------------------------------------------------


def test_zero_sigma_run():
    cfg = parse_config("model=real\nsigma=0\nsuites=curvature,holonomy,transvection")
    reports = by_name(run_suites(cfg))
    assert reports["flat"].status == "pass"
    hol = [r for r in reports.values() if r.suite == "holonomy"]
    assert hol and all(r.status == "not-applicable" for r in hol)


def test_frances_run():
    reports = run_suites(parse_config("model=frances"))
    assert not [r for r in reports if r.status == "fail"]
    names = by_name(reports)
    assert names["J² = -I"].status == "pass"
    assert names["curvature table"].status == "pass"
    assert names["matches real n=1 curvature at origin"].status == "pass"


def test_runs_are_deterministic():
    cfg = parse_config("model=real\nsuites=metric,holonomy,geodesics,quotient\nseed=5")
    a = to_json(run_suites(cfg), cfg.to_dict(), timing=False)
    b = to_json(run_suites(cfg), cfg.to_dict(), timing=False)
    assert a == b


def test_anchors_are_nonempty():
    for r in run_suites(parse_config("model=real\nsuites=metric,conformal")):
        assert r.anchor


def test_large_n_skips_exact_suites():
    cfg = RunConfig(n=4, sigma=SigmaMatrix.identity(4), suites=("metric", "quotient"))
    reports = run_suites(cfg)
    assert reports[0].status == "skipped"
    assert all(r.status == "pass" for r in reports[1:])


# command line ---------------------------------------------------------------


def test_cli_verify_and_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--model", "real", "--suite", "metric", "holonomy", "--json", str(out), "--quiet"])
    assert code == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["version"] == 1 and doc["summary"]["fail"] == 0
    assert set(doc["checks"][0]) == {"name", "status", "anchor", "witness", "ms"}
    capsys.readouterr()
    assert main(["report", str(out)]) == 0
    assert "summary:" in capsys.readouterr().out


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model=real\nsuites=holonomy\n", encoding="utf-8")
    assert main(["verify", "--config", str(cfg)]) == 0
    assert "hol dim=1" in capsys.readouterr().out


def test_cli_geodesic_csv(capsys):
    assert main(["geodesic", "--model", "real", "--p", "1,1,0,0", "--t-end", "3", "--samples", "4"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "t,x1,x2,x3,x4"
    last = [float(v) for v in rows[-1].split(",")]
    assert last[0] == 3.0 and last[3] == pytest.approx(-9.0) and last[4] == pytest.approx(-9.0)


def test_cli_geodesic_rk4(capsys):
    assert main(["geodesic", "--model", "real", "--p", "1,1,0,0", "--t-end", "1", "--samples", "2",
                 "--method", "rk4"]) == 0
    last = [float(v) for v in capsys.readouterr().out.strip().splitlines()[-1].split(",")]
    assert last[3] == pytest.approx(-1 / 3, abs=1e-10)


def test_cli_quotient(capsys):
    assert main(["quotient", "--model", "real", "--point", "0.01,0.02,0,0", "--json", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["k"] > 0 and doc["membership"] in ("interior", "sphere-boundary")
    assert 0.0 <= doc["angle"] < 1.0


def test_cli_errors(capsys):
    assert main(["verify", "--sigma", "1,2;3"]) == 2
    assert "row length mismatch" in capsys.readouterr().err
    assert main(["geodesic", "--model", "real", "--p", "1,2"]) == 2
