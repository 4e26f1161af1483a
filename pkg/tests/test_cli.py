from __future__ import annotations

import csv
import math
import os

import pytest
import yaml

from collarbound import cli
from collarbound.errors import ConfigError, MissingSeries
from collarbound.reports import Verdict


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith(cli.RESULTS_VERSION)
    return list(csv.DictReader(lines[1:], delimiter="\t"))


def _write_scenario(tmp_path, steps, name="tiny", space="ball", tolerances=None):
    cfg = {"name": name, "space": space, "seed": 11, "steps": steps}
    if tolerances:
        cfg["tolerances"] = tolerances
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_ball_equality_scenario(tmp_path):
    status, out = cli.run_scenario("ball_equality", tmp_path / "a", echo=lambda *a, **k: None)
    assert status == 0
    rows = _rows(out / "results.tsv")
    verdicts = {r["verdict"] for r in rows if r["verdict"]}
    assert verdicts == {Verdict.PASS_AT_EQUALITY.value}
    assert "runtime" not in (out / "results.tsv").read_text()
    assert (out / "timings.tsv").exists() and (out / "summary.txt").exists()


def test_square_control_scenario_exits_zero(tmp_path):
    status, out = cli.run_scenario("square_control", tmp_path, echo=lambda *a, **k: None)
    assert status == 0
    rows = _rows(out / "results.tsv")
    contraction = [r for r in rows if r["quantity"].startswith("contraction")]
    assert contraction[0]["verdict"] == Verdict.CONTROL.value
    assert float(contraction[0]["value"]) == pytest.approx(1.0, abs=1e-6)


def test_summary_counts_match_rows(tmp_path):
    _, out = cli.run_scenario("square_control", tmp_path, echo=lambda *a, **k: None)
    rows = _rows(out / "results.tsv")
    summary = (out / "summary.txt").read_text()
    for verdict in Verdict:
        n = sum(r["verdict"] == verdict.value for r in rows)
        assert f"{verdict.value:<30} {n}" in summary


def test_rerun_is_bit_exact(tmp_path):
    path = _write_scenario(tmp_path, [
        {"name": "vol", "command": "volume", "method": "monte_carlo", "samples": 100_000},
        {"name": "suite", "command": "compare", "claims": ["contraction", "collar_volume"],
         "pairs": 100, "samples": 100_000},
        {"name": "pack", "command": "pack", "space": "disk", "eps": [0.2, 0.1]},
    ])
    cli.run_scenario(path, tmp_path / "one", echo=lambda *a, **k: None)
    cli.run_scenario(path, tmp_path / "two", echo=lambda *a, **k: None)
    for name in ("results.tsv", "summary.txt", "pack.packing_trend.tsv"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_step_seeds_depend_on_step_identity(tmp_path):
    step = {"name": "vol", "command": "volume", "method": "monte_carlo", "samples": 50_000}
    extra = {"name": "first", "command": "volume", "method": "monte_carlo", "samples": 50_000}
    a = _write_scenario(tmp_path, [step], name="seeded")
    cli.run_scenario(a, tmp_path / "a", echo=lambda *a, **k: None)
    b = _write_scenario(tmp_path, [extra, step], name="seeded")
    cli.run_scenario(b, tmp_path / "b", echo=lambda *a, **k: None)
    ra = [r for r in _rows(tmp_path / "a" / "results.tsv") if r["step"] == "vol"]
    rb = [r for r in _rows(tmp_path / "b" / "results.tsv") if r["step"] == "vol"]
    assert ra == rb
    assert cli.step_seed(1, "s", "x") != cli.step_seed(2, "s", "x")
    assert cli.step_seed(1, "s", "x") != cli.step_seed(1, "s", "y")


def test_step_error_recorded_and_run_continues(tmp_path):
    path = _write_scenario(tmp_path, [
        {"name": "too_deep", "command": "volume", "region": "collar", "r": 2.0},
        {"name": "fine", "command": "volume"},
    ])
    status, out = cli.run_scenario(path, tmp_path / "o", echo=lambda *a, **k: None)
    assert status != 0
    rows = _rows(out / "results.tsv")
    assert rows[0]["verdict"] == "error"
    assert float(rows[1]["value"]) == pytest.approx(4 * math.pi / 3)


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        cli.run_scenario(_write_scenario(tmp_path, [{"name": "x", "command": "volume"}],
                                         name="nospace", space="no_such_space"), tmp_path / "o")
    with pytest.raises(ConfigError):
        cli.run_scenario(_write_scenario(tmp_path, [{"name": "x", "command": "teleport"}],
                                         name="badcmd"), tmp_path / "o")
    with pytest.raises(ConfigError):
        cli.run_scenario(_write_scenario(tmp_path, [{"name": "x", "command": "volume", "colour": 1}],
                                         name="badparam"), tmp_path / "o")
    with pytest.raises(ConfigError):
        cli.run_scenario(_write_scenario(tmp_path, [{"name": "x", "command": "volume"}],
                                         name="badtol", tolerances={"nonsense": 1}), tmp_path / "o")


def test_missing_space_exit_code(tmp_path, capsys):
    assert cli.main(["volume", "--space", str(tmp_path / "nope.yaml")]) != 0
    assert "config error" in capsys.readouterr().err


def test_tolerance_overrides_are_scoped():
    var = "COLLARBOUND_TOL_INRADIUS"
    assert var not in os.environ
    with cli.tolerance_overrides({"inradius": 0.5}):
        from collarbound.tolerances import tol

        assert tol("inradius") == 0.5
    assert var not in os.environ


def test_emit_plot_data(tmp_path):
    rows = [(0.0, 12.566, 0.0, 12.566), (0.5, 3.14, 0.01, 3.1416)]
    text = cli.emit_plot_data({"area_profile": rows}, "area_profile", tmp_path / "p.tsv")
    lines = text.splitlines()
    assert lines[0] == f"{cli.PLOT_VERSION} area_profile"
    assert lines[1].split("\t") == ["t", "area", "std_error", "reference"]
    with pytest.raises(MissingSeries):
        cli.emit_plot_data({}, "area_profile")
    with pytest.raises(MissingSeries):
        cli.emit_plot_data({"area_profile": rows}, "packing_trend")


def test_ball_area_profile_plot_columns(tmp_path):
    grid = ",".join(str(0.05 * i) for i in range(11))
    assert cli.main(["profile", "--space", "ball", "--t", grid, "--samples", "400000",
                     "--method", "monte_carlo", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "profile.area_profile.tsv").read_text().splitlines()
    assert lines[1].split("\t") == ["t", "area", "std_error", "reference"]
    for line in lines[2:]:
        t, A, sigma, ref = (float(v) for v in line.split("\t"))
        assert ref == pytest.approx(4 * math.pi * (1 - t) ** 2)
        assert abs(A - ref) <= 4 * sigma + 0.01 * ref


def test_single_commands(capsys):
    assert cli.main(["volume", "--space", "hemisphere", "--region", "collar",
                     "--r", str(math.pi / 4)]) == 0
    out = capsys.readouterr().out.splitlines()
    row = dict(zip(out[1].split("\t"), out[2].split("\t")))
    assert float(row["value"]) == pytest.approx(2 * math.pi * math.sin(math.pi / 4))
    assert cli.main(["flow", "--space", "ball", "--T", "0.5", "--start", "1,0,0"]) == 0
    out = capsys.readouterr().out.splitlines()
    row = dict(zip(out[1].split("\t"), out[2].split("\t")))
    assert float(row["flow_time"]) == pytest.approx(math.log(2), abs=1e-12)
    assert cli.main(["base-angle", "--space", "disk", "--points", "3"]) == 0
    assert cli.main(["pack", "--space", "disk", "--eps", "0.2,0.1"]) == 0
    assert cli.main(["compare", "--space", "ball", "--claims", "inradius,cone_volume"]) == 0
    assert cli.main(["compare", "--space", "ball", "--claims", "inradius", "--param", "bogus=1"]) != 0


def test_compare_exit_code_on_failure(tmp_path, monkeypatch):
    from collarbound.reports import make_report

    def failing(space, claims, params, seed):
        return [make_report("inradius", space, {}, 1.0, 1.5, det_slack=1e-3)], []

    monkeypatch.setattr(cli.cmp, "validate", failing)
    path = _write_scenario(tmp_path, [{"name": "c", "command": "compare", "claims": ["inradius"]}],
                           name="fails", space="ellipsoid_certified")
    status, out = cli.run_scenario(path, tmp_path / "o", echo=lambda *a, **k: None)
    assert _rows(out / "results.tsv")[0]["verdict"] == Verdict.FAIL.value
    assert status == 1
    assert cli.main(["compare", "--space", "ellipsoid_certified"]) == 1
    # The same failure on a hypothesis-violating space is a control and exits 0.
    status, _ = cli.run_scenario(_write_scenario(tmp_path, [{"name": "c", "command": "compare"}],
                                                 name="controls", space="square"),
                                 tmp_path / "p", echo=lambda *a, **k: None)
    assert status == 0
