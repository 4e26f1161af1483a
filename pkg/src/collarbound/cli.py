"""Command-line interface: single measurements, claim suites and scenario runs.

Every subcommand is a thin wrapper around a *step function* that takes a space,
a parameter mapping and a seed, and returns a :class:`StepOutput`. Scenario
files are lists of such steps, so a scenario run and the equivalent sequence
of single commands execute the same code.

Output files are tab-separated with a versioned header line. The results file
of a scenario never contains runtimes (those go to ``timings.tsv``) so that
re-running with the same seed reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import io
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import compare as cmp
from .convexity import DEFAULT_RADII, comparison_bound, level_base_angles, level_report
from .errors import (
    CollarBoundError,
    ConfigError,
    MissingSeries,
    ParameterError,
    StepError,
)
from .flow import _check_boundary_start, analytic_flow_time, profile_for, transport
from .measure import Method, area_profile, rough_volume, volume
from .reports import Verdict
from .spaces import load_space, sample_boundary
from .tolerances import DEFAULTS as TOLERANCE_DEFAULTS

RESULTS_VERSION = "# collarbound-results v1"
PLOT_VERSION = "# collarbound-plot v1"
RESULT_COLUMNS = ["step", "quantity", "value", "error", "bound", "verdict", "seed"]
DATA_DIR = Path(__file__).resolve().parent / "data"

PLOT_COLUMNS = {
    "area_profile": ["t", "area", "std_error", "reference"],
    "packing_trend": ["eps", "beta", "scaled"],
    "contraction_ratios": ["pair", "d0", "ratio", "reference"],
}


# ---------------------------------------------------------------------------
# Step outputs
# ---------------------------------------------------------------------------

@dataclass
class StepOutput:
    """What one step produced.

    ``rows`` are the command's native records (printed by single commands),
    ``results`` the same information in the common results schema, ``reports``
    any comparison reports, and ``series`` plot-ready columns keyed by kind.
    """

    rows: list = field(default_factory=list)
    results: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    series: dict = field(default_factory=dict)


def _result(quantity, value, error=0.0, bound=math.nan, verdict=""):
    return {"quantity": quantity, "value": float(value), "error": float(error),
            "bound": float(bound), "verdict": verdict}


def _report_result(rep):
    params = ",".join(f"{k}={_fmt(v)}" for k, v in rep.parameters.items())
    return _result(f"{rep.claim}[{params}]", rep.measured, rep.error, rep.bound, rep.verdict.value)


def _fmt(v):
    """Round-trip text for numbers so results files are bit-exact."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ";".join(_fmt(x) for x in v) + "]"
    return str(v)


def _float_list(value, name):
    if isinstance(value, str):
        value = [x for x in value.replace(";", ",").split(",") if x.strip()]
    try:
        out = [float(x) for x in np.atleast_1d(value)]
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a list of numbers") from exc
    if not out:
        raise ParameterError(f"{name} must not be empty")
    return out


# ---------------------------------------------------------------------------
# Step functions
# ---------------------------------------------------------------------------

def step_volume(space, params, seed):
    region = params.get("region", "whole")
    samples = int(params.get("samples", 10**6))
    est = volume(space, region, samples, seed, r=params.get("r"),
                 method=params.get("method", "auto"))
    label = "volume" if region == "whole" else f"volume[{region},r={_fmt(float(params['r']))}]"
    return StepOutput(rows=[est.as_row(label)], results=[_result(label, est.value, est.std_error)])


def step_profile(space, params, seed):
    samples = int(params.get("samples", 10**6))
    if "t" in params:
        grid = _float_list(params["t"], "t")
    else:
        a = space.inradius
        if a is None:
            raise ParameterError("profile needs an explicit t grid for spaces without an inradius")
        levels = int(params.get("levels", 64))
        grid = np.linspace(0.0, a * (1 - 1.0 / levels), levels)
    prof = area_profile(space, grid, samples, seed, method=params.get("method", "auto"))
    rows, results = [], []
    for t, A, err, ref in prof.rows():
        q = f"A({_fmt(float(t))})"
        rows.append({"quantity": q, "value": float(A), "std_error": float(err),
                     "method": prof.method.value, "samples": prof.samples, "seed": seed,
                     "reference": float(ref)})
        results.append(_result(q, A, err, ref))
    series = {"area_profile": [(float(t), float(A), float(e), float(r)) for t, A, e, r in prof.rows()]}
    return StepOutput(rows, results, [], series)


def step_pack(space, params, seed):
    eps = _float_list(params.get("eps", [0.2, 0.1, 0.05]), "eps")
    kwargs = {}
    if "pool_cap" in params:
        kwargs["pool_cap"] = int(params["pool_cap"])
    if "pool_factor" in params:
        kwargs["pool_factor"] = float(params["pool_factor"])
    table = rough_volume(space, eps, seed, **kwargs)
    rows, results = [], []
    for row in table:
        q = f"packing(eps={_fmt(row.eps)})"
        rows.append({"quantity": q, "value": row.scaled, "std_error": 0.0,
                     "method": Method.PACKING.value, "samples": row.pool, "seed": seed,
                     "beta": row.beta})
        results.append(_result(q, row.scaled))
    series = {"packing_trend": [(r.eps, float(r.beta), r.scaled) for r in table]}
    return StepOutput(rows, results, [], series)


def step_flow(space, params, seed):
    profile = profile_for(params.get("profile", space.kappa))
    T = float(params["T"])
    step = params.get("step")
    if "starts" in params:
        P = space.as_points(np.asarray(params["starts"], dtype=float))
        for p in P:
            _check_boundary_start(space, p)
    else:
        P = sample_boundary(space, int(params.get("points", 10)), seed)
    profile.check_level(T)
    res = transport(space, P, [T], step=None if step is None else float(step), profile=profile)
    bound = analytic_flow_time(profile, T)
    rows, results = [], []
    for i, p in enumerate(P):
        t = float(res.times[i, 0])
        rows.append({"curve": i, "start": _fmt(p), "end": _fmt(res.points[i, 0]),
                     "flow_time": t, "steps": int(res.steps[i]),
                     "degenerate": bool(res.degenerate[i])})
        results.append(_result(f"flow_time[{i}]", t, 0.0, bound))
    return StepOutput(rows, results)


def step_base_angle(space, params, seed):
    target = params.get("target", "boundary")
    if target not in ("boundary", "level"):
        raise ParameterError("target must be 'boundary' or 'level'")
    t = 0.0 if target == "boundary" else float(params["t"])
    radii = _float_list(params.get("radii", DEFAULT_RADII), "radii")
    est = level_base_angles(space, t, int(params.get("points", 8)), seed, radii,
                            int(params.get("directions", 16)))
    claim = "boundary_convexity" if t == 0 else "hessian_comparison"
    rep = level_report(space, t, est, claim)
    bound = comparison_bound(space.kappa, t)
    rows, results = [], []
    for i, e in enumerate(est):
        rows.append({"point": _fmt(e.point), "level": e.level, "estimate": e.estimate,
                     "mean": e.mean, "spread": e.spread, "resolution": e.resolution})
        results.append(_result(f"base_angle[t={_fmt(t)},{i}]", e.estimate, e.resolution, bound))
    results.append(_report_result(rep))
    return StepOutput(rows, results, [rep])


_COMPARE_KEYS = {"r", "T", "t_grid", "samples", "pairs", "points", "base_angle_points"}


def step_compare(space, params, seed):
    claims = params.get("claims", "all")
    if isinstance(claims, str) and claims != "all":
        claims = [c.strip() for c in claims.split(",") if c.strip()]
    overrides = {k: v for k, v in params.items() if k in _COMPARE_KEYS}
    reports, skipped = cmp.validate(space, claims, overrides, seed)
    rows = [rep.as_row() for rep in reports]
    out = StepOutput(rows, [_report_result(rep) for rep in reports], reports)
    for name in skipped:
        out.results.append(_result(f"{name}[skipped]", math.nan, verdict="skipped"))
    if "contraction_ratios" in params.get("plot", []):
        p = {**cmp.default_parameters(space), **overrides}
        d0, ratio, _ = cmp.contraction_ratios(space, p["T"], p["pairs"], seed)
        factor = 1.0 - p["T"] if space.kappa == 0 else math.cos(p["T"])
        out.series["contraction_ratios"] = [(float(i), float(a), float(b), factor)
                                            for i, (a, b) in enumerate(zip(d0, ratio))]
    return out


STEPS = {
    "volume": (step_volume, {"region", "r", "samples", "method"}),
    "profile": (step_profile, {"t", "levels", "samples", "method"}),
    "pack": (step_pack, {"eps", "pool_cap", "pool_factor"}),
    "flow": (step_flow, {"profile", "T", "starts", "points", "step"}),
    "base-angle": (step_base_angle, {"target", "t", "points", "radii", "directions"}),
    "compare": (step_compare, {"claims", "plot"} | _COMPARE_KEYS),
}


# ---------------------------------------------------------------------------
# Seeding, tolerances and file emission
# ---------------------------------------------------------------------------

def step_seed(global_seed, scenario, step):
    """Per-step seed from (scenario name, step name) so inserting steps changes nothing else."""
    key = int(global_seed).to_bytes(8, "little")
    h = hashlib.blake2b(f"{scenario}\x00{step}".encode(), key=key, digest_size=7)
    return int.from_bytes(h.digest(), "little")


@contextlib.contextmanager
def tolerance_overrides(overrides):
    """Temporarily apply tolerance overrides through the COLLARBOUND_TOL_* variables."""
    saved = {}
    try:
        for name, value in (overrides or {}).items():
            if name not in TOLERANCE_DEFAULTS:
                raise ConfigError(f"unknown tolerance {name!r}")
            var = f"COLLARBOUND_TOL_{name.upper()}"
            saved[var] = os.environ.get(var)
            os.environ[var] = repr(float(value))
        yield
    finally:
        for var, old in saved.items():
            if old is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = old


def _write_tsv(path, header, columns, rows):
    buf = io.StringIO()
    buf.write(header + "\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row.get(c, "") for c in columns] if isinstance(row, dict) else row
        writer.writerow([_fmt(v) for v in values])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def emit_plot_data(results, kind, path=None):
    """Write one plot series as a column file; ``results`` maps kind to row tuples."""
    if kind not in PLOT_COLUMNS:
        raise MissingSeries(f"unknown series kind {kind!r}; expected one of {sorted(PLOT_COLUMNS)}")
    rows = (results or {}).get(kind)
    if not rows:
        raise MissingSeries(f"results contain no {kind} series")
    return _write_tsv(path, f"{PLOT_VERSION} {kind}", PLOT_COLUMNS[kind], rows)


def _summary_table(rows):
    counts = {v.value: 0 for v in Verdict}
    for row in rows:
        if row["verdict"] in counts:
            counts[row["verdict"]] += 1
    errors = sum(1 for row in rows if row["verdict"] == "error")
    lines = ["verdict                        count"]
    lines += [f"{k:<30} {v}" for k, v in counts.items()]
    lines.append(f"{'error':<30} {errors}")
    return counts, errors, "\n".join(lines)


def _failed(rows):
    return any(row["verdict"] in (Verdict.FAIL.value, "error") for row in rows)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = {"name", "description", "space", "seed", "output", "tolerances", "steps"}


def _resolve(ref, base, folder):
    """Find a file by path (relative to ``base``) or by bundled name."""
    p = Path(ref)
    for cand in (p, base / p, DATA_DIR / folder / p, DATA_DIR / folder / f"{ref}.yaml"):
        if cand.is_file():
            return cand
    raise ConfigError(f"cannot find {folder[:-1]} {ref!r}")


def load_scenario(path):
    path = _resolve(path, Path.cwd(), "scenarios")
    try:
        cfg = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed scenario {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("scenario must be a mapping")
    unknown = set(cfg) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
    for key in ("name", "space", "steps"):
        if key not in cfg:
            raise ConfigError(f"scenario needs {key!r}")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("scenario seed must be an integer in [0, 2^64)")
    steps = cfg["steps"]
    if not isinstance(steps, list) or not steps:
        raise ConfigError("scenario steps must be a nonempty list")
    names = set()
    base = path.parent
    spaces = {}
    for st in steps:
        if not isinstance(st, dict) or "name" not in st or "command" not in st:
            raise ConfigError("each step needs 'name' and 'command'")
        if st["name"] in names:
            raise ConfigError(f"duplicate step name {st['name']!r}")
        names.add(st["name"])
        if st["command"] not in STEPS:
            raise ConfigError(f"unknown command {st['command']!r}; expected one of {sorted(STEPS)}")
        allowed = STEPS[st["command"]][1] | {"name", "command", "space"}
        extra = set(st) - allowed
        if extra:
            raise ConfigError(f"step {st['name']}: unknown parameters {sorted(extra)}")
        ref = st.get("space", cfg["space"])
        if ref not in spaces:
            spaces[ref] = load_space(_resolve(ref, base, "spaces"))
    for name in cfg.get("tolerances") or {}:
        if name not in TOLERANCE_DEFAULTS:
            raise ConfigError(f"unknown tolerance {name!r}")
    return cfg, spaces, path


def run_scenario(path, out_dir=None, seed=None, echo=print):
    """Execute a scenario; returns (exit status, output directory)."""
    cfg, spaces, path = load_scenario(path)
    name = cfg["name"]
    global_seed = cfg.get("seed", 0) if seed is None else int(seed)
    out = Path(out_dir or cfg.get("output") or Path("results") / name)
    out.mkdir(parents=True, exist_ok=True)
    rows, timings, series_files = [], [], []
    with tolerance_overrides(cfg.get("tolerances")):
        for st in cfg["steps"]:
            fn = STEPS[st["command"]][0]
            params = {k: v for k, v in st.items() if k not in ("name", "command", "space")}
            space = spaces[st.get("space", cfg["space"])]
            s = step_seed(global_seed, name, st["name"])
            start = time.perf_counter()
            try:
                try:
                    result = fn(space, params, s)
                except CollarBoundError as exc:
                    raise StepError(f"step {st['name']}: {type(exc).__name__}: {exc}") from exc
            except StepError as exc:
                echo(f"error: {exc}", file=sys.stderr)
                rows.append({"step": st["name"], **_result("error", math.nan, verdict="error"),
                             "seed": s})
                timings.append((st["name"], time.perf_counter() - start))
                continue
            timings.append((st["name"], time.perf_counter() - start))
            for r in result.results:
                rows.append({"step": st["name"], **r, "seed": s})
            for kind in sorted(result.series):
                target = out / f"{st['name']}.{kind}.tsv"
                emit_plot_data(result.series, kind, target)
                series_files.append(target.name)
    _write_tsv(out / "results.tsv", f"{RESULTS_VERSION} scenario={name} seed={global_seed}",
               RESULT_COLUMNS, rows)
    _write_tsv(out / "timings.tsv", "# collarbound-timings v1", ["step", "runtime_s"],
               [{"step": a, "runtime_s": b} for a, b in timings])
    _, _, table = _summary_table(rows)
    failed = _failed(rows)
    summary = [f"scenario {name} (seed {global_seed}) from {path}", "", table, ""]
    for r in rows:
        if r["verdict"] in (Verdict.FAIL.value, Verdict.CONTROL.value, "error"):
            summary.append(f"{r['verdict']:<28} {r['step']}: {r['quantity']}")
    if series_files:
        summary += ["", "plot data: " + ", ".join(series_files)]
    summary += ["", "status: " + ("FAILED" if failed else "ok")]
    text = "\n".join(summary) + "\n"
    (out / "summary.txt").write_text(text)
    echo(text, end="")
    return (1 if failed else 0), out


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError("parameters take the form key=value")
    key, value = text.split("=", 1)
    return key.strip(), yaml.safe_load(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="collarbound",
        description="Numerical checks of collar-volume, contraction and base-angle comparison bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples=True):
        p.add_argument("--space", required=True, help="space config path or bundled name")
        p.add_argument("--seed", type=int, default=0, help="random seed (u64)")
        if samples:
            p.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples")
        p.add_argument("--out", help="write files to this directory instead of stdout")
        return p

    p = common(sub.add_parser("volume", help="volume of the space, a collar or a sublevel set"))
    p.add_argument("--region", choices=["whole", "collar", "sublevel"], default="whole")
    p.add_argument("--r", type=float, help="collar depth or sublevel threshold")
    p.add_argument("--method", choices=["auto", "analytic", "monte_carlo"], default="auto")

    p = common(sub.add_parser("profile", help="level-set area profile A(t)"))
    p.add_argument("--t", help="comma-separated levels (default: 64 levels up to the inradius)")
    p.add_argument("--levels", type=int, default=64)
    p.add_argument("--method", choices=["auto", "analytic", "monte_carlo"], default="auto")

    p = common(sub.add_parser("pack", help="greedy packing numbers and eps^n beta(eps)"), samples=False)
    p.add_argument("--eps", default="0.2,0.1,0.05", help="comma-separated decreasing schedule")
    p.add_argument("--pool-cap", type=int, default=200_000)

    p = common(sub.add_parser("flow", help="F-gradient curves from boundary points"), samples=False)
    p.add_argument("--profile", choices=["kappa0", "kappa1"])
    p.add_argument("--T", type=float, required=True, help="target level")
    p.add_argument("--points", type=int, default=10, help="sampled start points")
    p.add_argument("--start", action="append", help="explicit start point 'x,y,...' (repeatable)")
    p.add_argument("--step", type=float)

    p = common(sub.add_parser("base-angle", help="base-angle estimates on the boundary or a level set"),
               samples=False)
    p.add_argument("--target", choices=["boundary", "level"], default="boundary")
    p.add_argument("--t", type=float, help="level for --target level")
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--radii", default=",".join(str(r) for r in DEFAULT_RADII))
    p.add_argument("--directions", type=int, default=16)

    p = common(sub.add_parser("compare", help="validate comparison claims on a space"))
    p.add_argument("--claims", default="all", help="'all' or comma-separated claim names")
    p.add_argument("--param", action="append", type=_param, default=[],
                   help="claim parameter key=value (r, T, t_grid, pairs, points, base_angle_points)")

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario", help="scenario path or bundled name")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="output directory (default: results/<scenario name>)")
    return parser


def _params_from_args(args):
    if args.command == "volume":
        params = {"region": args.region, "method": args.method, "samples": args.samples}
        if args.r is not None:
            params["r"] = args.r
    elif args.command == "profile":
        params = {"levels": args.levels, "method": args.method, "samples": args.samples}
        if args.t:
            params["t"] = args.t
    elif args.command == "pack":
        params = {"eps": args.eps, "pool_cap": args.pool_cap}
    elif args.command == "flow":
        params = {"T": args.T, "points": args.points}
        if args.profile:
            params["profile"] = args.profile
        if args.step is not None:
            params["step"] = args.step
        if args.start:
            params["starts"] = [_float_list(s, "start") for s in args.start]
    elif args.command == "base-angle":
        params = {"target": args.target, "points": args.points, "radii": args.radii,
                  "directions": args.directions}
        if args.t is not None:
            params["t"] = args.t
    else:
        params = {"claims": args.claims, "samples": args.samples, **dict(args.param)}
        unknown = set(dict(args.param)) - _COMPARE_KEYS
        if unknown:
            raise ConfigError(f"unknown claim parameters {sorted(unknown)}")
    return params


def _run_single(args):
    space = load_space(_resolve(args.space, Path.cwd(), "spaces"))
    fn = STEPS[args.command][0]
    result = fn(space, _params_from_args(args), args.seed)
    columns = list(result.rows[0]) if result.rows else []
    target = None
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        target = out / f"{args.command}.tsv"
        for kind in sorted(result.series):
            emit_plot_data(result.series, kind, out / f"{args.command}.{kind}.tsv")
    header = f"{RESULTS_VERSION} command={args.command} space={space.describe()} seed={args.seed}"
    _write_tsv(target, header, columns, result.rows)
    if not result.reports:
        return 0
    rows = [_report_result(r) for r in result.reports]
    _, _, table = _summary_table(rows)
    print(table, file=sys.stderr if target is None else sys.stdout)
    return 1 if _failed(rows) else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            status, _ = run_scenario(args.scenario, args.out, args.seed)
            return status
        return _run_single(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CollarBoundError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
