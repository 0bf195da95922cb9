"""Command-line entry point: ``pkv verify | geodesic | quotient | report``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import MODELS, SUITES, RunConfig, build_config, read_pairs
from .errors import PKVError
from .exact import parse_scalar


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key=value configuration file")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", help="matrix text, rows ';'-separated, entries ','-separated")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--k", type=int, help="negative directions of the flat factor")
    p.add_argument("--l", type=int, help="positive directions of the flat factor")
    p.add_argument("--base", choices=("real", "complex"), help="base of a product model")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pkv", description="Exact verification of the model metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    _common(v)
    v.add_argument("--suite", nargs="+", choices=SUITES + ("all",), help="suites to run (default: all)")
    v.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    v.add_argument("--quiet", action="store_true", help="suppress the text report")

    g = sub.add_parser("geodesic", help="export a geodesic as CSV")
    _common(g)
    g.add_argument("--p", required=True, help="initial velocity, comma-separated")
    g.add_argument("--q", help="initial point, comma-separated (default: origin)")
    g.add_argument("--t-end", type=float, default=10.0)
    g.add_argument("--samples", type=int, default=101, help="number of equally spaced sample times")
    g.add_argument("--step", type=float, default=1e-3, help="RK4 step")
    g.add_argument("--method", choices=("closed", "rk4"), default="closed")
    g.add_argument("--csv", metavar="PATH", help="output file (default stdout)")

    q = sub.add_parser("quotient", help="canonical representative and quotient chart of a point")
    _common(q)
    q.add_argument("--point", required=True, help="coordinates, comma-separated")
    q.add_argument("--json", metavar="PATH", help="write the result as JSON ('-' for stdout)")

    r = sub.add_parser("report", help="render a saved JSON report")
    r.add_argument("input", help="JSON report file")
    r.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    lines: dict = {}
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise PKVError(f"cannot read config: {exc}") from None
        values, lines = read_pairs(text)
    for key in ("model", "n", "sigma", "seed", "tol", "k", "l", "base", "a", "b"):
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
            lines.pop(key, None)
            if key == "sigma":
                values.pop("sigma_file", None)
                if getattr(args, "n", None) is None:
                    values.pop("n", None)
            if key == "n" and getattr(args, "sigma", None) is None and "sigma_file" not in values:
                values.pop("sigma", None)
    suite = getattr(args, "suite", None)
    if suite:
        values["suites"] = "all" if "all" in suite else ",".join(suite)
        lines.pop("suites", None)
    if getattr(args, "json", None):
        values["json"] = args.json
    return build_config(values, lines)


def _vector(text: str) -> list:
    return [parse_scalar(s) for s in text.split(",")]


def _model_for(cfg: RunConfig):
    from .suites import Context
    return Context(cfg)


def cmd_verify(args) -> int:
    from .report import emit_report, to_json
    from .suites import EXACT_LIMIT, run_suites

    cfg = load_config(args)
    if cfg.n > EXACT_LIMIT:
        print(f"warning: n={cfg.n} exceeds {EXACT_LIMIT}; only numeric suites will run", file=sys.stderr)
    reports = run_suites(cfg)
    code = 1 if any(r.status == "fail" for r in reports) else 0
    if not args.quiet and cfg.json_path != "-":
        emit_report(reports, "text", cfg.text_path)
    if cfg.json_path:
        body = to_json(reports, cfg.to_dict())
        if cfg.json_path == "-":
            sys.stdout.write(body)
        else:
            try:
                Path(cfg.json_path).write_text(body, encoding="utf-8")
            except OSError as exc:
                raise PKVError(f"cannot write report to {cfg.json_path}: {exc}") from None
    return code


def cmd_geodesic(args) -> int:
    from .geodesics import GeodesicIntegrator, solve_geodesic, write_csv

    cfg = load_config(args)
    ctx = _model_for(cfg)
    m = ctx.real
    p = _vector(args.p)
    q = _vector(args.q) if args.q else [0] * m.dim
    if len(p) != m.dim or len(q) != m.dim:
        raise PKVError(f"initial data must have {m.dim} components for this model")
    times = np.linspace(0.0, args.t_end, args.samples)
    if args.method == "closed":
        exact = [x if not isinstance(x, (float, complex)) else Fraction(x).limit_denominator(10 ** 12) for x in p + q]
        gd = solve_geodesic(m, exact[:m.dim], exact[m.dim:], ctx.gamma_real)
        positions = np.array([gd.at(float(t)) for t in times])
    else:
        traj = GeodesicIntegrator(m, ctx.gamma_real).run([float(x) for x in p], [float(x) for x in q],
                                                         args.t_end, args.step, list(times))
        positions = traj.positions
    write_csv(args.csv if args.csv else sys.stdout, times, np.real(positions))
    return 0


def cmd_quotient(args) -> int:
    from .conformal import canonical_representative, domain_membership, quotient_chart
    from .suites import fundamental_domain

    cfg = load_config(args)
    d = fundamental_domain(_model_for(cfg))
    x = np.array([float(v) for v in _vector(args.point)])
    k, y = canonical_representative(d, x)
    tau, s = quotient_chart(d, x)
    out = {"k": k, "representative": y.tolist(), "membership": domain_membership(d, y),
           "angle": tau, "sphere_point": s.tolist()}
    if args.json:
        body = json.dumps(out, indent=2) + "\n"
        if args.json == "-":
            sys.stdout.write(body)
        else:
            Path(args.json).write_text(body, encoding="utf-8")
    else:
        print(f"k = {k}")
        print("representative = " + ", ".join(f"{v:.12g}" for v in y))
        print(f"membership = {out['membership']}")
        print(f"angle = {tau:.12g}")
        print("sphere point = " + ", ".join(f"{v:.12g}" for v in s))
    return 0


def cmd_report(args) -> int:
    from .report import exit_code, parse_json, to_json, to_text

    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise PKVError(f"cannot read report: {exc}") from None
    config, reports = parse_json(text)
    sys.stdout.write(to_text(reports) if args.format == "text" else to_json(reports, config))
    return exit_code(reports)


COMMANDS = {"verify": cmd_verify, "geodesic": cmd_geodesic, "quotient": cmd_quotient, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (PKVError, ValueError) as exc:
        print(f"pkv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
