"""Command-line entry point: every module behind one reproducible tool.

Subcommands: spectrum, verify, resolvent, metric-check, basis, simulate.
All outputs are files (JSON/CSV) under --out, accompanied by a run
manifest (command line, parameters, version, seed, outputs, wall time).
CSV floats carry 17 significant digits so reruns are byte-identical.
Exit codes: 0 ok, 1 contract failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

import jumpspec
from jumpspec.param import ParamA, convergents, NotIrrational
from jumpspec import basis_diag, eigensystem, metric, resolvent, simulator, spectrum
from jumpspec.funcspace import PiecewiseTrig, cos_term, sin_term, inner_closed, norm_l2

FMT = "%.17g"


def _fmt(v) -> str:
    if isinstance(v, complex):
        return f"{FMT % v.real}{'+' if v.imag >= 0 else '-'}{FMT % abs(v.imag)}j"
    return FMT % v


class Manifest:
    def __init__(self, out_dir: Path, args: argparse.Namespace):
        self.out_dir = out_dir
        self.started = time.time()
        self.record = {
            "command_line": sys.argv,
            "parameters": {k: repr(v) for k, v in sorted(vars(args).items())
                           if k != "func"},
            "tool_version": jumpspec.__version__,
            "seed": getattr(args, "seed", None),
            "outputs": [],
        }

    def write_json(self, name: str, payload) -> Path:
        path = self.out_dir / name
        path.write_text(json.dumps(payload, indent=2, default=str) + "\n")
        self.record["outputs"].append(name)
        return path

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        path = self.out_dir / name
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([c if isinstance(c, (str, int)) else _fmt(c)
                                 for c in row])
        self.record["outputs"].append(name)
        return path

    def finish(self) -> None:
        self.record["wall_time_s"] = round(time.time() - self.started, 3)
        (self.out_dir / "manifest.json").write_text(
            json.dumps(self.record, indent=2) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _threads(args) -> int:
    if getattr(args, "threads", 0):
        return args.threads
    env = os.environ.get("JUMPSPEC_THREADS")
    return int(env) if env else 1


def _parse_lambda(text: str) -> complex:
    re_s, _, im_s = text.partition(",")
    return complex(float(re_s), float(im_s) if im_s else 0.0)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    a = ParamA.from_expr(args.a)
    man = Manifest(_out_dir(args), args)
    records = spectrum.enumerate_spectrum(a, args.lambda_max)
    man.write_json("eigenvalues.json", [r.to_dict() for r in records])
    if args.curves:
        lo, hi, step = (float(t) for t in args.a_grid.split(":"))
        grid = np.arange(lo, hi + step / 2, step)
        rows = spectrum.curves(grid, args.m_max)
        man.write_csv("curves.csv", ["a", "class", "m", "lambda"], rows)
    man.finish()
    return 0


def cmd_resolvent(args) -> int:
    a = ParamA.from_expr(args.a)
    lam = _parse_lambda(args.lam)
    man = Manifest(_out_dir(args), args)
    if args.f == "const":
        f = lambda x: np.ones_like(np.asarray(x, dtype=float))
    else:
        freq = float(args.f.removeprefix("sin"))
        f = lambda x: np.sin(freq * np.asarray(x, dtype=float))
    u = resolvent.apply_resolvent(lam, f, a)
    man.write_csv("resolvent_u.csv", ["x", "re", "im"], u.csv_rows())
    report = resolvent.residual_report(lam, f, a)
    sv = resolvent.singular_value_probe(lam, a, n=args.svd_n)
    man.write_csv("singular_values.csv", ["j", "s"],
                  [(j + 1, s) for j, s in enumerate(sv["singular_values"])])
    man.write_json("resolvent_report.json", {
        "boundary_deviation": report["boundary_deviation"],
        "pde_residual": report["pde_residual"],
        "svd_decay_exponent": sv["decay_exponent"],
        "trace_norm_estimate": sv["partial_sum"],
    })
    man.finish()
    return 0


def cmd_metric_check(args) -> int:
    a = ParamA.from_expr(args.a)
    man = Manifest(_out_dir(args), args)
    op = metric.MetricOp.build(a)
    pairs = eigensystem.biorthogonalize(a, args.lambda_max)
    residuals = []
    for p in pairs:
        if p.psi.fn.breakpoint is None:
            residuals.append(
                op.quasi_self_adjointness_residual(p.psi.fn) / norm_l2(p.psi.fn))
    rng = np.random.default_rng(args.seed)
    positivity = [op.quadratic_form(basis_diag.random_smooth_probe(rng))
                  for _ in range(50)]
    payload = {
        "a": str(a),
        "irrational": not a.is_rational,
        "max_intertwining_residual": max(residuals),
        "positivity_min": min(positivity),
        "contracts_informational_only": a.is_rational,
    }
    if not a.is_rational:
        payload["rayleigh_sequence"] = metric.noninvertibility_probe(
            a, args.convergents)
    man.write_json("metric_report.json", payload)
    man.finish()
    if not a.is_rational and payload["max_intertwining_residual"] > 1e-8:
        return 1
    return 0


def cmd_basis(args) -> int:
    a = ParamA.from_expr(args.a)
    man = Manifest(_out_dir(args), args)
    records = spectrum.enumerate_spectrum(a, args.lambda_max)
    rows = []
    for rec in records:
        for pn in basis_diag.projection_norm(rec, a):
            rows.append((pn.which.value, rec.lam, pn.closed_form, pn.quadrature))
    man.write_csv("projection_norms.csv",
                  ["which", "lambda", "norm_closed", "norm_quad"], rows)
    if args.blowup:
        if a.is_rational:
            report = basis_diag.rational_bound_check(a, args.m_max)
            man.write_json("rational_bounds.json", report)
        else:
            table = basis_diag.blowup_probe(a, args.convergents)
            man.write_csv("blowup.csv", ["k", "q", "m", "norm"],
                          [(r.k, r.q, r.m, r.norm) for r in table])
    man.finish()
    return 0


def cmd_simulate(args) -> int:
    a = ParamA.from_expr(args.a)
    man = Manifest(_out_dir(args), args)
    cfg = simulator.SimConfig(a=a, dt=args.dt, horizon=args.horizon,
                              n_paths=args.paths, seed=args.seed,
                              threads=_threads(args))
    report = simulator.run(cfg)
    if args.gap:
        gap_cfg = simulator.SimConfig(
            a=a, dt=args.dt, horizon=1.5, n_paths=max(args.paths, 20000),
            seed=args.seed, threads=_threads(args), batch_size=6000)
        pairs = eigensystem.biorthogonalize(a, 4.5)
        gap_rec = next(p for p in pairs if abs(p.psi.record.lam - 4.0) < 1e-9)
        gap, err = simulator.estimate_gap(gap_cfg, gap_rec.psi.fn)
        report.gap_estimate, report.gap_stderr = gap, err
    man.write_json("sim_report.json", report.to_dict())
    centers = 0.5 * (report.bin_edges[:-1] + report.bin_edges[1:])
    man.write_csv("histogram.csv", ["x", "density"],
                  list(zip(centers, report.bin_density)))
    man.finish()
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

def _suite_gram(a: ParamA) -> dict:
    pairs = eigensystem.biorthogonalize(a, max(4.0 * 34 ** 2, 1500.0))[:30]
    g = eigensystem.gram_matrix(pairs)
    dev = float(np.max(np.abs(g - np.eye(len(pairs)))))
    return {"max_gram_deviation": dev, "passed": dev < 1e-9}


def _suite_resolvent(a: ParamA) -> dict:
    worst_b, worst_r = 0.0, 0.0
    rng = np.random.default_rng(5)
    for lam in (-1.0, -2.0, 2.5 + 1j):
        for _ in range(3):
            c = rng.normal(size=4)
            f = (lambda cc: lambda x: (cc[0] * np.cos(np.asarray(x))
                                       + cc[1] * np.sin(2 * np.asarray(x))
                                       + cc[2] * np.cos(3 * np.asarray(x))
                                       + cc[3]))(c)
            rep = resolvent.residual_report(lam, f, a, n=2048)
            worst_b = max(worst_b, rep["boundary_deviation"])
            worst_r = max(worst_r, rep["pde_residual"])
    sv = resolvent.singular_value_probe(-1.0, a, 512)
    return {"max_boundary_deviation": worst_b, "max_pde_residual": worst_r,
            "svd_decay_exponent": sv["decay_exponent"],
            "passed": worst_b < 1e-8 and worst_r < 1e-6
            and sv["decay_exponent"] <= -1.8}


def _suite_metric(a: ParamA) -> dict:
    op = metric.MetricOp.build(a)
    pairs = eigensystem.biorthogonalize(a, 200.0)
    res = [op.quasi_self_adjointness_residual(p.psi.fn) / norm_l2(p.psi.fn)
           for p in pairs if p.psi.fn.breakpoint is None]
    rng = np.random.default_rng(11)
    pos = [op.quadratic_form(basis_diag.random_smooth_probe(rng))
           for _ in range(50)]
    out = {"max_intertwining_residual": max(res), "positivity_min": min(pos),
           "informational_only": a.is_rational}
    out["passed"] = a.is_rational or (max(res) < 1e-8 and min(pos) > -1e-12)
    return out


def _suite_projections(a: ParamA) -> dict:
    worst = 0.0
    for rec in spectrum.enumerate_spectrum(a, 900.0):
        for pn in basis_diag.projection_norm(rec, a):
            worst = max(worst, abs(pn.closed_form - pn.quadrature) / pn.closed_form)
    return {"max_relative_deviation": worst, "passed": worst < 1e-8}


def cmd_verify(args) -> int:
    a = ParamA.from_expr(args.a)
    man = Manifest(_out_dir(args), args)
    suites = {"gram": _suite_gram, "resolvent": _suite_resolvent,
              "metric": _suite_metric, "projections": _suite_projections}
    chosen = list(suites) if args.suite == "all" else [args.suite]
    results = {name: suites[name](a) for name in chosen}
    ok = all(r["passed"] for r in results.values())
    man.write_json("verify.json", {"a": str(a), "suites": results, "passed": ok})
    man.finish()
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpspec",
        description="spectral toolkit for the boundary-jump Laplacian")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker cap (default: JUMPSPEC_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="enumerate eigenvalues / emit curves")
    p.add_argument("--a", required=True, help="jump parameter expression")
    p.add_argument("--lambda-max", dest="lambda_max", type=float, default=100.0)
    p.add_argument("--curves", action="store_true")
    p.add_argument("--a-grid", dest="a_grid", default="-0.95:0.95:0.01",
                   help="lo:hi:step for the curve family")
    p.add_argument("--m-max", dest="m_max", type=int, default=4)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run contract suites")
    p.add_argument("--a", required=True)
    p.add_argument("--suite", choices=["gram", "resolvent", "metric",
                                       "projections", "all"], default="all")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("resolvent", help="apply the resolvent and probe decay")
    p.add_argument("--a", required=True)
    p.add_argument("--lambda", dest="lam", required=True,
                   help="complex lambda as 're,im'")
    p.add_argument("--f", default="const", help="'const' or 'sinK'")
    p.add_argument("--svd-n", dest="svd_n", type=int, default=512)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("metric-check", help="metric operator diagnostics")
    p.add_argument("--a", required=True)
    p.add_argument("--lambda-max", dest="lambda_max", type=float, default=120.0)
    p.add_argument("--convergents", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_metric_check)

    p = sub.add_parser("basis", help="projection norms and blow-up tables")
    p.add_argument("--a", required=True)
    p.add_argument("--lambda-max", dest="lambda_max", type=float, default=900.0)
    p.add_argument("--blowup", action="store_true")
    p.add_argument("--convergents", type=int, default=8)
    p.add_argument("--m-max", dest="m_max", type=int, default=100)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("simulate", help="restarted Brownian motion Monte Carlo")
    p.add_argument("--a", required=True)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap", action="store_true", help="also fit the spectral gap")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, NotIrrational) as exc:
        print(f"jumpspec: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
