"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 audit identity residuals
above tolerance.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import audit, erasure, invariants, output, rng, states
from .exceptions import QutritGeomError
from .invariants import REGION_TOL

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IDENTITY = 3

BOUNDARY_HEADER = ("a", "c_i", "g")
SWEEP_HEADER = ("tau", "p_e", "p1_cond", "p2_cond", "p3_cond", "pred_cond", "vis_cond", "g_t", "comp_lhs")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        output.atomic_write(out, text)


def _table(header, rows, fmt: str, key: str) -> str:
    rows = list(rows)
    if fmt == "csv":
        return output.csv_text(header, rows)
    return output.json_text({key: [dict(zip(header, r)) for r in rows]})


def _rank(value: str):
    if value == "any":
        return "any"
    if value in ("2", "3"):
        return int(value)
    raise argparse.ArgumentTypeError(f"rank must be 2, 3 or any, got {value!r}")


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return n


def _seed(value: str) -> int:
    try:
        return rng.check_seed(int(value))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _triple(kind):
    def parse(value: str):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {value!r}")
        try:
            return [kind(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(f"could not parse {value!r}") from None
    return parse


def cmd_analyze(args) -> int:
    state = states.load_state(args.state_file)
    rho = state.reduced_density()
    spec = state.spectrum()
    inv = invariants.invariants_from_spectrum(spec)
    region = invariants.region_membership(inv.c_i, inv.g, args.tol)
    fields = {
        "normalization_factor": state.norm_factor,
        "l1": spec.l1, "l2": spec.l2, "l3": spec.l3,
        "s2": inv.s2, "s3": inv.s3,
        "c_i": inv.c_i,
        "c_i_purity": float(invariants.concurrence_from_purity(rho)),
        "g": inv.g,
        "discriminant": inv.discriminant,
        "membership": str(region),
    }
    if args.format == "json":
        sys.stdout.write(output.json_text(fields))
    elif args.format == "csv":
        sys.stdout.write(output.csv_text(list(fields), [list(fields.values())]))
    else:
        width = max(map(len, fields))
        for k, v in fields.items():
            sys.stdout.write(f"{k:<{width}}  {output.fmt(v)}\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    spec = states.SampleSpec(count=args.n, seed=args.seed, rank=args.rank)
    sc = audit.run_scatter(spec, tol=args.tol)
    _emit(_table(audit.SCATTER_HEADER, sc.rows(), args.format, "records"), args.out)
    return EXIT_OK


def cmd_boundary(args) -> int:
    pts = invariants.boundary_curve(args.points)
    _emit(_table(BOUNDARY_HEADER, pts, args.format, "points"), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    ms = erasure.MarkedState.create(
        np.asarray(args.c, dtype=complex), np.asarray(args.t, dtype=float), normalize=True
    )
    rows = []
    for tau, rep in erasure.erasure_sweep(ms, args.family, args.steps):
        p = rep.p_cond if rep.conditional else (None, None, None)
        rows.append((tau, rep.p_e, *p, rep.pred_cond, rep.vis_cond, rep.g_t, rep.comp_lhs))
    _emit(_table(SWEEP_HEADER, rows, args.format, "rows"), args.out)
    return EXIT_OK


def cmd_audit(args) -> int:
    spec = states.SampleSpec(count=args.n, seed=args.seed, rank=args.rank)
    sc = audit.run_scatter(spec, tol=args.tol)
    grid = audit.ErasureGrid(steps=args.steps, draws=args.draws, seed=args.seed)
    report = audit.run_audit(sc, grid, tol=args.tol, identity_tol=args.identity_tol)
    text = output.json_text(report.to_json_dict())
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
        print(report.summary_line(), file=sys.stderr)
    else:
        output.atomic_write(args.out, text)
        print(report.summary_line())
    return EXIT_OK if report.identities_ok else EXIT_IDENTITY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-geom",
        description="Two-qutrit entanglement invariants and three-path erasure datasets.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--tol", type=float, default=REGION_TOL,
                       help="tolerance for boundary and inequality checks (default %(default)g)")

    p = sub.add_parser("analyze", help="invariants and region of a state file", allow_abbrev=False)
    p.add_argument("state_file")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--tol", type=float, default=REGION_TOL)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="scatter dataset of random states", allow_abbrev=False)
    p.add_argument("--n", type=_positive, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rank", type=_rank, default="any")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("boundary", help="degenerate-spectrum boundary curve", allow_abbrev=False)
    p.add_argument("--points", type=_positive, default=512)
    common(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("sweep", aliases=["erasure-sweep"], help="erasure parameter sweep", allow_abbrev=False)
    p.add_argument("--steps", type=_positive, default=101)
    p.add_argument("--family", choices=[f.value for f in erasure.SweepFamily], default="pivot")
    p.add_argument("--c", type=_triple(complex), default=[1.0, 1.0, 1.0],
                   help="path amplitudes, e.g. 1,1j,0.5 (normalized automatically)")
    p.add_argument("--t", type=_triple(float), default=[1.0, 1.0, 1.0], help="path transmittances in [0, 1]")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="Monte Carlo audit report (JSON)", allow_abbrev=False)
    p.add_argument("--n", type=_positive, default=100000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rank", type=_rank, default="any")
    p.add_argument("--steps", type=_positive, default=11, help="tau grid points for the erasure audit")
    p.add_argument("--draws", type=int, default=50, help="random (c, t) draws for the erasure audit")
    p.add_argument("--identity-tol", type=float, default=audit.IDENTITY_TOL,
                   help="largest accepted identity residual (default %(default)g); exceeding it exits with 3")
    common(p, formats=("json",), default="json")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", 2) < 2:
        parser.error("--points must be at least 2")
    if getattr(args, "steps", 2) < 2:
        parser.error("--steps must be at least 2")
    if getattr(args, "draws", 0) < 0:
        parser.error("--draws must be non-negative")
    if not args.tol >= 0:
        parser.error("--tol must be non-negative")
    if not getattr(args, "identity_tol", 0.0) >= 0:
        parser.error("--identity-tol must be non-negative")
    try:
        return args.func(args)
    except (QutritGeomError, ValueError, OSError) as exc:
        print(f"qutrit-geom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
