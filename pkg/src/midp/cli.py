"""Command-line front end.

Subcommands: ``audit``, ``curve``, ``verify``, ``gen``, ``compose``. Results go
to standard output, diagnostics to standard error.

Exit codes: 0 success, 1 invariant violation, 2 unreadable or malformed
mechanism file, 3 database space over the cap, 4 bad parameters.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import audit, capacity, mechanism, verify
from .mechanism import CapExceededError, MechFormatError

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_CAP, EXIT_PARAMS = 0, 1, 2, 3, 4


class ParamError(ValueError):
    pass


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".12g")


def _ints(values) -> str:
    return ",".join(str(int(v)) for v in values) if len(values) else "-"


def format_report(m: mechanism.Mechanism, r: audit.PrivacyReport) -> str:
    lines = [f"epsilon_exact={fmt(r.epsilon_exact)}"]
    w = r.epsilon_witness
    if w is not None and w.pair is not None:
        a, b = m.schema.decode(w.pair.a), m.schema.decode(w.pair.b)
        lines.append(f"epsilon_witness=a:{_ints(a)} b:{_ints(b)} entry:{w.pair.entry} output:{w.output}")
    else:
        lines.append("epsilon_witness=none")
    lines += [
        f"delta_exact={fmt(r.delta_exact)}",
        f"kl_dp={fmt(r.kl_dp)}",
        f"mi_dp={fmt(r.mi_dp)}",
        f"mi_dp_witness=entry:{r.mi_witness_entry} x_rest:{_ints(r.mi_witness_rest or ())} "
        f"input:{','.join(fmt(v) for v in r.mi_witness_input or ())}",
        f"per_entry_mi={','.join(fmt(v) for v in r.per_entry_mi)}",
        f"free_lunch_mi={fmt(r.free_lunch_mi)}",
        f"solver_gap={fmt(r.solver_gap)}",
        f"solver_converged={'true' if r.solver_converged else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of :func:`format_report` for the numeric fields."""
    out = {}
    for line in text.splitlines():
        if "=" not in line:
            continue
        key, value = line.split("=", 1)
        if key in ("epsilon_exact", "delta_exact", "kl_dp", "mi_dp", "free_lunch_mi", "solver_gap"):
            out[key] = float(value)
        elif key == "per_entry_mi":
            out[key] = tuple(float(v) for v in value.split(","))
        elif key == "solver_converged":
            out[key] = value == "true"
        else:
            out[key] = value
    return out


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ParamError(f"grid spec {spec!r} must be start:stop:num")
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ParamError("grid needs at least one point")
            grid = np.linspace(start, stop, num)
        else:
            grid = np.array([float(v) for v in spec.split(",")])
    except ValueError as exc:
        raise ParamError(f"malformed grid spec {spec!r}: {exc}") from None
    if grid.size == 0 or not np.all(np.isfinite(grid)) or np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise ParamError(f"grid {spec!r} must be finite, non-negative and ascending")
    return grid


def _load(path: str, cap: int) -> mechanism.Mechanism:
    try:
        return mechanism.load_mechanism(path, cap=cap)
    except OSError as exc:
        raise MechFormatError(f"cannot read {path}: {exc.strerror}") from None


def cmd_audit(args) -> int:
    m = _load(args.path, args.cap)
    r = audit.privacy_report(m, tol=args.tol)
    sys.stdout.write(format_report(m, r))
    return EXIT_OK


def cmd_curve(args) -> int:
    grid = parse_grid(args.eps_grid) if args.eps_grid is not None else None
    m = _load(args.path, args.cap)
    curve = audit.tradeoff_curve(m, grid)
    rows = ["epsilon,delta"] + [f"{fmt(e)},{fmt(d)}" for e, d in curve.points]
    sys.stdout.write("\n".join(rows) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = verify.SUITES.get(args.suite)
    if suite is None:
        raise ParamError(f"unknown suite {args.suite!r}; choose from {', '.join(verify.SUITES)}")
    if args.count < 1:
        raise ParamError("--count must be >= 1")
    reports = suite(seed=args.seed, count=args.count)
    bad = verify.violations(reports)
    for r in reports:
        sys.stdout.write(r.line() + "\n")
    sys.stdout.write(f"suite={args.suite} seed={args.seed} reports={len(reports)} violations={len(bad)}\n")
    return EXIT_VIOLATION if bad else EXIT_OK


GENERATORS = {
    "rr": (("n", "p"), lambda a: mechanism.make_randomized_response(int(a.n), a.p)),
    "erasure": (("n_inputs", "pass_p"), lambda a: mechanism.make_erasure(int(a.n_inputs), a.pass_p)),
    "group_example": (("alphabet", "eps"), lambda a: mechanism.make_group_example(a.eps, int(a.alphabet))),
    "noisy_count": (("n", "alpha"), lambda a: mechanism.make_noisy_count(int(a.n), a.alpha)),
}


def cmd_gen(args) -> int:
    if args.name not in GENERATORS:
        raise ParamError(f"unknown mechanism {args.name!r}; choose from {', '.join(GENERATORS)}")
    needed, build = GENERATORS[args.name]
    missing = [p for p in needed if getattr(args, p) is None]
    if missing:
        raise ParamError(f"{args.name} needs --{', --'.join(p.replace('_', '-') for p in missing)}")
    try:
        m = build(args)
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    mechanism.save_mechanism(m, args.out)
    sys.stdout.write(
        f"wrote {args.out}: schema={' '.join(map(str, m.schema.entry_sizes))} "
        f"outputs={m.output_size} rows={m.schema.size}\n"
    )
    return EXIT_OK


def cmd_compose(args) -> int:
    if len(args.paths) < 2:
        raise ParamError("compose needs at least two mechanism files")
    mechs = [_load(p, args.cap) for p in args.paths]
    out = mechs[0]
    try:
        for nxt in mechs[1:]:
            if args.mode == "parallel":
                out = mechanism.compose_parallel(out, nxt)
            elif args.mode == "disjoint":
                sizes = out.schema.entry_sizes + nxt.schema.entry_sizes
                schema = mechanism.DatabaseSchema(sizes, cap=args.cap)
                out = mechanism.compose_disjoint(
                    out, range(out.n), nxt, range(out.n, len(sizes)), schema
                )
            else:
                raise ParamError(f"unknown mode {args.mode!r}; choose parallel or disjoint")
    except (mechanism.SchemaMismatchError, mechanism.OverlapError) as exc:
        raise ParamError(str(exc)) from None
    mechanism.save_mechanism(out, args.out)
    mi = capacity.mi_dp(out)
    sys.stdout.write(
        f"wrote {args.out}: schema={' '.join(map(str, out.schema.entry_sizes))} outputs={out.output_size}\n"
        f"epsilon_exact={fmt(audit.epsilon_exact(out))}\n"
        f"mi_dp={fmt(mi.value)}\n"
        f"per_entry_mi={','.join(fmt(v) for v in mi.per_entry)}\n"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="midp", description="Audit finite mechanisms for DP, KL-DP and MI-DP.")
    parser.add_argument("--cap", type=int, default=mechanism.DEFAULT_CAP, help="max database space size")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="print every privacy level of a mechanism file")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=capacity.DEFAULT_TOL, help="capacity solver gap (nats)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("curve", help="exact (epsilon, delta) trade-off as CSV")
    p.add_argument("path")
    p.add_argument("--eps-grid", help="start:stop:num or comma-separated list")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="run a seeded invariant suite")
    p.add_argument("--suite", required=True, help="sandwich, bounds, composition or group")
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a built-in mechanism as a MECH v1 file")
    p.add_argument("name", help="rr, erasure, group_example or noisy_count")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, help="flip probability for rr")
    p.add_argument("--n-inputs", dest="n_inputs", type=int)
    p.add_argument("--pass", dest="pass_p", type=float, help="pass probability for erasure")
    p.add_argument("--alphabet", type=int)
    p.add_argument("--eps", type=float, help="eps_p for group_example")
    p.add_argument("--alpha", type=float, help="noise ratio for noisy_count")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compose", help="compose mechanism files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--mode", default="parallel")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_compose)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MechFormatError as exc:
        print(f"midp: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"midp: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ParamError as exc:
        print(f"midp: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
