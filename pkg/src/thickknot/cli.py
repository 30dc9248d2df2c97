"""Command-line interface: ``thickknot <command> ...``.

Exit status is 0 on success, 1 when ``verify`` finds a failing check and 2
for usage errors, unreadable input and parameters outside an operation's
domain. Every JSON/CSV artifact embeds the configuration that produced it.
The worker-thread count and output paths are left out of that record
because they cannot change the result.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds as B
from .energy import RULES, QuadratureConfig, mobius_energy
from .exceptions import KnotError
from .geometry import make_circle, make_torus_knot, perturb
from .io import dumps_csv, dumps_report, read_knot, write_knot
from .parallel import set_num_threads
from .relax import RelaxTrace, relax
from .thickness import thickness
from .verify import verify_knot

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_NOT_RECORDED = {"threads", "output", "trace", "func", "json"}


class UsageError(Exception):
    pass


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_RECORDED}


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _quadrature(args) -> QuadratureConfig:
    return QuadratureConfig(subdivisions_per_edge=args.subdivisions, rule=args.rule)


def _check_paths(args, *names):
    paths = [Path(p).resolve() for p in (getattr(args, n, None) for n in names) if p]
    if len(set(paths)) != len(paths):
        raise UsageError("input and output paths must be distinct")


def cmd_gen(args) -> int:
    if args.circle is not None:
        knot = make_circle(args.circle, args.n)
    else:
        p, q = args.torus
        knot = make_torus_knot(p, q, args.major, args.minor, args.n)
    if args.perturb:
        knot = perturb(knot, args.perturb, args.seed)
    if args.output:
        write_knot(knot, args.output, _config(args))
    else:
        from .io import knot_to_json
        sys.stdout.write(knot_to_json(knot, _config(args)))
    return EXIT_OK


def cmd_energy(args) -> int:
    _check_paths(args, "knot", "output")
    knot = read_knot(args.knot)
    e = mobius_energy(knot, _quadrature(args), args.threshold)
    _emit(dumps_report({"command": "energy", "config": _config(args), "knot_name": knot.name,
                        "energy": e.to_dict()}), args.output)
    return EXIT_OK


def cmd_thickness(args) -> int:
    _check_paths(args, "knot", "output")
    knot = read_knot(args.knot)
    rep = thickness(knot)
    _emit(dumps_report({"command": "thickness", "config": _config(args), "knot_name": knot.name,
                        "total_length": knot.total_length, "thickness": rep.to_dict()}),
          args.output)
    return EXIT_OK


def cmd_bounds(args) -> int:
    rep = B.bound_report(args.length)
    _emit(dumps_report({"command": "bounds", "config": _config(args), "bounds": rep.to_dict()}),
          args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_paths(args, "knot", "output")
    knot = read_knot(args.knot)
    rep = verify_knot(knot, _quadrature(args), args.basepoints, args.samples,
                      args.shell_samples, args.radii)
    payload = dumps_report({"command": "verify", "config": _config(args), "report": rep.to_dict()})
    if args.output:
        Path(args.output).write_text(payload)
    if args.json:
        sys.stdout.write(payload)
    else:
        print(rep.table())
    return EXIT_OK if rep.overall else EXIT_FAIL


def cmd_sweep(args) -> int:
    res = B.sweep_ratio(args.lmin, args.lmax, args.steps)
    text = dumps_csv(list(res.COLUMNS), res.rows(), _config(args))
    text = text.replace("\n", f"\n# max: L={res.argmax_length!r}, ratio={res.max_ratio!r}\n", 1)
    _emit(text, args.output)
    if args.output:
        print(f"max ratio {res.max_ratio:.6f} at L = {res.argmax_length:.3f}")
    return EXIT_OK


def _trace_csv(trace: RelaxTrace, config: dict) -> str:
    return dumps_csv(list(trace.CSV_COLUMNS), trace.rows(), config)


def cmd_relax(args) -> int:
    _check_paths(args, "knot", "output", "trace")
    knot = read_knot(args.knot)
    trace = relax(knot, args.max_steps, _quadrature(args), not args.plain)
    config = _config(args)
    if args.output:
        write_knot(trace.final, args.output, config)
    if args.trace:
        Path(args.trace).write_text(_trace_csv(trace, config))
    summary = {"command": "relax", "config": config, "initial_energy": trace.steps[0].energy,
               "final_energy": trace.steps[-1].energy, "steps": len(trace.steps) - 1,
               "converged": trace.converged, "reason": trace.reason,
               "length_ratio": trace.length_ratio}
    sys.stdout.write(dumps_report(summary))
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _quad_args(p):
    p.add_argument("--subdivisions", type=_positive_int, default=1,
                   help="quadrature nodes per edge (default 1)")
    p.add_argument("--rule", choices=RULES, default="midpoint", help="quadrature rule")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thickknot",
                                     description="Moebius energy, thickness and ropelength bounds of polygonal knots.")
    parser.add_argument("--threads", type=_positive_int, default=1, help="worker thread cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a knot file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--circle", type=float, metavar="RADIUS")
    g.add_argument("--torus", type=int, nargs=2, metavar=("P", "Q"))
    p.add_argument("--major", type=float, default=2.0)
    p.add_argument("--minor", type=float, default=1.0)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--perturb", type=float, default=0.0, metavar="AMPLITUDE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("energy", help="Moebius energy breakdown")
    p.add_argument("knot")
    _quad_args(p)
    p.add_argument("--threshold", type=float, default=None,
                   help="proximal arc cutoff (default pi * thickness radius)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("thickness", help="thickness radius and ropelength")
    p.add_argument("knot")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_thickness)

    p = sub.add_parser("bounds", help="energy bounds at a given ropelength")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="audit every inequality on a knot")
    p.add_argument("knot")
    _quad_args(p)
    p.add_argument("--basepoints", type=_positive_int, default=16)
    p.add_argument("--samples", type=_positive_int, default=4096)
    p.add_argument("--shell-samples", type=_positive_int, default=8192)
    p.add_argument("--radii", type=_positive_int, default=64)
    p.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tabulate detailed_bound(L) / L^(4/3)")
    p.add_argument("--lmin", type=float, default=42.0)
    p.add_argument("--lmax", type=float, default=1e5)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("relax", help="descend the discrete energy")
    p.add_argument("knot")
    _quad_args(p)
    p.add_argument("--max-steps", type=int, default=500)
    p.add_argument("--plain", action="store_true", help="plain gradient descent")
    p.add_argument("-o", "--output", help="final knot")
    p.add_argument("--trace", help="CSV trace")
    p.set_defaults(func=cmd_relax)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_num_threads(args.threads)
    try:
        return args.func(args)
    except (KnotError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"thickknot {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_num_threads(1)


if __name__ == "__main__":
    sys.exit(main())
