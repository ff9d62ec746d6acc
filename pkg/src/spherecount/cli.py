"""Command-line interface: count, refine, kappa, and sweep subcommands.

All structured input and output is JSON.  Result documents are serialized
canonically (sorted keys, fixed indentation, trailing newline) so that
identical runs produce byte-identical files and parse/re-serialize
round-trips exactly.

Exit codes: 0 success/converged, 1 input or schema error, 2 iteration cap
reached (the refinement loop did not halt within the budget).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import alpha, engine, polysys, sphere
from .rounding import required_precision


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_system(path: str) -> polysys.PolynomialSystem:
    with open(path) as fh:
        document = json.load(fh)
    return polysys.parse_system(document)


def _emit(text: str, output_path: str | None):
    if output_path:
        with open(output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_count(args) -> int:
    f = _load_system(args.input)
    result = engine.count_roots(
        f,
        mode=args.mode,
        bits=args.bits,
        max_iterations=args.max_iter,
        workers=args.workers,
        grid_cap=args.grid_cap,
    )
    if args.trace:
        for rep in result.iterations:
            print(
                f"level k={rep.k} eta={rep.eta:.6g} grid={rep.grid_size} "
                f"vertices={rep.vertex_count} components={rep.component_count} "
                f"halt=({rep.condition_i_pass},{rep.condition_ii_pass})",
                file=sys.stderr,
            )
    _emit(canonical_json(result.to_dict()), args.output)
    return 0 if result.status == "converged" else 2


def cmd_refine(args) -> int:
    f = _load_system(args.input)
    try:
        start = np.array([float(v) for v in args.start.split(",")])
    except ValueError as exc:
        raise polysys.SystemFormatError(f"bad start point: {exc}") from exc
    if start.shape != (f.n_vars,):
        raise polysys.SystemFormatError(
            f"start point has {len(start)} coordinates, expected {f.n_vars}"
        )
    if abs(np.linalg.norm(start) - 1.0) > 1e-6:
        raise polysys.SystemFormatError("start point must lie on the unit sphere")
    start = start / np.linalg.norm(start)
    fn = f.normalized()
    consts = alpha.theory_constants()
    data = alpha.point_data(fn, start)
    if not data.alpha_bar < consts.alpha_star:
        print("warning: uncertified start (alpha_bar >= alpha_star)", file=sys.stderr)
    refined = alpha.newton_refine(fn, start, max_steps=args.max_steps, beta_tol=args.beta_tol)
    doc = {
        "final_point": [float(v) for v in refined.point],
        "beta_trace": [float(b) for b in refined.beta_trace],
        "steps": max(0, len(refined.beta_trace) - 1),
        "envelope": "satisfied" if refined.envelope_ok else "violated",
        "singular": bool(refined.singular),
    }
    sys.stdout.write(canonical_json(doc))
    return 0


def cmd_kappa(args) -> int:
    f = _load_system(args.input)
    spec = sphere.CubeGridSpec(n=f.n, k=args.level)
    value = engine.estimate_kappa(f, spec, workers=args.workers)
    doc = {
        "kappa_lower_bound": value,
        "level": args.level,
        "grid_size": spec.point_count(),
    }
    sys.stdout.write(canonical_json(doc))
    return 0


def cmd_sweep(args) -> int:
    f = _load_system(args.input)
    bits_list = [int(v) for v in args.bits.split(",") if v.strip()] if args.bits.strip() else []
    exact = engine.count_roots(f, mode="exact", max_iterations=args.max_iter, workers=args.workers)
    if exact.status != "converged":
        print("error: exact-mode run did not converge; sweep requires it", file=sys.stderr)
        return 2
    rows = []
    for t in bits_list:
        res = engine.count_roots(
            f, mode="rounded", bits=t, max_iterations=args.max_iter, workers=args.workers
        )
        count = res.count if res.status == "converged" else None
        rows.append(
            {
                "bits": t,
                "u": math.ldexp(1.0, -t),
                "count": count,
                "status": res.status,
                "agrees_with_exact": count == exact.count,
            }
        )
    kappa_hat = exact.kappa_lower_bound
    doc = {
        "exact_count": exact.count,
        "kappa_hat": kappa_hat,
        "required_precision": required_precision(f.n, f.D, f.S, kappa_hat, C=1.0),
        "rows": rows,
    }
    sys.stdout.write(canonical_json(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherecount",
        description="Count real zero rays of homogeneous polynomial systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="run the grid-refinement counting loop")
    p.add_argument("--input", required=True, help="system document (JSON)")
    p.add_argument("--mode", choices=["exact", "rounded"], default="exact")
    p.add_argument("--bits", type=int, default=None, help="significand bits (rounded mode)")
    p.add_argument("--max-iter", type=int, default=24)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--grid-cap", type=int, default=sphere.DEFAULT_GRID_CAP)
    p.add_argument("--output", default=None, help="write the result document here")
    p.add_argument("--trace", action="store_true", help="log one line per refinement level")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("refine", help="Newton-refine a start point on the sphere")
    p.add_argument("--input", required=True)
    p.add_argument("--start", required=True, help='comma-separated point, e.g. "1,0"')
    p.add_argument("--max-steps", type=int, default=30)
    p.add_argument("--beta-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("kappa", help="grid lower bound for the condition number")
    p.add_argument("--input", required=True)
    p.add_argument("--level", type=int, required=True, help="grid refinement level k")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("sweep", help="re-count at several emulated precisions")
    p.add_argument("--input", required=True)
    p.add_argument("--bits", required=True, help='comma-separated bit counts, e.g. "53,24,12,8"')
    p.add_argument("--max-iter", type=int, default=24)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, polysys.SystemFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
