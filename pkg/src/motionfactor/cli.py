"""Command-line front end.

Exit codes: 0 on success, 1 on a computation or file error, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import DualQuaternion
from .bennett import build_replacement_linkage, replacement_with_retries, synthesize_bennett
from .errors import MotionFactorError, ParseError
from .factor import all_factorizations, factor_with_order, verify_factorization
from .linkage import (
    STANDARD_SWEEP,
    factorization_to_dict,
    import_linkage,
    linkage_residuals,
    linkage_to_dict,
    load_motion,
    trajectory,
    trajectory_csv,
)
from .mpoly import MotionPolynomial, coefficient_distance
from .special import (
    TranslationMotionSpec,
    brace_with_retries,
    circular_translation_factors,
    elliptic_translation,
    multiplication_trick_planar,
    multiplication_trick_spatial,
)


class UsageError(Exception):
    pass


def _json_default(obj):
    if isinstance(obj, DualQuaternion):
        return [float(x) for x in obj.coords]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "factors") and hasattr(obj, "norms"):
        return factorization_to_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default)


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"not a number list: {text!r}") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc


# -- subcommands ------------------------------------------------------------------------

def cmd_factor(args) -> tuple[str, int]:
    C = load_motion(args.motion)
    if args.all:
        fs = all_factorizations(C)
        out = {
            "quadratics": [[q.a, q.b] for q in fs.quadratics],
            "coincident": fs.coincident,
            "factorizations": [factorization_to_dict(F, verify_factorization(C, F)) for F in fs],
            "failures": [{"order": list(o), "error": type(e).__name__, "message": str(e)} for o, e in fs.failures],
        }
    else:
        order = None if args.order is None else [int(x) for x in args.order.split(",")]
        F = factor_with_order(C, order)
        out = {"factorizations": [factorization_to_dict(F, verify_factorization(C, F))]}
    return _dump(out), 0


def cmd_bennett(args) -> tuple[str, int]:
    data = _read_json(args.poses)
    if not isinstance(data, dict) or not isinstance(data.get("poses"), list) or len(data["poses"]) != 3:
        raise ParseError("expected {'poses': [[8 numbers] x 3]}", args.poses)
    poses = []
    for i, p in enumerate(data["poses"]):
        if not isinstance(p, list) or len(p) != 8:
            raise ParseError("pose must have 8 numbers", f"{args.poses}: poses[{i}]")
        poses.append(DualQuaternion([float(x) for x in p]))
    d = synthesize_bennett(*poses)
    out = {
        "diagnosis": d.kind.value,
        "lambda": d.lam,
        "mu": d.mu,
        "motion": None if d.motion is None else d.motion.array.tolist(),
        "linkage": None if d.linkage is None else linkage_to_dict(d.linkage),
        "payload": d.payload,
    }
    return _dump(out), 0


def cmd_flip(args) -> tuple[str, int]:
    C = load_motion(args.motion)
    if C.degree != 2:
        raise UsageError("flip needs a quadratic motion polynomial")
    F = factor_with_order(C)
    h1, h2 = F.factors
    if args.p[0] == "random":
        if len(args.p) > 1:
            raise UsageError("use --seed for the random choice of p")
        L = replacement_with_retries(h1, h2, seed=args.seed)
    else:
        p = DualQuaternion(_floats(" ".join(args.p), 8))
        L = build_replacement_linkage(h1, h2, p)
    return _dump(linkage_to_dict(L)), 0


def cmd_circular(args) -> tuple[str, int]:
    h1, h2 = circular_translation_factors(args.a, args.lam, args.mu)
    C = elliptic_translation(TranslationMotionSpec(args.a, args.a))
    res = coefficient_distance(MotionPolynomial.from_factors([h1, h2]), C)
    return _dump({"factors": [h1, h2], "residual": res}), 0


def cmd_elliptic(args) -> tuple[str, int]:
    spec = TranslationMotionSpec(args.a, args.b)
    F = multiplication_trick_spatial(spec) if args.spatial else multiplication_trick_planar(spec)
    Q = MotionPolynomial(np.array([[1.0] + [0.0] * 7, [0.0] * 8, [1.0] + [0.0] * 7]))
    res = coefficient_distance(F.product(), Q * elliptic_translation(spec))
    out = {"a": spec.a, "b": spec.b, "spatial": args.spatial, **factorization_to_dict(F, res)}
    if args.brace:
        L = brace_with_retries(F, seed=args.seed)
        out["linkage"] = linkage_to_dict(L)
    return _dump(out), 0


def cmd_verify(args) -> tuple[str, int]:
    L = import_linkage(args.linkage)
    ts = STANDARD_SWEEP if args.sweep == "default" else _sweep(args.sweep)
    res = linkage_residuals(L, ts)
    tol = algebra.get_tol()
    ok = all(r < tol for r in res)
    out = {"type": L.type, "loops": res, "max_residual": max(res, default=0.0), "tol": tol, "pass": ok}
    return _dump(out), 0 if ok else 1


def _sweep(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(math.inf if tok in ("inf", "oo") else float(tok))
    return out


def cmd_traj(args) -> tuple[str, int]:
    C = load_motion(args.motion)
    x = _floats(args.point, 3)
    try:
        lo, hi, n = args.range.split(":")
        ts = list(np.linspace(float(lo), float(hi), int(n)))
    except ValueError as exc:
        raise UsageError(f"--range must be TMIN:TMAX:N, got {args.range!r}") from exc
    if args.inf:
        ts.append(math.inf)
    pts = trajectory(C, x, ts)
    return trajectory_csv(ts, pts), 0


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motionfactor", description="Motion polynomial factorization and linkage synthesis.")
    parser.add_argument("--tol", type=float, default=1e-9, help="global numerical tolerance (default 1e-9)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numerical tolerance")
    common.add_argument("-o", "--out", help="write output to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", parents=[common], help="factor a motion polynomial")
    p.add_argument("motion")
    p.add_argument("--order", help="comma-separated permutation of the sorted norm quadratics")
    p.add_argument("--all", action="store_true", help="all orders")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("bennett", parents=[common], help="Bennett synthesis from three poses")
    p.add_argument("--poses", required=True)
    p.set_defaults(func=cmd_bennett)

    p = sub.add_parser("flip", parents=[common], help="6R/5R replacement linkage via Bennett flips")
    p.add_argument("--motion", required=True)
    p.add_argument("--p", nargs="+", required=True, metavar="P", help="8 numbers, or 'random'")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("circular", parents=[common], help="factor a circular translation")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.set_defaults(func=cmd_circular)

    p = sub.add_parser("elliptic", parents=[common], help="four-factor form of an elliptic translation")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--spatial", action="store_true")
    p.add_argument("--brace", action="store_true", help="also build the braced linkage")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_elliptic)

    p = sub.add_parser("verify", parents=[common], help="loop closure residuals of a linkage file")
    p.add_argument("linkage")
    p.add_argument("--sweep", default="default", help="'default' or comma-separated parameters (inf allowed)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("traj", parents=[common], help="trajectory of a point as CSV")
    p.add_argument("--motion", required=True)
    p.add_argument("--point", required=True, help="X,Y,Z")
    p.add_argument("--range", required=True, help="TMIN:TMAX:N")
    p.add_argument("--inf", action="store_true", help="append the t = inf sample")
    p.set_defaults(func=cmd_traj)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        with algebra.tolerance(args.tol):
            text, code = args.func(args)
    except (UsageError, ValueError) as exc:
        parser.error(str(exc))
    except (MotionFactorError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
