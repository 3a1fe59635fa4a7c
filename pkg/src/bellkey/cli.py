"""Command-line entry point: ``bellkey <verb> [options]``.

Machine verbs print one JSON object on stdout. Exit status is 0 on success,
1 on a domain error (the JSON then carries ``"error"``) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as bio
from .boxes import InputDistribution, check_no_signaling
from .errors import BellkeyError, NotNoSignaling, ShapeMismatch
from .keyrates import CURVE_NAMES, emit_curves
from .nonlocality import OptimizeOptions, optimize_extension, pr_box_exact, trivial_extension_bound
from .polytope import LhvModel, is_local
from .steering import ris_per_input


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(_jsonable(obj)) + "\n")


def _load_correlation(args):
    return bio.correlation_from_json(bio.load_json(args.input))


def cmd_validate(args) -> int:
    c = _load_correlation(args)
    rep = check_no_signaling(c, args.tol)
    _emit({"valid": True, "shape": list(c.shape), "no_signaling": rep.to_dict()})
    return 0


def cmd_classify(args) -> int:
    c = _load_correlation(args)
    res = is_local(c, tol=args.tol)
    if isinstance(res, LhvModel):
        _emit({"class": "local", "model": res.to_dict()})
    else:
        _emit({"class": "nonlocal", "certificate": res.to_dict()})
    return 0


def _input_dist(source: str, c) -> InputDistribution:
    if source == "uniform":
        return InputDistribution.uniform(c.n_x, c.n_y)
    d = bio.input_dist_from_json(bio.load_json(source))
    if d.shape != (c.n_x, c.n_y):
        raise ShapeMismatch(f"input distribution shape {d.shape} does not match inputs {(c.n_x, c.n_y)}")
    return d


def cmd_nlbound(args) -> int:
    c = _load_correlation(args)
    rep = check_no_signaling(c, args.tol)
    if not rep.is_no_signaling:
        raise NotNoSignaling(f"residuals alice={rep.max_alice_residual:.3g}, bob={rep.max_bob_residual:.3g}")
    d = _input_dist(args.input_dist, c)
    opts = OptimizeOptions(starts=args.starts, seed=args.seed)
    est = optimize_extension(c, d, n_lambda=args.n_lambda, options=opts)
    _emit({
        "value": est.value,
        "kind": est.kind,
        "residuals": list(est.details["residuals"]),
        "trivial_bound": trivial_extension_bound(c).value,
        "n_lambda": est.witness.n_lambda,
    })
    return 0


def cmd_steer(args) -> int:
    asm = bio.assemblage_from_json(bio.load_json(args.input))
    per = ris_per_input(asm)
    _emit({"ris_trivial_bound": float(per.max()), "per_input": per, "kind": "upper_bound"})
    return 0


def cmd_curves(args) -> int:
    selection = tuple(args.curves.split(",")) if args.curves else None
    _, csv = emit_curves(args.p_from, args.p_to, args.step, selection)
    if args.out:
        Path(args.out).write_text(csv)
        _emit({"out": args.out, "rows": csv.count("\n") - 1})
    else:
        sys.stdout.write(csv)
    return 0


def cmd_prbox(args) -> int:
    est = pr_box_exact()
    report = est.details["propagation"]
    _emit({"value": est.value, "kind": est.kind, "derivation": est.derivation,
           "n_classes": len(report.classes), "class_sizes": [len(k) for k in report.classes]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellkey", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def with_input(p):
        p.add_argument("--in", dest="input", required=True, help="JSON input file")
        return p

    p = with_input(sub.add_parser("validate", help="validate a correlation and report no-signaling residuals"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_validate)

    p = with_input(sub.add_parser("classify", help="local-polytope membership"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_classify)

    p = with_input(sub.add_parser("nlbound", help="upper bound on intrinsic non-locality"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--n-lambda", type=int, default=None)
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input-dist", default="uniform", help="'uniform' or a JSON file")
    p.set_defaults(func=cmd_nlbound)

    p = with_input(sub.add_parser("steer", help="trivial-extension steerability bound of an assemblage"))
    p.set_defaults(func=cmd_steer)

    p = sub.add_parser("curves", help="isotropic key-rate bound curves as CSV")
    p.add_argument("--from", dest="p_from", type=float, default=0.0)
    p.add_argument("--to", dest="p_to", type=float, default=0.5)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--out", default=None)
    p.add_argument("--curves", default=None, help="comma-separated subset of " + ",".join(CURVE_NAMES))
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("prbox", help="exact intrinsic non-locality of the PR box")
    p.set_defaults(func=cmd_prbox)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "n_lambda", None) is not None and args.n_lambda < 1:
        build_parser().error("--n-lambda must be at least 1")
    if getattr(args, "starts", 1) < 1:
        build_parser().error("--starts must be at least 1")
    try:
        return args.func(args)
    except BellkeyError as exc:
        _emit({"error": exc.code, "message": str(exc)})
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        _emit({"error": "IoError", "message": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
