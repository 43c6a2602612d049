"""``bgpc`` command-line front end.

Exit codes: 0 success (or identifiable, for ``check``), 1 not identifiable or
undecided (``check`` only), 2 error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import conditions
from .checkers import check_subspace, check_jointsparse_dft
from .errors import BGPCError
from .indexsets import IndexSet
from .instances import (
    MODELS,
    ProblemInstance,
    dumps,
    instance_to_dict,
    load_instance,
    random_jointsparse,
    random_jointsparse_2d,
    random_piecewise,
    random_sparse,
    random_subspace,
    save_instance,
)
from .experiments import census, emit_counterexamples, sweep, sweep_svg
from .matcore import Tolerance, nonzero_rows

EXIT_OK, EXIT_NO, EXIT_ERR = 0, 1, 2


def _tol(args) -> Tolerance:
    return Tolerance(rel=args.tol_rel, abs=args.tol_abs)


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    # write-then-rename so an interrupted run never leaves a partial file
    p = Path(path)
    tmp = p.with_name(p.name + ".part")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    tmp.replace(p)


def _support_of(inst: ProblemInstance, tol: Tolerance) -> IndexSet:
    if inst.support is not None:
        return inst.support
    return IndexSet.from_zero_based(nonzero_rows(inst.X0, tol), inst.n)


def _necessary(inst: ProblemInstance, k: int) -> dict | None:
    if not 1 <= k < inst.n:
        return None
    b = conditions.necessary_bound(inst.n, k)
    return {"bound": str(b), "N": inst.N, "satisfied": inst.N >= b}


def check_instance(inst: ProblemInstance, tol: Tolerance, model: str | None = None, s: int | None = None,
                   diagnose: bool = False, trials: int = 1000, seed: int = 0) -> tuple[dict, int]:
    """Run the checker and condition evaluators that apply to ``inst``'s model."""
    model = model or inst.model
    report: dict = {"model": model, "n": inst.n, "N": inst.N}
    lam0, X0 = inst.pair
    check = None
    if model == "subspace":
        check = check_subspace(inst.A, inst.Y, tol)
        cond = conditions.sufficient_subspace(lam0, X0, inst.A, tol)
        report["necessary"] = _necessary(inst, inst.A.shape[1])
    elif model == "jointsparse":
        J = _support_of(inst, tol)
        k = s if s is not None else len(J)
        check = check_jointsparse_dft(inst.Y, J, k, tol, diagnose=diagnose)
        cond = conditions.sufficient_jointsparse(lam0, X0, tol, s=k)
        report["necessary"] = _necessary(inst, k)
    elif model == "jointsparse2d":
        cond = conditions.sufficient_jointsparse_2d(lam0, X0, tol, s=s)
        report["necessary"] = None
    elif model == "piecewise":
        k = s if s is not None else len(_support_of(inst, tol))
        cond = conditions.sufficient_piecewise(lam0, X0, tol, s=k)
        report["necessary"] = _necessary(inst, k)
    elif model == "sparse":
        cond = conditions.universal_sparsity_report(lam0, X0, inst.A, tol, trials=trials, seed=seed, s=s)
        report["necessary"] = None
    else:
        raise BGPCError(f"unknown model {model!r}")

    report["conditions"] = cond.to_dict()
    if check is not None:
        report["checker"] = check.to_dict()
        verdict = "identifiable" if check.identifiable else "not_identifiable"
    elif cond.satisfied and model != "sparse":
        verdict = "identifiable"
    elif report["necessary"] is not None and not report["necessary"]["satisfied"]:
        verdict = "not_identifiable"
    else:
        verdict = "undecided"
    report["verdict"] = verdict
    return report, EXIT_OK if verdict == "identifiable" else EXIT_NO


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    tol = _tol(args)
    report, code = check_instance(inst, tol, args.model, args.s, args.diagnose, args.trials, args.seed)
    _write(args.out, dumps(report))
    return code


def cmd_generate(args) -> int:
    m = args.model
    if m == "subspace":
        inst = random_subspace(args.n, args.m, args.N, args.seed, complex_=args.complex)
    elif m == "jointsparse":
        inst = random_jointsparse(args.n, args.s, args.N, _support_arg(args), args.seed, complex_=args.complex)
    elif m == "jointsparse2d":
        side = math.isqrt(args.n)
        inst = random_jointsparse_2d(side, args.s, args.N, _support_arg(args), args.seed, complex_=args.complex)
    elif m == "piecewise":
        inst = random_piecewise(args.n, args.s, args.N, _support_arg(args), args.seed, complex_=args.complex)
    else:
        inst = random_sparse(args.n, args.N, args.theta, args.seed)
    if args.out is None:
        _write(None, dumps(instance_to_dict(inst)))
    else:
        save_instance(inst, args.out)
    return EXIT_OK


def _support_arg(args):
    if args.support is None:
        return "uniform"
    return IndexSet.of([int(j) for j in args.support.split(",")], args.n)


def cmd_sweep(args) -> int:
    grid = sweep(args.model, args.n, args.trials, args.seed, _tol(args))
    _write(args.out, grid.to_csv())
    if args.svg:
        _write(args.svg, sweep_svg(grid))
    return EXIT_OK


def cmd_census(args) -> int:
    res = census(args.n, args.s, args.N, args.trials, args.seed, _tol(args))
    _write(args.out, dumps(res.to_dict()))
    return EXIT_OK


def cmd_counterexamples(args) -> int:
    results = emit_counterexamples(args.out, args.seed, _tol(args))
    sys.stdout.write(dumps({"constructions": results}))
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_ERR


def _common(p: argparse.ArgumentParser):
    p.add_argument("--tol-rel", type=float, default=None, help="relative rank cutoff (default: shape-based)")
    p.add_argument("--tol-abs", type=float, default=1e-12, help="absolute cutoff (default 1e-12)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bgpc", description="Identifiability tools for Y = diag(lambda) A X.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide identifiability of an instance file")
    p.add_argument("instance")
    p.add_argument("--model", choices=MODELS, default=None, help="override the model stored in the file")
    p.add_argument("--s", type=int, default=None, help="sparsity level (default: support size)")
    p.add_argument("--trials", type=int, default=1000, help="falsification attempts for the sparse model")
    p.add_argument("--diagnose", action="store_true", help="record the rank of every candidate support")
    p.add_argument("--out", default=None)
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("generate", help="write a random instance file")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--support", default=None, help="comma-separated 1-based joint support")
    p.add_argument("--theta", type=float, default=0.1, help="nonzero probability for the sparse model")
    p.add_argument("--complex", action="store_true", help="complex Gaussian draws")
    p.add_argument("--out", default=None)
    _common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="phase-transition sweep over (m or s, N)")
    p.add_argument("--model", choices=("subspace", "jointsparse"), default="subspace")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--svg", default=None, help="SVG heat map path")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("census", help="good-support census for the joint-sparsity checker")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, default=10, help="trials per support class")
    p.add_argument("--out", default=None, help="JSON path (default stdout)")
    _common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("counterexamples", help="emit and verify the explicit non-identifiable constructions")
    p.add_argument("--out", required=True, help="output directory")
    _common(p)
    p.set_defaults(func=cmd_counterexamples)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERR if exc.code else EXIT_OK
    try:
        if args.command == "generate":
            need = {"subspace": "m"}.get(args.model, "s" if args.model != "sparse" else None)
            if need and getattr(args, need) is None:
                raise BGPCError(f"--{need} is required for model {args.model}")
        return args.func(args)
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"bgpc: error: {exc}", file=sys.stderr)
        return EXIT_ERR


if __name__ == "__main__":
    sys.exit(main())
