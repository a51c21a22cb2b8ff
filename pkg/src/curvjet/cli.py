"""Command-line surface: generate, check, extend, fit, and metric evaluation.

Exit codes: 0 on success, 1 on a failed check or violated precondition, 2 on
usage errors.  Documents are JSON; reports are deterministic for a fixed
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .jets import (
    einstein_check,
    einstein_extend,
    extension_solution_dim,
    fit_jacobi_relation,
    jet_traces,
    random_two_jet,
    random_einstein_one_jet,
    two_jet_from_dict,
    two_jet_to_dict,
    validate_two_jet,
)
from .polymetric import (
    curvature_two_jet,
    poly_metric_from_dict,
    poly_metric_to_dict,
    random_poly_metric,
)
from .report import Report
from .spaces import Space, tensor_from_dict, tensor_to_dict
from .suites import make_config, run_suites, suite_names

__all__ = ["main"]


def _parse_signature(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        sig = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("signature must be a comma list of +1/-1")
    if not sig or any(s not in (1, -1) for s in sig):
        raise argparse.ArgumentTypeError("signature entries must be +1 or -1")
    return sig


def _space_from_args(args, default_dim: int = 4) -> Space:
    sig = _parse_signature(args.signature)
    if sig is not None:
        if args.dim is not None and args.dim != len(sig):
            raise SystemExit2("--dim contradicts the signature length")
        return Space(len(sig), sig)
    return Space(args.dim if args.dim is not None else default_dim)


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _print_pairs(pairs: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(pairs, indent=2, sort_keys=True))
    else:
        for key, value in pairs.items():
            print(f"{key}: {value}")


def cmd_gen(args) -> int:
    sp = _space_from_args(args)
    if args.einstein:
        R, dR = random_einstein_one_jet(sp, args.seed)
        jet = einstein_extend(R, dR)
    else:
        jet = random_two_jet(sp, args.seed)
    ok, res = validate_two_jet(jet, tol=args.tol)
    _emit(two_jet_to_dict(jet), args.out)
    if args.out is not None:
        _print_pairs({"valid": ok, **res}, args.format == "json")
    return 0 if ok else 1


def cmd_check(args) -> int:
    cfg = make_config(
        dim=args.dim,
        signature=_parse_signature(args.signature),
        seed=args.seed,
        tol=args.tol,
        full=args.full,
        seeds=args.seeds,
    )
    suites = args.suite if args.suite else ["all"]
    records = run_suites(suites, cfg)
    report = Report(tuple(records), {"suites": suites, **cfg.echo()})
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.render_text())
    return 0 if report.passed else 1


def cmd_extend(args) -> int:
    doc = _load(getattr(args, "in"))
    R = tensor_from_dict(doc["R"])
    dR = tensor_from_dict(doc["dR"])
    try:
        jet = einstein_extend(R, dR)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _, report = einstein_check(jet)
    if args.out is not None:
        _emit(two_jet_to_dict(jet), args.out)
    pairs = {**report, "solution_dim": extension_solution_dim(R.space)}
    _print_pairs(pairs, args.format == "json")
    return 0


def cmd_fit(args) -> int:
    jet = two_jet_from_dict(_load(getattr(args, "in")))
    ok, res = validate_two_jet(jet)
    if not ok:
        print(f"error: input is not a valid two-jet: {res}", file=sys.stderr)
        return 1
    try:
        fit = fit_jacobi_relation(jet)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    pairs = {"c": fit.c, "residual": fit.residual}
    if einstein_check(jet)[0] and fit.residual < 1e-9:
        n = jet.space.dim
        lap = jet_traces(jet)[2].data
        gap = np.linalg.norm(lap + ((n + 4.0) * fit.c / 2.0) * jet.R.data)
        pairs["eigenvalue_residual"] = float(gap / max(jet.R.norm(), 1.0))
    _print_pairs(pairs, args.format == "json")
    return 0


def cmd_metric(args) -> int:
    in_path = getattr(args, "in")
    if in_path is None:
        gm = random_poly_metric(_space_from_args(args), args.seed)
        _emit(poly_metric_to_dict(gm), args.out)
        return 0
    gm = poly_metric_from_dict(_load(in_path))
    jet = curvature_two_jet(gm)
    ok, res = validate_two_jet(jet)
    if args.out is not None:
        _emit(two_jet_to_dict(jet), args.out)
    _print_pairs({"valid": ok, **res}, args.format == "json")
    return 0 if ok else 1


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dim", type=int, default=None, help="dimension (default 4)")
    sub.add_argument("--signature", default=None, help="comma list of +1/-1")
    sub.add_argument("--seed", type=int, default=0, help="base random seed")
    sub.add_argument("--tol", type=float, default=1e-9, help="residual threshold")
    sub.add_argument("--in", dest="in", default=None, help="input document path")
    sub.add_argument("--out", default=None, help="output document path")
    sub.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvjet", description="curvature two-jet toolkit"
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    p_gen = commands.add_parser("gen", help="generate a random valid two-jet")
    _add_common(p_gen)
    p_gen.add_argument(
        "--einstein", action="store_true", help="generate an extended Einstein two-jet"
    )
    p_gen.set_defaults(func=cmd_gen)

    p_check = commands.add_parser("check", help="run identity check suites")
    _add_common(p_check)
    p_check.add_argument(
        "--suite",
        action="append",
        choices=suite_names(),
        help="suite to run (repeatable; default all)",
    )
    p_check.add_argument(
        "--full", action="store_true", help="nightly mode: dims up to 5, 100 seeds"
    )
    p_check.add_argument(
        "--seeds", type=int, default=None, help="seed count override (default 25)"
    )
    p_check.set_defaults(func=cmd_check)

    p_extend = commands.add_parser("extend", help="extend an Einstein one-jet")
    _add_common(p_extend)
    p_extend.set_defaults(func=cmd_extend)

    p_fit = commands.add_parser("fit", help="fit the linear Jacobi relation")
    _add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_metric = commands.add_parser(
        "metric", help="random polynomial metric, or its curvature two-jet with --in"
    )
    _add_common(p_metric)
    p_metric.set_defaults(func=cmd_metric)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("extend", "fit"):
        if args.command == name and getattr(args, "in") is None:
            print(f"error: {name} requires --in", file=sys.stderr)
            return 2
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
