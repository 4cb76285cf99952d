"""Command-line front end.

Four subcommands: ``integrate``, ``bound``, ``sharpness`` and ``pdf-bound``.
Exit status is 0 on success, 1 on usage, parse or domain errors and 2 when
the adaptive integrator stops at its interval cap.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from typing import Any, Sequence

from .bounds import HolderPair, bound_for, companion_gap, lipschitz_bound, m_exact
from .errors import CompanionQuadError
from .expr import IntegrandFunction
from .extremal import make_fstar, make_midpoint_kink, make_quarter_kink
from .interval import Interval
from .norms import NormKind, segment_norms
from .prob import DensityFunction, cdf_companion_bound
from .quadrature import (
    DEFAULT_MAX_INTERVALS,
    adaptive_integrate,
    remainder_bound,
    uniform_partition,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

WITNESSES = ("quarter-kink", "midpoint-kink", "fstar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _sig12(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.12g}") if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _sig12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig12(v) for v in value]
    return value


def _ratio(bound: float, gap: float) -> float | None:
    return bound / gap if gap > 0.0 else None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="companion-quad",
        description="Quarter-point quadrature with certified error bounds.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, need_f=True):
        if need_f:
            p.add_argument("--f", required=True, help="expression in t, e.g. 't^2 + sin(t)'")
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)
        p.add_argument("--norm", choices=("inf", "l1", "lp"), default=None,
                       help="derivative norm regime (default inf)")
        p.add_argument("--p", type=float, default=None, help="exponent for --norm lp")
        p.add_argument("--json", action="store_true", help="emit one JSON object")

    p = sub.add_parser("integrate", help="composite or adaptive integration")
    common(p)
    p.add_argument("--n", type=int, default=None, help="uniform partition with n cells")
    p.add_argument("--tol", type=float, default=None, help="adaptive target for the bound")
    p.add_argument("--max-intervals", type=int, default=DEFAULT_MAX_INTERVALS)

    p = sub.add_parser("bound", help="all error majorants at a point x")
    common(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--alpha", type=float, default=None, help="Hölder exponent (> 1)")

    p = sub.add_parser("sharpness", help="compare a witness's gap with its bound")
    common(p, need_f=False)
    p.add_argument("--witness", choices=WITNESSES, required=True)
    p.add_argument("--k", type=float, default=None,
                   help="slope (midpoint-kink) or Hölder order (fstar)")
    p.add_argument("--x", type=float, default=None, help="point for fstar")

    p = sub.add_parser("pdf-bound", help="CDF functional versus expectation")
    common(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--rescale", action="store_true", help="normalise the density")
    return parser


def _norm_kind(args) -> NormKind:
    flag = args.norm or "inf"
    if args.p is not None and flag != "lp":
        raise UsageError("--p is only valid with --norm lp")
    if flag == "lp" and args.p is None:
        raise UsageError("--norm lp requires --p")
    return NormKind.from_flag(flag, args.p)


def _report(subcommand, inputs, **fields) -> dict:
    out = {
        "subcommand": subcommand,
        "inputs": inputs,
        "estimate": None,
        "bound": None,
        "gap": None,
        "ratio": None,
        "certified": False,
        "converged": True,
        "details": {},
    }
    out.update(fields)
    return out


def _integrate(args) -> dict:
    if (args.n is None) == (args.tol is None):
        raise UsageError("integrate needs exactly one of --n or --tol")
    kind = _norm_kind(args)
    domain = Interval(args.a, args.b)
    f = IntegrandFunction.from_expression(args.f)
    if args.n is not None:
        result = remainder_bound(f, uniform_partition(domain, args.n), kind)
        mode = "composite"
    else:
        result = adaptive_integrate(f, domain, args.tol, kind, max_intervals=args.max_intervals)
        mode = "adaptive"
    return _report(
        "integrate",
        {"f": args.f, "a": args.a, "b": args.b, "n": args.n, "tol": args.tol, "norm": str(kind)},
        estimate=result.estimate,
        bound=result.remainder_bound,
        certified=result.certified,
        converged=result.converged,
        details={
            "mode": mode,
            "intervals": result.n,
            "per_interval_sum": result.per_interval_sum,
            "global_norm": result.global_norm,
            "mesh": result.partition.mesh,
        },
    )


def _bound(args) -> dict:
    kind = _norm_kind(args)
    domain = Interval(args.a, args.b)
    f = IntegrandFunction.from_expression(args.f)
    holder = HolderPair.from_alpha(args.alpha) if args.alpha is not None else None
    norms = segment_norms(f, args.x, domain, kind)
    report = bound_for(norms, args.x, domain, holder)
    gap = abs(companion_gap(f, args.x, domain))
    details = {
        "first_bound": report.first_bound,
        "m_exact": m_exact(f, args.x, domain),
        "segment_norms": {"left": norms.left, "middle": norms.middle,
                          "right": norms.right, "whole": norms.whole},
        **report.branches(),
    }
    if holder is not None:
        details["holder"] = {"alpha": holder.alpha, "beta": holder.beta}
    return _report(
        "bound",
        {"f": args.f, "a": args.a, "b": args.b, "x": args.x, "norm": str(kind),
         "alpha": args.alpha},
        bound=report.first_bound,
        gap=gap,
        ratio=_ratio(report.first_bound, gap),
        certified=report.certified,
        details=details,
    )


def _sharpness(args) -> dict:
    domain = Interval(args.a, args.b)
    inputs = {"witness": args.witness, "a": args.a, "b": args.b}
    if args.witness == "fstar":
        if args.norm is not None or args.p is not None:
            raise UsageError("fstar is checked against the Hölder-class bound; drop --norm/--p")
        k = 1.0 if args.k is None else args.k
        x = domain.quarter_point if args.x is None else args.x
        w = make_fstar(x, k, domain)
        bound = lipschitz_bound(x, domain, k, 1.0)
        branch = "lipschitz"
        inputs.update(k=k, x=x)
    else:
        if args.x is not None:
            raise UsageError(f"--x is not used by {args.witness}")
        kind = _norm_kind(args)
        inputs["norm"] = str(kind)
        if args.witness == "quarter-kink":
            if args.k is not None:
                raise UsageError("--k is not used by quarter-kink")
            w = make_quarter_kink(domain)
        else:
            w = make_midpoint_kink(1.0 if args.k is None else args.k, domain)
            inputs["k"] = 1.0 if args.k is None else args.k
        x = w.x
        report = bound_for(segment_norms(w.function, x, domain, kind), x, domain)
        if kind.name == "Lp" and args.witness == "quarter-kink":
            bound, branch = report.combined, "combined"
        elif kind.name == "LInf" or args.witness == "quarter-kink":
            bound, branch = report.max_branch, "max_branch"
        else:
            bound, branch = report.first_bound, "first_bound"
    gap = abs(companion_gap(w.function, x, domain))
    return _report(
        "sharpness",
        inputs,
        bound=bound,
        gap=gap,
        ratio=_ratio(bound, gap),
        certified=w.function.certified,
        details={"witness": w.name, "x": x, "branch": branch, "closed_form_gap": w.gap},
    )


def _pdf_bound(args) -> dict:
    kind = _norm_kind(args)
    domain = Interval(args.a, args.b)
    density = DensityFunction.from_pdf(args.f, domain, rescale=args.rescale)
    r = cdf_companion_bound(density, args.x, kind)
    return _report(
        "pdf-bound",
        {"f": args.f, "a": args.a, "b": args.b, "x": args.x, "norm": str(kind),
         "rescale": args.rescale},
        bound=r.bound,
        gap=r.gap,
        ratio=_ratio(r.bound, r.gap),
        certified=r.certified,
        details={"functional": r.functional, "target": r.target,
                 "normalization": density.normalization},
    )


_HANDLERS = {
    "integrate": _integrate,
    "bound": _bound,
    "sharpness": _sharpness,
    "pdf-bound": _pdf_bound,
}


def _format_text(report: dict) -> str:
    lines = [f"subcommand: {report['subcommand']}"]

    def emit(key, value, indent=""):
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            for k, v in value.items():
                emit(k, v, indent + "  ")
        elif isinstance(value, float):
            lines.append(f"{indent}{key}: {value:.12g}")
        elif value is not None:
            lines.append(f"{indent}{key}: {value}")

    for key in ("estimate", "bound", "gap", "ratio", "certified", "converged"):
        emit(key, report[key])
    emit("inputs", report["inputs"])
    emit("details", report["details"])
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, execute the subcommand and print its report."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        report = _HANDLERS[args.subcommand](args)
    except UsageError as exc:
        print(f"companion-quad {args.subcommand}: error: {exc}", file=stderr)
        return EXIT_ERROR
    except CompanionQuadError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(_sig12(report)), file=stdout)
    else:
        print(_format_text(report), file=stdout)
    return EXIT_OK if report["converged"] else EXIT_NOT_CONVERGED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
