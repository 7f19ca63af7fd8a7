"""Command line interface.

Subcommands:

    star       --problem FILE F G         print the star product of two functions
    quantize   --problem FILE FIELD F     print the quantized derivation applied to F
    tau        --problem FILE FIELD FIELD print the bracket-defect function
    cross-mul  --problem FILE U V         print the product of two cross elements
    verify     --problem FILE             run the identity suite

Exit codes: 0 on success, 1 when verification reports a failure, 2 on any
input error (unreadable file, parse error, unknown name).
"""

from __future__ import annotations

import argparse
import json
import sys

from .parsing import ParseError, parse_cross, parse_star
from .problem import Problem, load_problem
from .verify import SUITES, run_verification


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedosov",
        description="Exact star products, quantized symplectic vector fields and "
        "deformed cross products on a Darboux chart.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--problem", required=True, help="path to the problem file")
        p.add_argument("--order", type=int, default=None,
                       help="override the truncation order")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_star = sub.add_parser("star", help="star product of two functions")
    common(p_star)
    p_star.add_argument("f", help="left factor (polynomial in x1.., h allowed)")
    p_star.add_argument("g", help="right factor")

    p_quant = sub.add_parser("quantize", help="apply a quantized vector field")
    common(p_quant)
    p_quant.add_argument("field", help="field name declared in the problem file")
    p_quant.add_argument("f", help="the function to differentiate")

    p_tau = sub.add_parser("tau", help="bracket defect of two fields")
    common(p_tau)
    p_tau.add_argument("x", help="first field name")
    p_tau.add_argument("y", help="second field name")

    p_cross = sub.add_parser("cross-mul", help="multiply two cross elements")
    common(p_cross)
    p_cross.add_argument("u", help="left factor (may use Lie basis names)")
    p_cross.add_argument("v", help="right factor")

    p_verify = sub.add_parser("verify", help="run the identity suite")
    common(p_verify)
    p_verify.add_argument("--suite", default="all",
                          help="comma-separated subset of: " + ",".join(SUITES))
    p_verify.add_argument("--seed", type=int, default=None,
                          help="randomness seed (default: derived from the file)")

    return parser


def _emit(result_text: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({"result": result_text}))
    else:
        print(result_text)


def _cmd_star(problem: Problem, args) -> int:
    ctx = problem.ctx
    f = parse_star(args.f, ctx)
    g = parse_star(args.g, ctx)
    _emit(str(problem.solution().star(f, g)), args.format)
    return 0


def _cmd_quantize(problem: Problem, args) -> int:
    field = problem.field(args.field)
    f = parse_star(args.f, problem.ctx)
    from .vectorfield import QuantizedDerivation

    qd = QuantizedDerivation.build(field, problem.solution())
    _emit(str(qd.apply(f)), args.format)
    return 0


def _cmd_tau(problem: Problem, args) -> int:
    from .vectorfield import tau

    x = problem.field(args.x)
    y = problem.field(args.y)
    _emit(str(tau(x, y, problem.solution())), args.format)
    return 0


def _cmd_cross(problem: Problem, args) -> int:
    algebra = problem.cross()
    u = parse_cross(args.u, algebra)
    v = parse_cross(args.v, algebra)
    _emit(str(algebra.mul(u, v)), args.format)
    return 0


def _cmd_verify(problem: Problem, args) -> int:
    if args.suite == "all":
        suites = SUITES
    else:
        suites = tuple(name.strip() for name in args.suite.split(",") if name.strip())
        for name in suites:
            if name not in SUITES:
                raise ValueError(f"unknown suite {name!r} (choose from {', '.join(SUITES)})")
    report = run_verification(problem, suites=suites, seed=args.seed)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        for line in report.lines():
            print(line)
    return 1 if report.failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        problem = load_problem(args.problem, order_override=args.order)
        if args.command == "star":
            return _cmd_star(problem, args)
        if args.command == "quantize":
            return _cmd_quantize(problem, args)
        if args.command == "tau":
            return _cmd_tau(problem, args)
        if args.command == "cross-mul":
            return _cmd_cross(problem, args)
        if args.command == "verify":
            return _cmd_verify(problem, args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ParseError, OSError, KeyError, ValueError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
