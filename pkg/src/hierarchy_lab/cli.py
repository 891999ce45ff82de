"""Command-line interface: ``hierarchy-lab {relax,solve,verify,reproduce}``.

Exit codes: 0 success, 1 check failed (verify/reproduce), 2 unreadable
input, 3 inadmissible relaxation order, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from . import __version__
from .certificates import classify_multiplier, verify_identity
from .errors import DegenerateConstraintError, OrderTooSmallError, ParseError
from .io import load_certificate, load_problem, read_native, sdpa_text
from .moments import moment_matrix
from .relaxations import ConicProgram, Hierarchy, HierarchyKind, PolyProblem, build_relaxation, required_order

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_ORDER = 3
EXIT_SOLVER = 4

TOL_ENV = "HIERARCHY_LAB_TOL"


def default_tolerance() -> float:
    value = os.environ.get(TOL_ENV)
    if value is None:
        return 1e-8
    try:
        tol = float(value)
    except ValueError:
        raise SystemExit(f"error: {TOL_ENV}={value!r} is not a number")
    if tol <= 0:
        raise SystemExit(f"error: {TOL_ENV} must be positive")
    return tol


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load(path: str) -> PolyProblem:
    try:
        problem, _ = load_problem(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return problem


def _build(problem: PolyProblem, args) -> ConicProgram:
    kind = HierarchyKind(Hierarchy(args.kind), args.r)
    d = args.order if args.order is not None else required_order(problem, args.r)
    return build_relaxation(problem, d, kind)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _add_relaxation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="problem file (JSON)")
    p.add_argument("--kind", choices=[h.value for h in Hierarchy], default="lasserre")
    p.add_argument("--order", "-d", type=int, default=None, help="relaxation order (default: smallest admissible)")
    p.add_argument("--r", type=_positive_int, default=0, help="premultiplication power (default 0)")


def cmd_relax(args) -> int:
    cp = _build(_load(args.input), args)
    if args.export == "sdpa":
        text = sdpa_text(cp, comment=f"source {os.path.basename(args.input)}")
    else:
        text = json.dumps(cp.to_dict(), indent=1) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output}: {len(cp.blocks)} blocks, {cp.num_moments} moments", file=sys.stderr)
    return EXIT_OK


def _solve_report(args) -> dict:
    from .solver import Status, extract_minimizer, kkt_multiplier, solve

    if args.native:
        try:
            cp = read_native(args.input)
        except OSError as exc:
            raise ParseError(f"cannot read {args.input}: {exc.strerror}") from exc
        problem = None
    else:
        problem = _load(args.input)
        cp = _build(problem, args)
    tol = args.tol if args.tol is not None else default_tolerance()
    res = solve(cp, tolerance=tol, max_iters=args.max_iters, backend=args.backend)
    report = {
        "status": res.status.value,
        "hierarchy": cp.kind.hierarchy.value,
        "r": cp.kind.r,
        "order": cp.order,
        "bound": res.dual_value,
        "primal_value": res.primal_value,
        "dual_value": res.dual_value,
        "iterations": res.iterations,
        "residuals": res.residuals,
        "tolerance": tol,
        "minimizer": None,
        "multiplier": None,
    }
    if res.status == Status.OPTIMAL:
        x = extract_minimizer(moment_matrix(res.y, 1))
        if x is not None:
            report["minimizer"] = list(x)
            single = problem is None or len(problem.constraints) == 1
            if cp.kind.hierarchy == Hierarchy.LASSERRE and cp.kind.r == 0 and len(cp.sources) == 2 and single:
                report["multiplier"] = kkt_multiplier(cp, res, x, backend=args.backend)
    return report


def cmd_solve(args) -> int:
    report = _solve_report(args)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        label = report["hierarchy"] + (f" r={report['r']}" if report["r"] else "")
        print(f"relaxation  {label}, order {report['order']}")
        print(f"status      {report['status']} after {report['iterations']} iterations")
        print(f"bound       {report['bound']:.10f}")
        print(f"primal      {report['primal_value']:.10f}")
        res = report["residuals"]
        print(f"residuals   primal {res['primal']:.1e}  dual {res['dual']:.1e}  gap {res['gap']:.1e}")
        if report["minimizer"] is not None:
            print("minimizer   (" + ", ".join(f"{v:.10f}" for v in report["minimizer"]) + ")")
        else:
            print("minimizer   none (moment matrix not rank one)")
        if report["multiplier"] is not None:
            print(f"multiplier  {report['multiplier']:.10f}")
    if report["status"] != "OPTIMAL":
        _err(f"solver ended with {report['status']}")
        return EXIT_SOLVER
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load(args.problem)
    try:
        cert = load_certificate(args.certificate, problem.names)
    except OSError as exc:
        raise ParseError(f"cannot read {args.certificate}: {exc.strerror}") from exc
    residual = verify_identity(problem, cert)
    for k, sigma in enumerate(cert.sigmas):
        cone = classify_multiplier(sigma)
        member = ", ".join(c.name for c in type(cone) if c >= cone)
        print(f"sigma_{k}: {cone.name} (member of {member})")
    if residual.is_zero():
        print("EXACT")
        return EXIT_OK
    from .algebra import render_polynomial

    print(f"residual: {render_polynomial(residual, problem.names)}")
    return EXIT_CHECK_FAILED


def _orders(text: str) -> List[int]:
    try:
        out = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty order list")
    return out


def cmd_reproduce(args) -> int:
    from .counterexample import format_report, reproduce

    solver_tol = args.solver_tol if args.solver_tol is not None else default_tolerance()
    try:
        report = reproduce(args.orders, tolerance=args.tol, workers=args.workers,
                           solver_tolerance=solver_tol, backend=args.backend)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_PARSE
    print(json.dumps(report, indent=2) if args.json else format_report(report))
    if not report["passed"]:
        for name in report["failing"]:
            print(f"failing: {name}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hierarchy-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relax", help="build a relaxation and export it")
    _add_relaxation_args(p)
    p.add_argument("--export", choices=["sdpa", "native"], default="sdpa")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("solve", help="build and solve a relaxation")
    _add_relaxation_args(p)
    p.add_argument("--native", action="store_true", help="input is a native conic program, not a problem file")
    p.add_argument("--tol", type=float, default=None, help=f"solver tolerance (default ${TOL_ENV} or 1e-8)")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--backend", choices=["compiled", "python"], default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a certificate exactly")
    p.add_argument("certificate", help="certificate file (JSON)")
    p.add_argument("problem", help="problem file (JSON)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce", help="run the counterexample scenario")
    p.add_argument("--orders", type=_orders, default=[1, 2, 3], help="e.g. 1,2,3")
    p.add_argument("--tol", type=float, default=1e-6, help="agreement tolerance (default 1e-6)")
    p.add_argument("--solver-tol", type=float, default=None, help=f"solver tolerance (default ${TOL_ENV} or 1e-8)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=["compiled", "python"], default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except (OrderTooSmallError, DegenerateConstraintError) as exc:
        _err(str(exc))
        return EXIT_ORDER
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
