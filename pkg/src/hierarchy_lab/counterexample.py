"""The SDSOS-gap counterexample: exact reference data and the end-to-end scenario.

Minimize ``(x1 + x2 - 2)^2`` over the unit disk.  Lasserre is exact at
order 1 while SDSOS stalls at ``4(1 - sqrt2)``, a gap of exactly 2.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import SQRT2, QSqrt2, monomials_up_to, parse_scalar
from .certificates import (
    Certificate,
    check_hessian_psd_constant,
    check_moment_feasibility,
    classify_multiplier,
    kkt_residual,
    verify_identity,
)
from .errors import HierarchyLabError
from .io import data_path, load_certificate, load_problem
from .moments import counterexample_sequence, moment_matrix, riesz
from .relaxations import Hierarchy, HierarchyKind, PolyProblem, build_relaxation, premultiplier, required_order
from .solver import REFINE_TOLERANCE, Status, extract_minimizer, kkt_multiplier, solve

__all__ = [
    "ReferenceData",
    "REFERENCE",
    "load_reference",
    "lasserre_certificate",
    "sdsos_certificate",
    "check_sequence_closed_form",
    "reproduce",
    "format_report",
    "MAX_ORDER",
]

MAX_ORDER = 5


@dataclass(frozen=True)
class ReferenceData:
    problem: PolyProblem
    minimizer: Tuple[QSqrt2, QSqrt2]
    multiplier: QSqrt2
    global_value: QSqrt2
    sdsos_value: QSqrt2
    gap: QSqrt2

    @property
    def names(self) -> Tuple[str, ...]:
        return self.problem.names

    def self_check(self) -> None:
        """Exact consistency of the reference numbers; raises on any mismatch."""
        f, g = self.problem.objective, self.problem.constraints[0]
        failures = []
        if self.global_value - self.sdsos_value != self.gap:
            failures.append("global_value - sdsos_value != gap")
        if f.eval(self.minimizer) != self.global_value:
            failures.append("f(minimizer) != global_value")
        if g.eval(self.minimizer) != 0:
            failures.append("g(minimizer) != 0")
        if not kkt_residual(self.minimizer, self.multiplier, self.problem).is_zero():
            failures.append("KKT residual nonzero")
        if failures:
            raise HierarchyLabError("reference data inconsistent: " + "; ".join(failures))


def load_reference() -> ReferenceData:
    problem, meta = load_problem(data_path("counterexample.json"))
    global_value = parse_scalar(meta["global_value"])
    sdsos_value = parse_scalar(meta["sdsos_value"])
    return ReferenceData(
        problem=problem,
        minimizer=tuple(parse_scalar(v) for v in meta["minimizer"]),
        multiplier=parse_scalar(meta["multiplier"]),
        global_value=global_value,
        sdsos_value=sdsos_value,
        gap=QSqrt2(2),
    )


REFERENCE = load_reference()
REFERENCE.self_check()


def lasserre_certificate() -> Certificate:
    return load_certificate(data_path("lasserre_certificate.json"), REFERENCE.names)


def sdsos_certificate() -> Certificate:
    return load_certificate(data_path("sdsos_certificate.json"), REFERENCE.names)


def check_sequence_closed_form(max_degree: int = 10) -> bool:
    """``|y_a| = 2^(-|a|/2)``, negative iff both exponents are odd, and
    ``y_a = y_{a+(2,0)} + y_{a+(0,2)}``, for every ``|a| <= max_degree``."""
    for a in monomials_up_to(2, max_degree):
        y = counterexample_sequence(a)
        if y * y != QSqrt2.sqrt2_power(-2 * a.degree):
            return False
        if (y.sign() < 0) != (a[0] % 2 == 1 and a[1] % 2 == 1):
            return False
        if y != counterexample_sequence((a[0] + 2, a[1])) + counterexample_sequence((a[0], a[1] + 2)):
            return False
    return True


# -- reproduction scenario -------------------------------------------------------


def _cell(value: Optional[float], reference: QSqrt2, relation: str, tolerance: float) -> dict:
    ref = float(reference)
    if value is None:
        return {"value": None, "reference": str(reference), "reference_value": ref,
                "relation": relation, "error": None, "ok": False}
    error = value - ref
    ok = abs(error) <= tolerance if relation == "==" else error <= tolerance
    return {"value": value, "reference": str(reference), "reference_value": ref,
            "relation": relation, "error": error, "ok": bool(ok)}


def _solve_cell(kind: HierarchyKind, d: int, solver_tolerance: float, backend: Optional[str]) -> dict:
    problem = REFERENCE.problem
    out = {"hierarchy": kind.hierarchy.value, "r": kind.r, "order": d}
    start = time.perf_counter()
    try:
        cp = build_relaxation(problem, d, kind)
        res = solve(cp, tolerance=solver_tolerance, backend=backend)
    except HierarchyLabError as exc:
        out.update(status="ERROR", error=f"order {d}: {exc}", bound=None, seconds=time.perf_counter() - start)
        return out
    out.update(status=res.status.value, iterations=res.iterations, bound=res.dual_value,
               primal=res.primal_value, residuals=res.residuals)
    if res.status != Status.OPTIMAL:
        out["error"] = f"order {d}: solver ended with {res.status.value}"
    if kind.hierarchy == Hierarchy.LASSERRE and res.status == Status.OPTIMAL:
        x = extract_minimizer(moment_matrix(res.y, 1))
        out["minimizer"] = None if x is None else list(x)
        if x is not None and kind.r == 0:
            out["multiplier"] = kkt_multiplier(cp, res, x, backend=backend)
    elif res.y is not None:
        # a point moment vector here would put the bound at or above the global value
        out["rank_one"] = extract_minimizer(moment_matrix(res.y, 1)) is not None
    out["seconds"] = time.perf_counter() - start
    return out


def _exact_checks(orders: Sequence[int]) -> List[dict]:
    ref = REFERENCE
    problem = ref.problem
    f, g = problem.objective, problem.constraints[0]
    checks = []

    def add(name, ok, detail=""):
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    for label, cert in (("lasserre", lasserre_certificate()), ("sdsos", sdsos_certificate())):
        residual = verify_identity(problem, cert)
        cones = [str(classify_multiplier(s)) for s in cert.sigmas]
        add(f"{label} certificate identity", residual.is_zero(), f"residual {residual}; cones {cones}")
    for label, cert, value in (("lasserre", lasserre_certificate(), ref.global_value),
                               ("sdsos", sdsos_certificate(), ref.sdsos_value)):
        add(f"{label} certificate lambda", cert.lam == value, str(cert.lam))
    for d in sorted(set(orders)):
        add(f"moment feasibility d={d}", check_moment_feasibility(counterexample_sequence, d, g, 2))
    y_f = riesz(f, counterexample_sequence)
    add("L_y(f) = sdsos value", y_f == ref.sdsos_value, str(y_f))
    p1 = premultiplier(2, 1)
    add("L_y(p f) = L_y(f), L_y(p) = 1",
        riesz(p1 * f, counterexample_sequence) == y_f and riesz(p1, counterexample_sequence) == 1)
    add("closed form |y_a| and sign, |a| <= 10", check_sequence_closed_form(10))
    add("KKT residual at reference", kkt_residual(ref.minimizer, ref.multiplier, problem).is_zero())
    add("Hessian of f PSD", check_hessian_psd_constant(f))
    add("Hessian of -g PSD", check_hessian_psd_constant(-g))
    add("global - sdsos = 2", ref.global_value - ref.sdsos_value == ref.gap)
    return checks


def reproduce(orders: Sequence[int] = (1, 2, 3), tolerance: float = 1e-6, workers: int = 1,
              solver_tolerance: float = 1e-8, backend: Optional[str] = None) -> dict:
    """Run every hierarchy on the counterexample and compare against the reference.

    Returns a JSON-serializable report; ``report["passed"]`` is the overall verdict.
    """
    orders = sorted(set(int(d) for d in orders))
    if not orders or orders[0] < 1 or orders[-1] > MAX_ORDER:
        raise ValueError(f"orders must be a nonempty subset of 1..{MAX_ORDER}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    ref = REFERENCE
    kinds = [HierarchyKind(Hierarchy.LASSERRE), HierarchyKind(Hierarchy.SDSOS), HierarchyKind(Hierarchy.DSOS),
             HierarchyKind(Hierarchy.SDSOS, 1), HierarchyKind(Hierarchy.DSOS, 1)]
    jobs = [(k, d) for k in kinds for d in orders if d >= required_order(ref.problem, k.r)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _solve_cell(job[0], job[1], solver_tolerance, backend), jobs))
    else:
        results = [_solve_cell(k, d, solver_tolerance, backend) for k, d in jobs]
    by_key: Dict[Tuple[str, int, int], dict] = {(c["hierarchy"], c["r"], c["order"]): c for c in results}

    zero = QSqrt2(0)
    sqrt_half = SQRT2 / 2
    for c in results:
        key = (c["hierarchy"], c["r"])
        if key == ("lasserre", 0):
            c["check"] = _cell(c["bound"], ref.global_value, "==", tolerance)
            xs = c.get("minimizer")
            c["minimizer_check"] = [_cell(None if xs is None else xs[i], sqrt_half, "==", tolerance) for i in range(2)]
            c["multiplier_check"] = _cell(c.get("multiplier"), ref.multiplier, "==", tolerance)
        elif key == ("sdsos", 0):
            c["check"] = _cell(c["bound"], ref.sdsos_value, "==", tolerance)
        elif key == ("dsos", 0):
            sd = by_key.get(("sdsos", 0, c["order"]), {}).get("bound")
            c["check"] = _cell(c["bound"], ref.sdsos_value, "<=", tolerance)
            c["check"]["below_sdsos"] = sd is not None and c["bound"] is not None and c["bound"] <= sd + tolerance
            c["check"]["ok"] = c["check"]["ok"] and c["check"]["below_sdsos"]
        else:
            c["check"] = _cell(c["bound"], zero, "<=", tolerance)
        c["cap_check"] = _cell(c["bound"], ref.global_value if key[0] == "lasserre" else ref.sdsos_value,
                               "<=", tolerance)
        parts = [c["check"]["ok"], c["cap_check"]["ok"], c["status"] == Status.OPTIMAL.value]
        if key == ("lasserre", 0):
            parts += [m["ok"] for m in c["minimizer_check"]] + [c["multiplier_check"]["ok"]]
        else:
            parts.append(not c.get("rank_one", False))
        c["ok"] = all(parts)

    gaps = []
    for d in orders:
        las = by_key.get(("lasserre", 0, d), {}).get("bound")
        sd = by_key.get(("sdsos", 0, d), {}).get("bound")
        value = None if las is None or sd is None else las - sd
        gaps.append({"order": d, **_cell(value, ref.gap, "==", 2 * tolerance)})

    checks = _exact_checks(orders)
    failing = [f"{c['hierarchy']}{'' if not c['r'] else ' r=' + str(c['r'])} d={c['order']}"
               for c in results if not c["ok"]]
    failing += [f"gap d={g['order']}" for g in gaps if not g["ok"]]
    failing += [c["name"] for c in checks if not c["ok"]]
    return {
        "problem": "minimize (x1 + x2 - 2)^2 subject to 1 - x1^2 - x2^2 >= 0",
        "orders": orders,
        "tolerance": tolerance,
        "solver_tolerance": solver_tolerance,
        "multiplier_refine_tolerance": REFINE_TOLERANCE,
        "loose_tolerance": tolerance > 1e-6,
        "reference": {
            "global_value": str(ref.global_value),
            "sdsos_value": str(ref.sdsos_value),
            "gap": str(ref.gap),
            "minimizer": [str(v) for v in ref.minimizer],
            "multiplier": str(ref.multiplier),
        },
        "cells": results,
        "gap": gaps,
        "exact_checks": checks,
        "failing": failing,
        "passed": not failing,
    }


def _num(v, width=13):
    return f"{v:{width}.9f}" if isinstance(v, float) else f"{'-':>{width}}"


def format_report(report: dict) -> str:
    """Plain-text rendering of a :func:`reproduce` report."""
    lines = [f"problem: {report['problem']}",
             f"orders {report['orders']}, tolerance {report['tolerance']:g}"
             + ("  [LOOSE TOLERANCE]" if report["loose_tolerance"] else "")]
    rows = {}
    for c in report["cells"]:
        name = c["hierarchy"] + (f" r={c['r']}" if c["r"] else "")
        rows.setdefault(name, {})[c["order"]] = c
    header = f"{'relaxation':<12}" + "".join(f"{'d=' + str(d):>15}" for d in report["orders"])
    lines += ["", header]
    for name, cells in rows.items():
        line = f"{name:<12}"
        for d in report["orders"]:
            c = cells.get(d)
            line += "  " + (_num(c["bound"]) + ("" if c["ok"] else "!") if c else f"{'n/a':>13}")
        lines.append(line)
    line = f"{'gap':<12}"
    for g in report["gap"]:
        line += "  " + _num(g["value"]) + ("" if g["ok"] else "!")
    lines.append(line)
    ref = report["reference"]
    lines.append("")
    lines.append(f"reference: global {ref['global_value']}, sdsos {ref['sdsos_value']}, gap {ref['gap']}")
    las = next((c for c in report["cells"] if c["hierarchy"] == "lasserre" and c["r"] == 0), None)
    if las is not None and las.get("minimizer"):
        x = las["minimizer"]
        lines.append(f"minimizer (d={las['order']}): ({x[0]:.9f}, {x[1]:.9f}), multiplier {las.get('multiplier', float('nan')):.9f}")
    lines.append("")
    for c in report["exact_checks"]:
        lines.append(f"[{'ok' if c['ok'] else 'FAIL'}] {c['name']}")
    lines.append("")
    lines.append("PASS" if report["passed"] else "FAIL: " + ", ".join(report["failing"]))
    return "\n".join(lines)
