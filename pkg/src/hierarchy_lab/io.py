"""File formats: problem and certificate documents, native program JSON, SDPA sparse export."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra import MultiIndex, Polynomial, QSqrt2, default_names, parse_polynomial, parse_scalar, render_polynomial
from .certificates import Certificate, Cone, Multiplier, WeightedSquare
from .errors import DimensionError, HierarchyLabError, ParseError
from .relaxations import BlockTag, ConicProgram, PolyProblem
from .solver.standard_form import standard_form

__all__ = [
    "problem_from_dict",
    "problem_to_dict",
    "load_problem",
    "save_problem",
    "certificate_from_dict",
    "certificate_to_dict",
    "load_certificate",
    "save_certificate",
    "format_certificate",
    "write_native",
    "read_native",
    "write_sdpa",
    "sdpa_text",
    "load_schema",
    "data_path",
]

PathLike = Union[str, Path]
_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def data_path(name: str) -> Path:
    """Path of a file bundled under ``hierarchy_lab/data``."""
    return Path(__file__).resolve().parent / "data" / name


def load_schema(name: str) -> dict:
    return json.loads(data_path(f"schemas/{name}.schema.json").read_text())


# -- exact coefficients ---------------------------------------------------------


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"{where}: floating-point coefficient {value!r} rejected; write it as a fraction string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        return Fraction(value.replace(" ", ""))
    raise ParseError(f"{where}: expected an integer or a fraction string like '-3/4', got {value!r}")


def _coef_to_doc(c) -> Dict[str, str]:
    q = c if isinstance(c, QSqrt2) else QSqrt2(c)
    out = {"coefficient": str(q.rat_part)}
    if q.surd_part:
        out["sqrt2"] = str(q.surd_part)
    return out


def _poly_from_doc(terms, n: int, where: str) -> Polynomial:
    if not isinstance(terms, list):
        raise ParseError(f"{where}: expected a list of terms")
    out: Dict[MultiIndex, QSqrt2] = {}
    for k, term in enumerate(terms):
        here = f"{where}[{k}]"
        if not isinstance(term, dict) or "exponents" not in term or "coefficient" not in term:
            raise ParseError(f"{here}: each term needs 'exponents' and 'coefficient'")
        exps = term["exponents"]
        if not isinstance(exps, list) or any(not isinstance(e, int) or isinstance(e, bool) or e < 0 for e in exps):
            raise ParseError(f"{here}: exponents must be nonnegative integers")
        if len(exps) != n:
            raise ParseError(f"{here}: {len(exps)} exponents for {n} variables")
        c = QSqrt2(_rational(term["coefficient"], here), _rational(term.get("sqrt2", 0), here))
        alpha = MultiIndex(exps)
        out[alpha] = out.get(alpha, QSqrt2(0)) + c
    return Polynomial(out, n)


def _poly_to_doc(p: Polynomial) -> List[dict]:
    return [{"exponents": list(a), **_coef_to_doc(c)} for a, c in p.sorted_terms()]


# -- problem documents ----------------------------------------------------------


def problem_from_dict(doc: Any) -> Tuple[PolyProblem, dict]:
    """``(problem, metadata)`` from a problem document."""
    if not isinstance(doc, dict):
        raise ParseError("problem document must be an object")
    names = doc.get("variables")
    if not isinstance(names, list) or not names or not all(isinstance(s, str) for s in names):
        raise ParseError("'variables' must be a nonempty list of names")
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable names")
    n = len(names)
    if "objective" not in doc:
        raise ParseError("missing 'objective'")
    objective = _poly_from_doc(doc["objective"], n, "objective")
    cons = doc.get("constraints", [])
    if not isinstance(cons, list):
        raise ParseError("'constraints' must be a list")
    constraints = tuple(_poly_from_doc(c, n, f"constraints[{i}]") for i, c in enumerate(cons))
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise ParseError("'metadata' must be an object")
    try:
        problem = PolyProblem(objective, constraints, tuple(names))
    except DimensionError as exc:
        raise ParseError(str(exc)) from exc
    return problem, meta


def problem_to_dict(problem: PolyProblem, metadata: Optional[dict] = None) -> dict:
    names = list(problem.names or default_names(problem.num_vars))
    return {
        "variables": names,
        "objective": _poly_to_doc(problem.objective),
        "constraints": [_poly_to_doc(g) for g in problem.constraints],
        "metadata": dict(metadata or {}),
    }


def _read_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def load_problem(path: PathLike) -> Tuple[PolyProblem, dict]:
    return problem_from_dict(_read_json(path))


def save_problem(problem: PolyProblem, path: PathLike, metadata: Optional[dict] = None) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem, metadata), indent=2) + "\n")


# -- certificate documents ------------------------------------------------------


def certificate_from_dict(doc: Any, names: Sequence[str]) -> Certificate:
    """Certificate whose polynomials are written over the variables ``names``."""
    if not isinstance(doc, dict):
        raise ParseError("certificate document must be an object")
    if "variables" in doc and list(doc["variables"]) != list(names):
        raise ParseError("certificate and problem use different variable names")
    n = len(names)
    try:
        lam = parse_scalar(str(doc["lambda"]))
        r = doc.get("r", 0)
        if not isinstance(r, int) or isinstance(r, bool) or r < 0:
            raise ParseError("'r' must be a nonnegative integer")
        sigmas = []
        for s in doc["sigmas"]:
            cone = s.get("cone")
            squares = tuple(
                WeightedSquare(parse_scalar(str(sq["weight"])), parse_polynomial(str(sq["poly"]), names))
                for sq in s["squares"]
            )
            sigmas.append(Multiplier(squares, n, None if cone is None else Cone[cone.upper()]))
    except ParseError:
        raise
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed certificate document: {exc}") from exc
    except HierarchyLabError as exc:
        raise ParseError(str(exc)) from exc
    return Certificate(lam, tuple(sigmas), r)


def certificate_to_dict(cert: Certificate, names: Sequence[str]) -> dict:
    return {
        "variables": list(names),
        "lambda": str(cert.lam),
        "r": cert.r,
        "sigmas": [
            {
                **({"cone": s.cone.name.lower()} if s.cone is not None else {}),
                "squares": [{"weight": str(sq.weight), "poly": render_polynomial(sq.poly, names)} for sq in s.squares],
            }
            for s in cert.sigmas
        ],
    }


def load_certificate(path: PathLike, names: Sequence[str]) -> Certificate:
    return certificate_from_dict(_read_json(path), names)


def save_certificate(cert: Certificate, path: PathLike, names: Sequence[str]) -> None:
    Path(path).write_text(json.dumps(certificate_to_dict(cert, names), indent=2) + "\n")


def _weight(w: QSqrt2) -> str:
    text = str(w)
    return f"({text})" if w.rat_part and w.surd_part else text


def format_certificate(cert: Certificate, names: Sequence[str]) -> str:
    """Human-readable text: one line for lambda, one per multiplier."""
    lines = [f"lambda = {cert.lam}"]
    if cert.r:
        lines.append(f"r = {cert.r}")
    for k, s in enumerate(cert.sigmas):
        parts = [f"{_weight(sq.weight)}*({render_polynomial(sq.poly, names)})^2" for sq in s.squares]
        lines.append(f"sigma_{k} = " + (" + ".join(parts) if parts else "0"))
    return "\n".join(lines)


# -- native conic programs -------------------------------------------------------


def write_native(cp: ConicProgram, path: PathLike) -> None:
    Path(path).write_text(json.dumps(cp.to_dict(), indent=1) + "\n")


def read_native(path: PathLike) -> ConicProgram:
    try:
        return ConicProgram.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


# -- SDPA sparse export -----------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _label(alpha: MultiIndex) -> str:
    return "(" + ",".join(str(e) for e in alpha) + ")"


def sdpa_text(cp: ConicProgram, comment: Optional[str] = None) -> str:
    """SDPA sparse text of ``cp`` after eliminating its equalities.

    Matrix blocks keep the program's order; all linear rows form one final
    diagonal block.  SDPA reads ``sum_i F_i x_i - F_0 >= 0``, so ``F_0`` is
    the negated constant part.
    """
    sf = standard_form(cp)
    mats = [(k, b) for k, b in enumerate(cp.blocks) if b.tag != BlockTag.LIN]
    lins = [(k, b) for k, b in enumerate(cp.blocks) if b.tag == BlockTag.LIN]
    struct = [b.dim for _, b in mats] + ([-len(lins)] if lins else [])

    head = ["* hierarchy-lab SDPA sparse export"]
    if comment:
        head.extend(f"* {line}" for line in comment.splitlines())
    head.append(f"* relaxation {cp.kind} order {cp.order} in {cp.num_vars} variables")
    head.append(f"* objective constant {_fmt(sf.const)} (add to the SDPA optimum)")
    for j in range(sf.m):
        col = sf.T[:, j]
        nz = np.flatnonzero(col)
        if len(nz) == 1 and col[nz[0]] == 1.0 and sf.t0[nz[0]] == 0.0:
            head.append(f"* x{j + 1} = y{_label(cp.labels[nz[0]])}")
        else:
            head.append(f"* x{j + 1} = free coordinate {j + 1} of y = T x + t0")
    for v in range(len(cp.labels)):
        col = sf.T[v]
        if np.count_nonzero(col) != 1 or sf.t0[v] != 0.0:
            terms = " + ".join(f"{_fmt(c)}*x{i + 1}" for i, c in enumerate(col) if c != 0.0)
            head.append(f"* y{_label(cp.labels[v])} = {_fmt(sf.t0[v])}" + (f" + {terms}" if terms else ""))
    for blk, (k, b) in enumerate(mats, start=1):
        src = cp.sources[b.source]
        if b.tag == BlockTag.PSD:
            where = "rows " + " ".join(_label(a) for a in src.row_labels)
        else:
            i, j = b.rows
            where = f"pair alpha={_label(src.row_labels[i])} beta={_label(src.row_labels[j])}"
        head.append(f"* block {blk}: {b.tag.value} {b.dim}x{b.dim} of {src.name}, {where}")
    if lins:
        head.append(f"* block {len(mats) + 1}: diagonal of {len(lins)} linear rows")
        for r, (k, b) in enumerate(lins, start=1):
            src = cp.sources[b.source]
            if len(b.rows) == 1:
                what = f"diag alpha={_label(src.row_labels[b.rows[0]])}"
            else:
                i, j = b.rows
                what = f"{'plus' if b.sign > 0 else 'minus'} alpha={_label(src.row_labels[i])} beta={_label(src.row_labels[j])}"
            head.append(f"*   row {r}: {src.name} {what}")

    body = [str(sf.m), str(len(struct)), " ".join(str(s) for s in struct), " ".join(_fmt(c) for c in sf.c)]
    entries = []
    for blk, (k, b) in enumerate(mats, start=1):
        mb = sf.blocks[sf.origin[k][1]]
        for i in range(mb.dim):
            for j in range(i, mb.dim):
                if mb.F0[i, j] != 0.0:
                    entries.append((0, blk, i + 1, j + 1, -mb.F0[i, j]))
        upper = mb.rows <= mb.cols
        for i, j, v, c in zip(mb.rows[upper], mb.cols[upper], mb.vars[upper], mb.coefs[upper]):
            entries.append((int(v) + 1, blk, int(i) + 1, int(j) + 1, float(c)))
    if lins:
        blk = len(mats) + 1
        for r, (k, b) in enumerate(lins, start=1):
            _, row = sf.origin[k]
            if sf.f[row] != 0.0:
                entries.append((0, blk, r, r, -sf.f[row]))
            for v in np.flatnonzero(sf.A[row]):
                entries.append((int(v) + 1, blk, r, r, float(sf.A[row, v])))
    entries.sort(key=lambda e: (e[0], e[1], e[2], e[3]))
    body.extend(f"{m} {b} {i} {j} {_fmt(v)}" for m, b, i, j, v in entries)
    return "\n".join(head + body) + "\n"


def write_sdpa(cp: ConicProgram, path: PathLike, comment: Optional[str] = None) -> None:
    Path(path).write_text(sdpa_text(cp, comment))
