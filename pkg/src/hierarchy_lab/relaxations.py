"""Moment-side relaxations: Lasserre (PSD), SDSOS (2x2 PSD) and DSOS (linear).

Every builder returns a :class:`ConicProgram` over the moment vector ``y``
indexed by ``monomials_up_to(n, 2d)``.  Each cone block carries an affine
map from ``y`` (upper-triangle terms) plus the provenance needed to rebuild
the Gram matrices of the multipliers from the dual solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import ceil, comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import MultiIndex, Polynomial, monomials_up_to
from .errors import DimensionError, OrderTooSmallError
from .moments import degree_bound

__all__ = [
    "Hierarchy",
    "HierarchyKind",
    "BlockTag",
    "PolyProblem",
    "SourceMatrix",
    "ConeBlock",
    "ConicProgram",
    "required_order",
    "build_lasserre",
    "build_sdsos",
    "build_dsos",
    "build_r_variant",
    "build_relaxation",
    "count_soc_constraints",
    "premultiplier",
]

LinearForm = Tuple[Tuple[int, float], ...]
Term = Tuple[int, int, int, float]


class Hierarchy(str, Enum):
    LASSERRE = "lasserre"
    SDSOS = "sdsos"
    DSOS = "dsos"


@dataclass(frozen=True)
class HierarchyKind:
    hierarchy: Hierarchy
    r: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hierarchy", Hierarchy(self.hierarchy))
        if self.r < 0:
            raise ValueError("premultiplication power r must be nonnegative")

    def __str__(self):
        name = self.hierarchy.value
        return f"{self.r}-{name}" if self.r else name


class BlockTag(str, Enum):
    PSD = "psd"
    SOC2X2 = "soc2x2"
    LIN = "lin"


@dataclass(frozen=True)
class PolyProblem:
    """Minimize ``objective`` subject to ``g_i(x) >= 0`` for each constraint."""

    objective: Polynomial
    constraints: Tuple[Polynomial, ...] = ()
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = self.objective.num_vars
        if n < 1:
            raise DimensionError("a problem needs at least one variable")
        for g in self.constraints:
            if g.num_vars != n:
                raise DimensionError("objective and constraints disagree on num_vars")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != n:
                raise DimensionError("one name per variable required")

    @property
    def num_vars(self) -> int:
        return self.objective.num_vars


@dataclass(frozen=True)
class SourceMatrix:
    """The moment matrix (``constraint is None``) or the localizing matrix of ``g_i``."""

    name: str
    constraint: Optional[int]
    order: int
    row_labels: Tuple[MultiIndex, ...]

    @property
    def dim(self) -> int:
        return len(self.row_labels)


@dataclass(frozen=True)
class ConeBlock:
    """One cone constraint ``B(y) in K`` with ``B`` affine in ``y``.

    ``rows`` locates the block inside its source matrix: all rows for PSD,
    the pair ``(i, j)`` for SOC2X2, ``(i,)`` for a diagonal row and
    ``(i, j)`` with ``sign = +1/-1`` for ``B_ii +/- 2 B_ij + B_jj >= 0``.
    """

    tag: BlockTag
    dim: int
    source: int
    rows: Tuple[int, ...]
    terms: Tuple[Term, ...]
    sign: int = 0


@dataclass(frozen=True)
class ConicProgram:
    num_vars: int
    order: int
    kind: HierarchyKind
    labels: Tuple[MultiIndex, ...]
    objective: LinearForm
    equalities: Tuple[Tuple[LinearForm, float], ...]
    sources: Tuple[SourceMatrix, ...]
    blocks: Tuple[ConeBlock, ...]

    @property
    def num_moments(self) -> int:
        return len(self.labels)

    def count(self, tag: BlockTag) -> int:
        return sum(1 for b in self.blocks if b.tag == tag)

    def blocks_of(self, tag: BlockTag) -> List[ConeBlock]:
        return [b for b in self.blocks if b.tag == tag]

    def block_dims(self, tag: BlockTag) -> List[int]:
        return [b.dim for b in self.blocks if b.tag == tag]

    def validate(self) -> None:
        """Raise ``ValueError`` unless the program is well formed."""
        m = len(self.labels)
        if list(self.labels) != list(monomials_up_to(self.num_vars, 2 * self.order)):
            raise ValueError("moment labels must be monomials_up_to(n, 2d) in graded-lex order")

        def check_form(form, what):
            for var, _ in form:
                if not 0 <= var < m:
                    raise ValueError(f"{what} references undeclared moment {var}")

        check_form(self.objective, "objective")
        for form, _ in self.equalities:
            check_form(form, "equality")
        allowed = {
            Hierarchy.LASSERRE: {BlockTag.PSD},
            Hierarchy.SDSOS: {BlockTag.SOC2X2, BlockTag.LIN},
            Hierarchy.DSOS: {BlockTag.LIN},
        }[self.kind.hierarchy]
        seen_rows = set()
        for b in self.blocks:
            if b.tag not in allowed:
                raise ValueError(f"{b.tag.value} block in a {self.kind} program")
            if not 0 <= b.source < len(self.sources):
                raise ValueError("block references an unknown source matrix")
            src = self.sources[b.source]
            if any(not 0 <= r < src.dim for r in b.rows):
                raise ValueError("block rows outside its source matrix")
            for i, j, var, _ in b.terms:
                if not (0 <= i <= j < b.dim) or not 0 <= var < m:
                    raise ValueError("malformed block term")
            if b.tag == BlockTag.LIN:
                key = _form_key(b.terms)
                if key in seen_rows:
                    raise ValueError("repeated linear row")
                seen_rows.add(key)

    # -- native serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "hierarchy-lab-conic-program",
            "version": 1,
            "num_vars": self.num_vars,
            "order": self.order,
            "kind": {"hierarchy": self.kind.hierarchy.value, "r": self.kind.r},
            "labels": [list(a) for a in self.labels],
            "objective": [[v, c] for v, c in self.objective],
            "equalities": [{"form": [[v, c] for v, c in form], "rhs": rhs} for form, rhs in self.equalities],
            "sources": [
                {
                    "name": s.name,
                    "constraint": s.constraint,
                    "order": s.order,
                    "row_labels": [list(a) for a in s.row_labels],
                }
                for s in self.sources
            ],
            "blocks": [
                {
                    "tag": b.tag.value,
                    "dim": b.dim,
                    "source": b.source,
                    "rows": list(b.rows),
                    "sign": b.sign,
                    "terms": [list(t) for t in b.terms],
                }
                for b in self.blocks
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ConicProgram:
        if doc.get("format") != "hierarchy-lab-conic-program":
            raise ValueError("not a native conic program document")
        return cls(
            num_vars=int(doc["num_vars"]),
            order=int(doc["order"]),
            kind=HierarchyKind(Hierarchy(doc["kind"]["hierarchy"]), int(doc["kind"]["r"])),
            labels=tuple(MultiIndex(a) for a in doc["labels"]),
            objective=tuple((int(v), float(c)) for v, c in doc["objective"]),
            equalities=tuple(
                (tuple((int(v), float(c)) for v, c in e["form"]), float(e["rhs"]))
                for e in doc["equalities"]
            ),
            sources=tuple(
                SourceMatrix(
                    s["name"],
                    None if s["constraint"] is None else int(s["constraint"]),
                    int(s["order"]),
                    tuple(MultiIndex(a) for a in s["row_labels"]),
                )
                for s in doc["sources"]
            ),
            blocks=tuple(
                ConeBlock(
                    tag=BlockTag(b["tag"]),
                    dim=int(b["dim"]),
                    source=int(b["source"]),
                    rows=tuple(int(r) for r in b["rows"]),
                    terms=tuple((int(i), int(j), int(v), float(c)) for i, j, v, c in b["terms"]),
                    sign=int(b["sign"]),
                )
                for b in doc["blocks"]
            ),
        )


def _form_key(terms: Iterable[Term]):
    return tuple(sorted((i, j, v, c) for i, j, v, c in terms))


def _linear_form(poly: Polynomial, index: Dict[MultiIndex, int]) -> LinearForm:
    return tuple(sorted((index[a], float(c)) for a, c in poly.terms.items()))


def required_order(problem: PolyProblem, r: int = 0) -> int:
    deg_f = problem.objective.degree or 0
    need = ceil((deg_f + 2 * r) / 2)
    for g in problem.constraints:
        need = max(need, degree_bound(g))
    return need


def premultiplier(n: int, r: int) -> Polynomial:
    """``(x_1^2 + ... + x_n^2)^r`` with integer coefficients."""
    square_sum = Polynomial({MultiIndex.unit(i, n) * 2: 1 for i in range(n)}, n)
    return square_sum**r


def _check_order(problem: PolyProblem, d: int, r: int = 0):
    need = required_order(problem, r)
    if d < need:
        raise OrderTooSmallError(f"order {d} too small: objective and constraints need order >= {need}")


def _affine_entries(g: Optional[Polynomial], labels, index) -> Dict[Tuple[int, int], Dict[int, float]]:
    """Entry ``(a, b)`` of the moment (``g is None``) or localizing matrix as ``{var: coef}``."""
    g_terms = [(MultiIndex.zero(len(labels[0])), 1.0)] if g is None else [
        (gamma, float(c)) for gamma, c in g.terms.items()
    ]
    entries = {}
    for a in range(len(labels)):
        for b in range(a, len(labels)):
            s = labels[a] + labels[b]
            form: Dict[int, float] = {}
            for gamma, c in g_terms:
                v = index[s + gamma]
                form[v] = form.get(v, 0.0) + c
            entries[(a, b)] = {v: c for v, c in form.items() if c != 0.0}
    return entries


def _sources(problem: PolyProblem, d: int):
    n = problem.num_vars
    out = [(SourceMatrix("moment", None, d, monomials_up_to(n, d)), None)]
    for i, g in enumerate(problem.constraints):
        e = d - degree_bound(g)
        out.append((SourceMatrix(f"localizing[{i + 1}]", i, e, monomials_up_to(n, e)), g))
    return out


def _entry(entries, a, b):
    return entries[(a, b)] if a <= b else entries[(b, a)]


def _lin_terms(forms: Sequence[Tuple[float, Dict[int, float]]]) -> Tuple[Term, ...]:
    total: Dict[int, float] = {}
    for scale, form in forms:
        for v, c in form.items():
            total[v] = total.get(v, 0.0) + scale * c
    return tuple((0, 0, v, c) for v, c in sorted(total.items()) if c != 0.0)


def _build(problem: PolyProblem, d: int, kind: HierarchyKind) -> ConicProgram:
    n = problem.num_vars
    labels = monomials_up_to(n, 2 * d)
    index = {a: i for i, a in enumerate(labels)}
    sources = []
    blocks: List[ConeBlock] = []
    seen_lin = set()

    def add_lin(src_id, rows, sign, terms):
        key = _form_key(terms)
        if key in seen_lin:
            return
        seen_lin.add(key)
        blocks.append(ConeBlock(BlockTag.LIN, 1, src_id, rows, terms, sign))

    for src_id, (src, g) in enumerate(_sources(problem, d)):
        sources.append(src)
        entries = _affine_entries(g, src.row_labels, index)
        dim = src.dim
        pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
        if kind.hierarchy == Hierarchy.LASSERRE:
            terms = tuple(
                (a, b, v, c) for (a, b), form in sorted(entries.items()) for v, c in sorted(form.items())
            )
            blocks.append(ConeBlock(BlockTag.PSD, dim, src_id, tuple(range(dim)), terms))
        elif kind.hierarchy == Hierarchy.SDSOS:
            for i, j in pairs:
                terms = tuple(
                    (p, q, v, c)
                    for p, q, (a, b) in ((0, 0, (i, i)), (0, 1, (i, j)), (1, 1, (j, j)))
                    for v, c in sorted(_entry(entries, a, b).items())
                )
                blocks.append(ConeBlock(BlockTag.SOC2X2, 2, src_id, (i, j), terms))
            for i in range(dim):
                add_lin(src_id, (i,), 0, _lin_terms([(1.0, entries[(i, i)])]))
        else:
            for i, j in pairs:
                add_lin(src_id, (i,), 0, _lin_terms([(1.0, entries[(i, i)])]))
                add_lin(src_id, (j,), 0, _lin_terms([(1.0, entries[(j, j)])]))
                for sign in (1, -1):
                    add_lin(
                        src_id,
                        (i, j),
                        sign,
                        _lin_terms([(1.0, entries[(i, i)]), (2.0 * sign, entries[(i, j)]), (1.0, entries[(j, j)])]),
                    )
            if dim == 1:
                add_lin(src_id, (0,), 0, _lin_terms([(1.0, entries[(0, 0)])]))

    zero = index[MultiIndex.zero(n)]
    equalities = [(((zero, 1.0),), 1.0)]
    objective_poly = problem.objective
    if kind.r:
        p = premultiplier(n, kind.r)
        objective_poly = p * problem.objective
        equalities.append((_linear_form(p, index), 1.0))
    return ConicProgram(
        num_vars=n,
        order=d,
        kind=kind,
        labels=labels,
        objective=_linear_form(objective_poly, index),
        equalities=tuple(equalities),
        sources=tuple(sources),
        blocks=tuple(blocks),
    )


def build_lasserre(problem: PolyProblem, d: int) -> ConicProgram:
    _check_order(problem, d)
    return _build(problem, d, HierarchyKind(Hierarchy.LASSERRE))


def build_sdsos(problem: PolyProblem, d: int) -> ConicProgram:
    _check_order(problem, d)
    return _build(problem, d, HierarchyKind(Hierarchy.SDSOS))


def build_dsos(problem: PolyProblem, d: int) -> ConicProgram:
    _check_order(problem, d)
    return _build(problem, d, HierarchyKind(Hierarchy.DSOS))


def build_r_variant(problem: PolyProblem, d: int, r: int, kind) -> ConicProgram:
    """Relaxation of ``(sum x_j^2)^r (f - lambda) = sigma_0 + sum sigma_i g_i``.

    Moment side: minimize ``L_y((sum x_j^2)^r f)`` with ``y_0 = 1`` and
    ``L_y((sum x_j^2)^r) = 1``.
    """
    if r < 1:
        raise ValueError("r must be >= 1; use the plain builders for r = 0")
    hierarchy = kind.hierarchy if isinstance(kind, HierarchyKind) else Hierarchy(kind)
    _check_order(problem, d, r)
    return _build(problem, d, HierarchyKind(hierarchy, r))


def build_relaxation(problem: PolyProblem, d: int, kind: HierarchyKind) -> ConicProgram:
    if kind.r:
        return build_r_variant(problem, d, kind.r, kind)
    builder = {
        Hierarchy.LASSERRE: build_lasserre,
        Hierarchy.SDSOS: build_sdsos,
        Hierarchy.DSOS: build_dsos,
    }[kind.hierarchy]
    return builder(problem, d)


def count_soc_constraints(n: int, d: int, constraint_degrees: Sequence[int] = ()) -> int:
    """Number of 2x2 blocks SDSOS needs: one per pair of rows of each PSD block."""
    total = comb(comb(n + d, d), 2)
    for k in constraint_degrees:
        total += comb(comb(n + d - k, d - k), 2)
    return total
