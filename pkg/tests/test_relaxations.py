import numpy as np
import pytest

from hierarchy_lab.algebra import MultiIndex, Polynomial
from hierarchy_lab.errors import OrderTooSmallError
from hierarchy_lab.relaxations import (
    BlockTag,
    ConicProgram,
    Hierarchy,
    HierarchyKind,
    PolyProblem,
    build_dsos,
    build_lasserre,
    build_r_variant,
    build_relaxation,
    build_sdsos,
    count_soc_constraints,
    premultiplier,
    required_order,
)

from .conftest import poly


def unconstrained(n, d=2):
    terms = {MultiIndex.unit(i, n) * d: 1 for i in range(n)}
    return PolyProblem(Polynomial(terms, n))


def test_lasserre_shapes(problem):
    assert build_lasserre(problem, 1).block_dims(BlockTag.PSD) == [3, 1]
    assert build_lasserre(problem, 2).block_dims(BlockTag.PSD) == [6, 3]
    x2 = PolyProblem(poly("x1^2", ("x1",)))
    assert build_lasserre(x2, 1).block_dims(BlockTag.PSD) == [2]


def test_lasserre_normalization_and_objective(problem, f):
    cp = build_lasserre(problem, 1)
    assert cp.equalities == ((((0, 1.0),), 1.0),)
    index = {a: i for i, a in enumerate(cp.labels)}
    assert dict(cp.objective) == {index[a]: float(c) for a, c in f.terms.items()}


def test_sdsos_counterexample_d1(problem):
    cp = build_sdsos(problem, 1)
    assert cp.count(BlockTag.SOC2X2) == 3
    loc = [b for b in cp.blocks_of(BlockTag.LIN) if cp.sources[b.source].constraint == 0]
    assert len(loc) == 1
    assert [b.rows for b in cp.blocks_of(BlockTag.SOC2X2)] == [(0, 1), (0, 2), (1, 2)]


def test_sdsos_1x1_block():
    p = PolyProblem(poly("x1", ("x1",)), (poly("1 - x1^2", ("x1",)),))
    cp = build_sdsos(p, 1)
    src = [b for b in cp.blocks if b.source == 1]
    assert [b.tag for b in src] == [BlockTag.LIN]


def test_sdsos_n10_d2_count():
    assert count_soc_constraints(10, 2, []) == 2145
    assert build_sdsos(unconstrained(10), 2).count(BlockTag.SOC2X2) == 2145


def test_dsos_counterexample_d1(problem):
    cp = build_dsos(problem, 1)
    moment = [b for b in cp.blocks if b.source == 0]
    assert sum(len(b.rows) == 1 for b in moment) == 3
    assert sum(len(b.rows) == 2 for b in moment) == 6
    assert len(cp.blocks) == 10
    assert {b.tag for b in cp.blocks} == {BlockTag.LIN}


def test_dsos_1x1_block_single_row():
    p = PolyProblem(poly("x1", ("x1",)), (poly("1 - x1^2", ("x1",)),))
    cp = build_dsos(p, 1)
    assert len([b for b in cp.blocks if b.source == 1]) == 1


def test_dsos_lp_without_constraints():
    cp = build_dsos(PolyProblem(poly("x1^2", ("x1",))), 1)
    assert len(cp.blocks) == 4


def test_count_formula_examples():
    assert count_soc_constraints(2, 1, [1]) == 3
    assert count_soc_constraints(1, 1, []) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_soc_count_matches_builder(n, d):
    ball = Polynomial({MultiIndex.zero(n): 1, **{MultiIndex.unit(i, n) * 2: -1 for i in range(n)}}, n)
    p = PolyProblem(unconstrained(n).objective, (ball,))
    assert build_sdsos(p, d).count(BlockTag.SOC2X2) == count_soc_constraints(n, d, [1])
    assert build_sdsos(unconstrained(n), d).count(BlockTag.SOC2X2) == count_soc_constraints(n, d)


def test_order_too_small(problem):
    with pytest.raises(OrderTooSmallError):
        build_lasserre(problem, 0)
    with pytest.raises(OrderTooSmallError):
        build_r_variant(problem, 1, 1, Hierarchy.SDSOS)


def test_r_variant(problem):
    with pytest.raises(ValueError):
        build_r_variant(problem, 2, 0, Hierarchy.SDSOS)
    cp = build_r_variant(problem, 2, 1, HierarchyKind(Hierarchy.SDSOS))
    assert cp.kind == HierarchyKind(Hierarchy.SDSOS, 1)
    assert len(cp.equalities) == 2
    index = {a: i for i, a in enumerate(cp.labels)}
    p = premultiplier(2, 1)
    assert dict(cp.equalities[1][0]) == {index[a]: float(c) for a, c in p.terms.items()}
    assert required_order(problem, 1) == 2
    cp.validate()
    build_r_variant(problem, 2, 1, Hierarchy.LASSERRE).validate()


@pytest.mark.parametrize("kind", ["lasserre", "sdsos", "dsos"])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_programs_well_formed(problem, kind, d):
    cp = build_relaxation(problem, d, HierarchyKind(kind))
    cp.validate()
    tags = {b.tag for b in cp.blocks}
    assert tags <= {"lasserre": {BlockTag.PSD}, "sdsos": {BlockTag.SOC2X2, BlockTag.LIN}, "dsos": {BlockTag.LIN}}[kind]


@pytest.mark.parametrize("kind", ["lasserre", "sdsos", "dsos"])
def test_native_round_trip(problem, kind):
    cp = build_relaxation(problem, 2, HierarchyKind(kind, 0))
    again = ConicProgram.from_dict(cp.to_dict())
    assert again == cp


def test_validate_catches_bad_program(problem):
    cp = build_dsos(problem, 1)
    doc = cp.to_dict()
    doc["blocks"].append(doc["blocks"][-1])
    with pytest.raises(ValueError):
        ConicProgram.from_dict(doc).validate()


def test_affine_map_reproduces_moment_matrix(problem):
    # entries of the PSD block evaluated at a moment vector equal M_d(y)
    from hierarchy_lab.moments import counterexample_sequence, moment_matrix

    cp = build_lasserre(problem, 2)
    y = np.array([float(counterexample_sequence(a)) for a in cp.labels])
    block = cp.blocks[0]
    B = np.zeros((block.dim, block.dim))
    for i, j, v, c in block.terms:
        B[i, j] += c * y[v]
    B = np.triu(B) + np.triu(B, 1).T
    assert np.allclose(B, moment_matrix(counterexample_sequence, 2, 2).to_numpy())
