from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierarchy_lab.algebra import SQRT2, MultiIndex, Polynomial, QSqrt2, monomials_up_to
from hierarchy_lab.errors import DegenerateConstraintError, DimensionError, IncompleteSequenceError
from hierarchy_lab.moments import (
    MomentSequence,
    counterexample_moments,
    counterexample_sequence,
    degree_bound,
    dirac_moments,
    localizing_matrix,
    moment_matrix,
    riesz,
)

from .conftest import poly

H = QSqrt2(1, 0) / 2
R = SQRT2 / 2


def test_riesz_objective(f):
    assert riesz(f, counterexample_sequence) == 4 * (1 - SQRT2)


def test_riesz_constant_and_constraint(g):
    y = counterexample_moments(4)
    assert riesz(Polynomial.constant(1, 2), y) == 1
    assert riesz(g, y) == 0


def test_riesz_incomplete(f):
    with pytest.raises(IncompleteSequenceError):
        riesz(f, counterexample_moments(1))


def test_moment_matrix_counterexample():
    M = moment_matrix(counterexample_sequence, 1, 2)
    assert M.entries == ((1, R, R), (R, H, -H), (R, -H, H))
    assert M.row_labels == monomials_up_to(2, 1)


def test_moment_matrix_dirac_origin():
    M = moment_matrix(dirac_moments((0, 0), 4), 2)
    assert M.dim == 6
    assert M.entries[0][0] == 1
    assert sum(v != 0 for row in M.entries for v in row) == 1


def test_moment_matrix_dirac_minimizer():
    M = moment_matrix(dirac_moments((R, R), 2), 1)
    assert M.entries == ((1, R, R), (R, H, H), (R, H, H))


def test_moment_matrix_needs_degree():
    with pytest.raises(IncompleteSequenceError):
        moment_matrix(counterexample_moments(3), 2)


def test_localizing_examples(g):
    assert localizing_matrix(g, counterexample_sequence, 0).entries == ((0,),)
    L = localizing_matrix(g, counterexample_sequence, 1)
    assert L.dim == 3 and all(v == 0 for row in L.entries for v in row)
    y = counterexample_moments(4)
    assert localizing_matrix(Polynomial.constant(1, 2), y, 2) == moment_matrix(y, 2)


def test_localizing_errors(g):
    with pytest.raises(IncompleteSequenceError):
        localizing_matrix(g, counterexample_moments(2), 1)
    with pytest.raises(DegenerateConstraintError):
        localizing_matrix(Polynomial.zero(2), counterexample_sequence, 1)


def test_degree_bound():
    assert degree_bound(poly("1 - x1^2 - x2^2")) == 1
    assert degree_bound(poly("x1")) == 1
    assert degree_bound(poly("x1^3*x2")) == 2
    with pytest.raises(DegenerateConstraintError):
        degree_bound(Polynomial.zero(2))


def test_counterexample_sequence_values():
    assert counterexample_sequence((0, 0)) == 1
    assert counterexample_sequence((1, 1)) == -H
    assert counterexample_sequence((3, 1)) == QSqrt2(-1, 0) / 4
    with pytest.raises(DimensionError):
        counterexample_sequence((1, 1, 1))


def test_hankel_property():
    M = moment_matrix(counterexample_sequence, 3, 2)
    seen = {}
    for i, a in enumerate(M.row_labels):
        for j, b in enumerate(M.row_labels):
            seen.setdefault(a + b, set()).add(M.entries[i][j])
    assert all(len(v) == 1 for v in seen.values())


def test_magnitude_and_sign_rule():
    for a in monomials_up_to(2, 10):
        y = counterexample_sequence(a)
        assert y * y == QSqrt2.sqrt2_power(-2 * a.degree)
        assert (y < 0) == (a[0] % 2 == 1 and a[1] % 2 == 1)


def test_shift_relation():
    for a in monomials_up_to(2, 8):
        assert counterexample_sequence(a) == counterexample_sequence((a[0] + 2, a[1])) + counterexample_sequence(
            (a[0], a[1] + 2)
        )


def test_two_by_two_minors_psd():
    y = counterexample_sequence
    for a, b in combinations(monomials_up_to(2, 4), 2):
        p, q, r = y(a * 2), y(a + b), y(b * 2)
        assert p >= 0 and r >= 0 and p * r - q * q >= 0


def test_moment_sequence_mapping():
    y = counterexample_moments(2)
    assert len(y) == 6 and y.normalized
    with pytest.raises(IncompleteSequenceError):
        y[MultiIndex((3, 0))]
    with pytest.raises(IncompleteSequenceError):
        MomentSequence({MultiIndex((0, 0)): 1}, 2, 1)


coef = st.builds(QSqrt2, st.integers(-4, 4), st.integers(-4, 4))
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coef, max_size=5).map(
    lambda t: Polynomial(t, 2)
)


@settings(max_examples=40)
@given(polys, polys, coef, coef)
def test_riesz_linear(p, q, a, b):
    y = counterexample_sequence
    assert riesz(p.scale(a) + q.scale(b), y) == a * riesz(p, y) + b * riesz(q, y)
