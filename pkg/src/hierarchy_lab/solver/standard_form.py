"""Reduction of a conic program to the free-variable form the solver works on.

    minimize    c^T z + const
    subject to  F0_k + sum_i z_i F_ik  PSD     (each matrix block k)
                f + A z               >= 0    (linear rows)

Equality constraints on the moment vector are eliminated by substitution,
``y = T z + t0``.  The dual is

    maximize    const - sum_k <F0_k, X_k> - f^T x
    subject to  sum_k <F_ik, X_k> + (A^T x)_i = c_i,   X_k PSD, x >= 0

and its blocks are the Gram matrices of the multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..relaxations import BlockTag, ConicProgram

__all__ = ["MatrixBlock", "StandardForm", "standard_form"]


@dataclass
class MatrixBlock:
    """Affine symmetric block ``F0 + sum_i z_i F_i`` stored as COO terms (both triangles)."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vars: np.ndarray
    coefs: np.ndarray
    F0: np.ndarray

    @classmethod
    def from_dense(cls, F0: np.ndarray, Fs: Sequence[np.ndarray]) -> MatrixBlock:
        F0 = np.asarray(F0, dtype=float)
        rows, cols, vars_, coefs = [], [], [], []
        for i, F in enumerate(Fs):
            F = np.asarray(F, dtype=float)
            a, b = np.nonzero(F)
            rows.extend(a)
            cols.extend(b)
            vars_.extend([i] * len(a))
            coefs.extend(F[a, b])
        return cls(
            F0.shape[0],
            np.array(rows, dtype=np.int_),
            np.array(cols, dtype=np.int_),
            np.array(vars_, dtype=np.int_),
            np.array(coefs, dtype=float),
            F0,
        )


@dataclass
class StandardForm:
    m: int
    c: np.ndarray
    const: float
    blocks: List[MatrixBlock]
    A: np.ndarray
    f: np.ndarray
    # origin of each ConicProgram block: ("mat", k) or ("lin", row)
    origin: List[Tuple[str, int]] = field(default_factory=list)
    T: Optional[np.ndarray] = None
    t0: Optional[np.ndarray] = None

    @property
    def num_rows(self) -> int:
        return len(self.f)

    def lift(self, z: np.ndarray) -> np.ndarray:
        """Full moment vector ``T z + t0``."""
        return self.T @ z + self.t0

    @classmethod
    def from_dense(cls, c, blocks=(), A=None, f=None, const=0.0) -> StandardForm:
        """Assemble directly from dense data: ``blocks`` holds ``(F0, [F_1..F_m])`` pairs."""
        c = np.asarray(c, dtype=float)
        m = len(c)
        mats = [MatrixBlock.from_dense(F0, Fs) for F0, Fs in blocks]
        if A is None:
            A = np.zeros((0, m))
            f = np.zeros(0)
        return cls(m, c, float(const), mats, np.asarray(A, dtype=float).reshape(-1, m), np.asarray(f, dtype=float))


def _eliminate(m_full: int, equalities) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """Row-reduce the equalities and return ``T``, ``t0`` with ``y = T z + t0``."""
    if not equalities:
        return np.eye(m_full), np.zeros(m_full), list(range(m_full))
    E = np.zeros((len(equalities), m_full))
    e = np.zeros(len(equalities))
    for k, (form, rhs) in enumerate(equalities):
        for v, c in form:
            E[k, v] += c
        e[k] = rhs
    pivots = []
    for k in range(len(E)):
        for p, q in zip(range(k), pivots):
            factor = E[k, q]
            if factor != 0.0:
                E[k] -= factor * E[p]
                e[k] -= factor * e[p]
        mags = np.abs(E[k])
        mags[pivots] = -1.0
        q = int(np.argmax(mags))
        if mags[q] <= 1e-14:
            raise ValueError("dependent equality constraints")
        e[k] /= E[k, q]
        E[k] /= E[k, q]
        for p in range(k):
            factor = E[p, q]
            if factor != 0.0:
                E[p] -= factor * E[k]
                e[p] -= factor * e[k]
        pivots.append(q)
    free = [v for v in range(m_full) if v not in set(pivots)]
    T = np.zeros((m_full, len(free)))
    t0 = np.zeros(m_full)
    for j, v in enumerate(free):
        T[v, j] = 1.0
    for k, q in enumerate(pivots):
        T[q, :] = -E[k, free]
        t0[q] = e[k]
    return T, t0, free


def standard_form(cp: ConicProgram) -> StandardForm:
    m_full = len(cp.labels)
    T, t0, free = _eliminate(m_full, cp.equalities)
    m = len(free)
    # sparse rows of T for fast substitution
    subst = [[(j, T[v, j]) for j in np.flatnonzero(T[v])] for v in range(m_full)]

    c_full = np.zeros(m_full)
    for v, coef in cp.objective:
        c_full[v] += coef
    c = T.T @ c_full
    const = float(c_full @ t0)

    blocks: List[MatrixBlock] = []
    lin_rows: List[np.ndarray] = []
    lin_consts: List[float] = []
    origin: List[Tuple[str, int]] = []
    for b in cp.blocks:
        if b.tag == BlockTag.LIN:
            row = np.zeros(m)
            const_part = 0.0
            for _, _, v, coef in b.terms:
                const_part += coef * t0[v]
                for j, tj in subst[v]:
                    row[j] += coef * tj
            origin.append(("lin", len(lin_rows)))
            lin_rows.append(row)
            lin_consts.append(const_part)
            continue
        s = b.dim
        F0 = np.zeros((s, s))
        acc = {}
        for i, j, v, coef in b.terms:
            F0[i, j] += coef * t0[v]
            if i != j:
                F0[j, i] += coef * t0[v]
            for zj, tj in subst[v]:
                for key in {(i, j), (j, i)}:
                    acc[key + (zj,)] = acc.get(key + (zj,), 0.0) + coef * tj
        items = [(k, val) for k, val in sorted(acc.items()) if val != 0.0]
        origin.append(("mat", len(blocks)))
        blocks.append(
            MatrixBlock(
                s,
                np.array([k[0] for k, _ in items], dtype=np.int_),
                np.array([k[1] for k, _ in items], dtype=np.int_),
                np.array([k[2] for k, _ in items], dtype=np.int_),
                np.array([val for _, val in items], dtype=float),
                F0,
            )
        )
    A = np.array(lin_rows, dtype=float).reshape(len(lin_rows), m)
    f = np.array(lin_consts, dtype=float)
    return StandardForm(m, c, const, blocks, A, f, origin, T, t0)
