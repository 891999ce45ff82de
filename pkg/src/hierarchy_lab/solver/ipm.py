"""Dense primal-dual interior-point method with Nesterov-Todd scaling.

Works on :class:`StandardForm` programs: matrix blocks of equal size are
stacked so the scaling, step-length and corrector computations run as
batched numpy operations; the Schur complement assembly goes through the
kernel backend.  Search directions use Mehrotra's predictor-corrector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
import scipy.linalg
import scipy.sparse

from . import kernels
from .standard_form import MatrixBlock, StandardForm

log = logging.getLogger(__name__)

__all__ = ["Status", "IPMResult", "solve_standard", "DEFAULT_TOLERANCE", "DEFAULT_MAX_ITERS"]

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERS = 200
STEP_FRACTION = 0.99
DIVERGENCE = 1e8


class Status(str, Enum):
    OPTIMAL = "OPTIMAL"
    MAX_ITERATIONS = "MAX_ITERATIONS"
    NUMERICAL_FAILURE = "NUMERICAL_FAILURE"
    INFEASIBLE_DETECTED = "INFEASIBLE_DETECTED"


@dataclass
class IPMResult:
    status: Status
    z: np.ndarray
    X: List[np.ndarray]
    S: List[np.ndarray]
    x: np.ndarray
    s: np.ndarray
    primal_value: float
    dual_value: float
    iterations: int
    residuals: Dict[str, float]
    history: List[Dict[str, float]] = field(default_factory=list)


class _Stack:
    """Blocks of a common dimension, with padded term arrays and the map z -> vec(F(z))."""

    def __init__(self, dim: int, members: List[int], blocks: List[MatrixBlock], m: int):
        self.dim = dim
        self.members = members
        K = len(members)
        T = max((len(blocks[i].coefs) for i in members), default=0)
        self.rows = np.zeros((K, T), dtype=np.int_)
        self.cols = np.zeros((K, T), dtype=np.int_)
        self.vars = np.zeros((K, T), dtype=np.int_)
        self.coefs = np.zeros((K, T))
        self.F0 = np.zeros((K, dim, dim))
        flat_rows, flat_cols, flat_vals = [], [], []
        for k, i in enumerate(members):
            b = blocks[i]
            nt = len(b.coefs)
            self.rows[k, :nt] = b.rows
            self.cols[k, :nt] = b.cols
            self.vars[k, :nt] = b.vars
            self.coefs[k, :nt] = b.coefs
            self.F0[k] = b.F0
            flat_rows.append(k * dim * dim + b.rows * dim + b.cols)
            flat_cols.append(b.vars)
            flat_vals.append(b.coefs)
        if flat_rows:
            r = np.concatenate(flat_rows)
            c = np.concatenate(flat_cols)
            v = np.concatenate(flat_vals)
        else:
            r = c = np.zeros(0, dtype=np.int_)
            v = np.zeros(0)
        self.P = scipy.sparse.csr_matrix((v, (r, c)), shape=(K * dim * dim, m))
        self.PT = self.P.T.tocsr()
        self.K = K

    def apply(self, z):
        return (self.P @ z).reshape(self.K, self.dim, self.dim)

    def adjoint(self, M):
        return self.PT @ M.reshape(-1)


def _sym(M):
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def _inner(A, B):
    return float(np.einsum("kij,kij->", A, B))


def _nt_scaling(X, S):
    """Return ``G, Ginv, lam`` with ``G^T S G = diag(lam) = Ginv X Ginv^T``."""
    Ls = np.linalg.cholesky(S)
    Lx = np.linalg.cholesky(X)
    U, lam, Vt = np.linalg.svd(np.swapaxes(Ls, -1, -2) @ Lx)
    isq = 1.0 / np.sqrt(lam)
    G = Lx @ np.swapaxes(Vt, -1, -2) * isq[:, None, :]
    Ginv = isq[:, :, None] * (np.swapaxes(U, -1, -2) @ np.swapaxes(Ls, -1, -2))
    return G, Ginv, lam


def _max_step(lam, D):
    """Largest ``a`` with ``diag(lam) + a D`` PSD (``inf`` when unbounded)."""
    if D.shape[0] == 0:
        return np.inf
    r = 1.0 / np.sqrt(lam)
    M = _sym(D * r[:, :, None] * r[:, None, :])
    emin = np.linalg.eigvalsh(M)[:, 0].min()
    return np.inf if emin >= 0 else -1.0 / emin


def _max_step_lp(lam, d):
    neg = d < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-lam[neg] / d[neg]))


def _factor(H):
    m = H.shape[0]
    if m == 0:
        return ("empty", None)
    scale = max(1.0, float(np.max(np.abs(np.diag(H)))))
    for reg in (0.0, 1e-14, 1e-12, 1e-10):
        try:
            return ("chol", scipy.linalg.cho_factor(H + reg * scale * np.eye(m), check_finite=True))
        except (np.linalg.LinAlgError, ValueError):
            continue
    try:
        lu = scipy.linalg.lu_factor(H, check_finite=True)
    except (np.linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(lu[0])) or np.min(np.abs(np.diag(lu[0]))) == 0.0:
        return None
    return ("lu", lu)


def _solve(fac, rhs):
    kind, data = fac
    if kind == "empty":
        return np.zeros(0)
    if kind == "chol":
        return scipy.linalg.cho_solve(data, rhs)
    return scipy.linalg.lu_solve(data, rhs)


def solve_standard(
    sf: StandardForm,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERS,
    backend: Optional[str] = None,
) -> IPMResult:
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    kern = kernels.get(backend)
    m = sf.m
    by_dim: Dict[int, List[int]] = {}
    for i, b in enumerate(sf.blocks):
        by_dim.setdefault(b.dim, []).append(i)
    stacks = [_Stack(d, members, sf.blocks, m) for d, members in sorted(by_dim.items())]
    A, f, c = sf.A, sf.f, sf.c
    AT = A.T.copy()
    p = len(f)
    nu = sum(st.K * st.dim for st in stacks) + p
    if nu == 0:
        raise ValueError("program has no cone constraints")

    normF0 = np.sqrt(sum(float(np.sum(st.F0**2)) for st in stacks) + float(f @ f))
    normc = float(np.linalg.norm(c))

    # identity-scaled interior start
    z = np.zeros(m)
    X = [np.broadcast_to(np.eye(st.dim), (st.K, st.dim, st.dim)).copy() for st in stacks]
    S = [x.copy() for x in X]
    x = np.ones(p)
    s = np.ones(p)

    history: List[Dict[str, float]] = []
    status = Status.MAX_ITERATIONS
    stalls = 0
    it = 0
    pobj = dobj = float("nan")
    res = {"primal": np.inf, "dual": np.inf, "gap": np.inf}

    for it in range(max_iters + 1):
        Fz = [st.apply(z) for st in stacks]
        Rp = [st.F0 + Fk - Sk for st, Fk, Sk in zip(stacks, Fz, S)]
        rp = f + A @ z - s
        Rd = c - AT @ x
        for st, Xk in zip(stacks, X):
            Rd = Rd - st.adjoint(Xk)
        xs = sum(_inner(Xk, Sk) for Xk, Sk in zip(X, S)) + float(x @ s)
        mu = xs / nu
        pobj = float(c @ z) + sf.const
        dobj = sf.const - sum(_inner(st.F0, Xk) for st, Xk in zip(stacks, X)) - float(f @ x)
        pres = np.sqrt(sum(float(np.sum(R**2)) for R in Rp) + float(rp @ rp)) / (1.0 + normF0)
        dres = float(np.linalg.norm(Rd)) / (1.0 + normc)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj))
        res = {"primal": pres, "dual": dres, "gap": gap}
        history.append({"iter": it, "pobj": pobj, "dobj": dobj, "mu": mu, **res})
        log.debug("it %3d pobj % .9e dobj % .9e pres %.2e dres %.2e gap %.2e", it, pobj, dobj, pres, dres, gap)

        if max(pres, dres, gap) <= tolerance:
            status = Status.OPTIMAL
            break
        # a feasible side whose objective diverges certifies the other side infeasible
        if (abs(pobj) > DIVERGENCE and pres < 1e-3) or (abs(dobj) > DIVERGENCE and dres < 1e-3):
            status = Status.INFEASIBLE_DETECTED
            break
        if not np.isfinite([pobj, dobj, mu, pres, dres]).all():
            status = Status.NUMERICAL_FAILURE
            break
        if it == max_iters:
            status = Status.MAX_ITERATIONS
            break

        try:
            scal = [_nt_scaling(Xk, Sk) for Xk, Sk in zip(X, S)]
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_FAILURE
            break
        W = [G @ np.swapaxes(G, -1, -2) for G, _, _ in scal]
        w = x / s
        lam_lp = np.sqrt(x * s)

        H = np.zeros((m, m))
        for st, Wk in zip(stacks, W):
            kern.schur_psd(H, st.rows, st.cols, st.vars, st.coefs, np.ascontiguousarray(Wk))
        if p:
            H += AT @ (w[:, None] * A)
        H = 0.5 * (H + H.T)
        fac = _factor(H) if np.isfinite(H).all() else None
        if fac is None:
            status = Status.NUMERICAL_FAILURE
            break

        WRpW = [Wk @ R @ Wk for Wk, R in zip(W, Rp)]
        sw = np.sqrt(w)

        def direction(Rt, rt):
            # Rt, rt: right-hand sides of dX~ + dS~ in the scaled space
            Rc = [G @ R @ np.swapaxes(G, -1, -2) for (G, _, _), R in zip(scal, Rt)]
            rc = sw * rt
            rhs = -Rd + AT @ (rc - w * rp)
            for st, R, WRW in zip(stacks, Rc, WRpW):
                rhs = rhs + st.adjoint(R - WRW)
            dz = _solve(fac, rhs)
            dS = [st.apply(dz) + R for st, R in zip(stacks, Rp)]
            dX = [_sym(R - Wk @ D @ Wk) for R, Wk, D in zip(Rc, W, dS)]
            ds = A @ dz + rp
            dx = rc - w * ds
            return dz, dS, dX, ds, dx

        def steps(dS, dX, ds, dx):
            ax = as_ = np.inf
            for (G, Ginv, lam), Dx, Ds in zip(scal, dX, dS):
                ax = min(ax, _max_step(lam, Ginv @ Dx @ np.swapaxes(Ginv, -1, -2)))
                as_ = min(as_, _max_step(lam, np.swapaxes(G, -1, -2) @ Ds @ G))
            if p:
                ax = min(ax, _max_step_lp(lam_lp, dx / sw))
                as_ = min(as_, _max_step_lp(lam_lp, ds * sw))
            return ax, as_

        # predictor
        Rt_aff = [-(lam[:, :, None] * np.eye(st.dim)) for (_, _, lam), st in zip(scal, stacks)]
        dz_a, dS_a, dX_a, ds_a, dx_a = direction(Rt_aff, -lam_lp)
        ax, as_ = steps(dS_a, dX_a, ds_a, dx_a)
        ax, as_ = min(1.0, ax), min(1.0, as_)
        xs_aff = sum(_inner(Xk + ax * D, Sk + as_ * E) for Xk, D, Sk, E in zip(X, dX_a, S, dS_a))
        xs_aff += float((x + ax * dx_a) @ (s + as_ * ds_a))
        sigma = float(np.clip((xs_aff / xs) ** 3, 0.0, 1.0)) if xs > 0 else 0.0

        # Mehrotra corrector
        Rt = []
        for (G, Ginv, lam), st, Dx, Ds in zip(scal, stacks, dX_a, dS_a):
            Dxt = Ginv @ Dx @ np.swapaxes(Ginv, -1, -2)
            Dst = np.swapaxes(G, -1, -2) @ Ds @ G
            R = (sigma * mu - lam**2)[:, :, None] * np.eye(st.dim) - _sym(Dxt @ Dst)
            Rt.append(2.0 * R / (lam[:, :, None] + lam[:, None, :]))
        rt = (sigma * mu - lam_lp**2 - (dx_a / sw) * (ds_a * sw)) / lam_lp if p else np.zeros(0)
        dz, dS, dX, ds, dx = direction(Rt, rt)
        ax, as_ = steps(dS, dX, ds, dx)
        ax = min(1.0, STEP_FRACTION * ax)
        as_ = min(1.0, STEP_FRACTION * as_)

        z = z + as_ * dz
        S = [_sym(Sk + as_ * D) for Sk, D in zip(S, dS)]
        s = s + as_ * ds
        X = [_sym(Xk + ax * D) for Xk, D in zip(X, dX)]
        x = x + ax * dx

        if max(ax, as_) < 1e-9:
            stalls += 1
            if stalls >= 3:
                status = Status.MAX_ITERATIONS
                break
        else:
            stalls = 0

    Xout: List[Optional[np.ndarray]] = [None] * len(sf.blocks)
    Sout: List[Optional[np.ndarray]] = [None] * len(sf.blocks)
    for st, Xk, Sk in zip(stacks, X, S):
        for k, i in enumerate(st.members):
            Xout[i] = Xk[k]
            Sout[i] = Sk[k]
    return IPMResult(status, z, Xout, Sout, x, s, pobj, dobj, it, res, history)

