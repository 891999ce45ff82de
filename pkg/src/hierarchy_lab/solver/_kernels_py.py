"""Pure numpy implementation of the solver's hot kernels.

Same contract as the compiled ``_kernels`` extension; selected when the
extension is not built or ``HIERARCHY_LAB_PURE_PYTHON`` is set.
"""

import numpy as np

NAME = "python"

# cap on the size of the (blocks x terms x terms) temporaries
_MAX_ELEMS = 4_000_000


def schur_psd(H, rows, cols, vars_, coefs, W):
    """Accumulate ``H[i, j] += sum_k tr(F_ik W_k F_jk W_k)`` in place.

    ``rows/cols/vars_/coefs`` are ``(K, T)`` term arrays of a stack of
    same-size blocks (padding terms carry coefficient 0); ``W`` is ``(K, s, s)``.
    Term ``t`` contributes ``coefs[k, t]`` at ``(rows[k, t], cols[k, t])`` of
    the matrix multiplying variable ``vars_[k, t]``.
    """
    K, T = rows.shape
    if K == 0 or T == 0:
        return
    m = H.shape[0]
    flat = H.reshape(-1)
    per_block = T * T
    if per_block <= _MAX_ELEMS:
        step = max(1, _MAX_ELEMS // per_block)
        for k0 in range(0, K, step):
            sl = slice(k0, k0 + step)
            _accumulate(flat, m, rows[sl], cols[sl], vars_[sl], coefs[sl], W[sl], rows[sl], cols[sl], vars_[sl], coefs[sl])
        return
    tstep = max(1, _MAX_ELEMS // T)
    for k in range(K):
        sl = slice(k, k + 1)
        for t0 in range(0, T, tstep):
            ts = slice(t0, t0 + tstep)
            _accumulate(flat, m, rows[sl, ts], cols[sl, ts], vars_[sl, ts], coefs[sl, ts], W[sl], rows[sl], cols[sl], vars_[sl], coefs[sl])


def _accumulate(flat, m, r1, c1, v1, w1, W, r2, c2, v2, w2):
    kk = np.arange(W.shape[0])[:, None, None]
    # W[k, b_t, a_u] * W[k, b_u, a_t]
    left = W[kk, c1[:, :, None], r2[:, None, :]]
    right = W[kk, c2[:, None, :], r1[:, :, None]]
    vals = w1[:, :, None] * w2[:, None, :] * left * right
    idx = v1[:, :, None] * m + v2[:, None, :]
    flat += np.bincount(idx.ravel(), weights=vals.ravel(), minlength=m * m)
