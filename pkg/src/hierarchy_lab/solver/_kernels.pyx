# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels for the interior-point solver."""

NAME = "compiled"


def schur_psd(double[:, ::1] H, const long[:, ::1] rows, const long[:, ::1] cols,
              const long[:, ::1] vars_, const double[:, ::1] coefs,
              const double[:, :, ::1] W):
    """Accumulate ``H[i, j] += sum_k tr(F_ik W_k F_jk W_k)`` in place (see _kernels_py)."""
    cdef Py_ssize_t K = rows.shape[0]
    cdef Py_ssize_t T = rows.shape[1]
    cdef Py_ssize_t k, t, u
    cdef long at, bt, au, bu, vt, vu
    cdef double ct, cu, val
    with nogil:
        for k in range(K):
            for t in range(T):
                ct = coefs[k, t]
                if ct == 0.0:
                    continue
                at = rows[k, t]
                bt = cols[k, t]
                vt = vars_[k, t]
                for u in range(t, T):
                    cu = coefs[k, u]
                    if cu == 0.0:
                        continue
                    au = rows[k, u]
                    bu = cols[k, u]
                    vu = vars_[k, u]
                    val = ct * cu * W[k, bt, au] * W[k, bu, at]
                    H[vt, vu] += val
                    if u != t:
                        H[vu, vt] += val
