# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled monodromy kernels; contract mirrors _kernels_py exactly."""

import numpy as np


def monodromy_coeffs(p_in, q_in):
    """Coefficient arrays (constant-first, length n+1) of A, B, C, D."""
    p_arr = np.ascontiguousarray(p_in, dtype=np.float64)
    q_arr = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] q = q_arr
    cdef Py_ssize_t n = p.shape[0]
    x_arr = np.exp(q_arr)
    cdef double[::1] x = x_arr

    a_arr = np.zeros(n + 1)
    b_arr = np.zeros(n + 1)
    c_arr = np.zeros(n + 1)
    d_arr = np.zeros(n + 1)
    w_arr = np.zeros(4 * (n + 1))
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef double[::1] c = c_arr
    cdef double[::1] d = d_arr
    cdef double[::1] w = w_arr

    cdef Py_ssize_t j, k
    cdef double pj, xj, ixj
    cdef Py_ssize_t na = 0, nb = n + 1, nc = 2 * (n + 1), nd = 3 * (n + 1)

    a[1] = 1.0
    a[0] = -p[0]
    b[0] = x[0]
    c[0] = -1.0 / x[0]
    for j in range(1, n):
        pj = p[j]
        xj = x[j]
        ixj = 1.0 / xj
        for k in range(n, -1, -1):
            w[na + k] = (a[k - 1] if k > 0 else 0.0) - pj * a[k] + xj * c[k]
            w[nb + k] = (b[k - 1] if k > 0 else 0.0) - pj * b[k] + xj * d[k]
            w[nc + k] = -a[k] * ixj
            w[nd + k] = -b[k] * ixj
        for k in range(n + 1):
            a[k] = w[na + k]
            b[k] = w[nb + k]
            c[k] = w[nc + k]
            d[k] = w[nd + k]
    return a_arr, b_arr, c_arr, d_arr


def tvec_and_grads(p_in, q_in):
    """Trace coefficients and their exact phase-space gradients.

    Returns (t, dtp, dtq) with the same shapes and conventions as the
    pure reference implementation.
    """
    p_arr = np.ascontiguousarray(p_in, dtype=np.float64)
    q_arr = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] q = q_arr
    cdef Py_ssize_t n = p.shape[0]
    x_arr = np.exp(q_arr)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t m = 2 * n, w = n + 1

    a_arr = np.zeros(w)
    b_arr = np.zeros(w)
    c_arr = np.zeros(w)
    d_arr = np.zeros(w)
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef double[::1] c = c_arr
    cdef double[::1] d = d_arr
    ta_arr = np.zeros((m, w))
    tb_arr = np.zeros((m, w))
    tc_arr = np.zeros((m, w))
    td_arr = np.zeros((m, w))
    cdef double[:, ::1] ta = ta_arr
    cdef double[:, ::1] tb = tb_arr
    cdef double[:, ::1] tc = tc_arr
    cdef double[:, ::1] td = td_arr
    buf_arr = np.zeros((4, w))
    cdef double[:, ::1] buf = buf_arr
    tbuf_arr = np.zeros((4, m, w))
    cdef double[:, :, ::1] tbuf = tbuf_arr

    cdef Py_ssize_t j, k, r
    cdef double pj, xj, ixj

    a[1] = 1.0
    a[0] = -p[0]
    b[0] = x[0]
    c[0] = -1.0 / x[0]
    ta[0, 0] = -1.0
    tb[n, 0] = x[0]
    tc[n, 0] = 1.0 / x[0]

    for j in range(1, n):
        pj = p[j]
        xj = x[j]
        ixj = 1.0 / xj
        for k in range(w):
            buf[0, k] = (a[k - 1] if k > 0 else 0.0) - pj * a[k] + xj * c[k]
            buf[1, k] = (b[k - 1] if k > 0 else 0.0) - pj * b[k] + xj * d[k]
            buf[2, k] = -a[k] * ixj
            buf[3, k] = -b[k] * ixj
        for r in range(m):
            for k in range(w):
                tbuf[0, r, k] = (ta[r, k - 1] if k > 0 else 0.0) \
                    - pj * ta[r, k] + xj * tc[r, k]
                tbuf[1, r, k] = (tb[r, k - 1] if k > 0 else 0.0) \
                    - pj * tb[r, k] + xj * td[r, k]
                tbuf[2, r, k] = -ta[r, k] * ixj
                tbuf[3, r, k] = -tb[r, k] * ixj
        for k in range(w):
            tbuf[0, j, k] -= a[k]
            tbuf[0, n + j, k] += xj * c[k]
            tbuf[1, j, k] -= b[k]
            tbuf[1, n + j, k] += xj * d[k]
            tbuf[2, n + j, k] += a[k] * ixj
            tbuf[3, n + j, k] += b[k] * ixj
        for k in range(w):
            a[k] = buf[0, k]
            b[k] = buf[1, k]
            c[k] = buf[2, k]
            d[k] = buf[3, k]
        for r in range(m):
            for k in range(w):
                ta[r, k] = tbuf[0, r, k]
                tb[r, k] = tbuf[1, r, k]
                tc[r, k] = tbuf[2, r, k]
                td[r, k] = tbuf[3, r, k]

    t = a_arr + d_arr
    dt = ta_arr + td_arr
    return t, dt[:n].T.copy(), dt[n:].T.copy()
