"""Pure numpy reference kernels for the monodromy product.

These are the hot loops of the package: building the 2x2 polynomial
monodromy M(lambda) = L_n ... L_1 site by site, and propagating
forward-mode tangents of every trace coefficient with respect to all 2n
phase-space directions for the flow right-hand sides.  The compiled
extension _flowkernel implements the same contract; todasov.kernels
picks whichever is importable.

Site matrix: L_j = [[lambda - p_j, x_j], [-1/x_j, 0]] with x_j = e^{q_j}.
Left-multiplying the running product [[A, B], [C, D]] by L_j gives

    A' = lambda*A - p_j*A + x_j*C        B' = lambda*B - p_j*B + x_j*D
    C' = -A/x_j                          D' = -B/x_j

Coefficient arrays are constant-first of fixed length n+1.
"""

import numpy as np


def monodromy_coeffs(p, q):
    """Coefficient arrays (constant-first, length n+1) of A, B, C, D."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = p.size
    x = np.exp(q)
    a = np.zeros(n + 1)
    b = np.zeros(n + 1)
    c = np.zeros(n + 1)
    d = np.zeros(n + 1)
    a[1] = 1.0
    a[0] = -p[0]
    b[0] = x[0]
    c[0] = -1.0 / x[0]
    for j in range(1, n):
        sa = np.roll(a, 1)
        sa[0] = 0.0
        sb = np.roll(b, 1)
        sb[0] = 0.0
        na = sa - p[j] * a + x[j] * c
        nb = sb - p[j] * b + x[j] * d
        nc = -a / x[j]
        nd = -b / x[j]
        a, b, c, d = na, nb, nc, nd
    return a, b, c, d


def tvec_and_grads(p, q):
    """Trace coefficients and their exact phase-space gradients.

    Returns (t, dtp, dtq): t of length n+1 (constant-first coefficients
    of A+D), dtp[k, j] = d t[k] / d p_j, dtq[k, j] = d t[k] / d q_j.
    Forward mode with one tangent row per direction; exact up to
    rounding, no finite differences anywhere.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = p.size
    x = np.exp(q)
    m = 2 * n  # tangent directions: j < n is d/dp_j, j >= n is d/dq_{j-n}
    a = np.zeros(n + 1)
    b = np.zeros(n + 1)
    c = np.zeros(n + 1)
    d = np.zeros(n + 1)
    ta = np.zeros((m, n + 1))
    tb = np.zeros((m, n + 1))
    tc = np.zeros((m, n + 1))
    td = np.zeros((m, n + 1))
    a[1] = 1.0
    a[0] = -p[0]
    b[0] = x[0]
    c[0] = -1.0 / x[0]
    ta[0, 0] = -1.0
    tb[n, 0] = x[0]
    tc[n, 0] = 1.0 / x[0]
    for j in range(1, n):
        sa = np.roll(a, 1)
        sa[0] = 0.0
        sb = np.roll(b, 1)
        sb[0] = 0.0
        sta = np.roll(ta, 1, axis=1)
        sta[:, 0] = 0.0
        stb = np.roll(tb, 1, axis=1)
        stb[:, 0] = 0.0

        na = sa - p[j] * a + x[j] * c
        nb = sb - p[j] * b + x[j] * d
        nc = -a / x[j]
        nd = -b / x[j]

        nta = sta - p[j] * ta + x[j] * tc
        nta[j] -= a
        nta[n + j] += x[j] * c
        ntb = stb - p[j] * tb + x[j] * td
        ntb[j] -= b
        ntb[n + j] += x[j] * d
        ntc = -ta / x[j]
        ntc[n + j] += a / x[j]
        ntd = -tb / x[j]
        ntd[n + j] += b / x[j]

        a, b, c, d = na, nb, nc, nd
        ta, tb, tc, td = nta, ntb, ntc, ntd
    t = a + d
    dt = ta + td
    return t, dt[:n].T.copy(), dt[n:].T.copy()
