"""Matrix elements of the quantized chain in the separated representation.

Between two eigenstates every observable reduces to weighted real-line
integrals of products of Baxter functions,

    integral  Q(g) Q'(g) F(g) exp(-2 pi g k / hbar) dg,

a deformation of the hyper-elliptic period integrals of the classical
curve.  This module builds the shift-difference identity polynomials
that make whole families of such integrals vanish, evaluates the
integrals themselves, assembles matrix elements as determinants of
one-fold blocks, and compares close-state matrix elements against the
classical Fourier coefficients they approach.

Integrands are handled through the transform cores: with the monic
normalization Q(g) = e^{pi g / hbar} core(g) (two sites), the weighted
product Q Q' F e^{-2 pi g k / hbar} equals core core' F e^{2 pi g (1-k)
/ hbar}, so the exponential factors never overflow and the windowing
logic can reason about the two analytic decay rates directly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .baxter import MAX_LEVELS, QFunction, build_q, solve_relative_spectrum
from .dynamics import fourier_coefficient
from .errors import ConvergenceFailure
from .exactpoly import (BiPoly, CFraction, MPoly, Poly, antisym_to_schur,
                        delta, delta_inverse)
from .spectral import build_spectral, period_matrix

WINDOW_MARGIN = 4.8
WINDOW_RTOL = 1e-7
GRID_PER_HBAR = 100

__all__ = [
    "QuantumIdentityPolys",
    "DeformedIntegralSpec",
    "QuasiClassicalState",
    "ZoneWave",
    "CloseStateReport",
    "build_quantum_identity_polys",
    "deformed_integral",
    "matrix_element",
    "quantum_prop_check",
    "contour_shift_residual",
    "quasiclassical_q",
    "close_state_compare",
]


# ---------------------------------------------------------------------------
# identity polynomials, built exactly

def _lift(p: Poly) -> Poly:
    return p.map_coeffs(lambda c: CFraction(Fraction(c)))


def _columns(bp: BiPoly):
    ny = bp.degree_y() + 1
    for j in range(ny):
        yield j, Poly([row[j] if j < len(row) else 0 for row in bp.coeffs])


def _from_columns(cols, ny) -> BiPoly:
    nx = max(p.degree for _, p in cols) + 1
    out = [[0] * ny for _ in range(nx)]
    for j, p in cols:
        for i, c in enumerate(p.coeffs):
            out[i][j] = c
    return BiPoly(out)


def _delta_inverse_x(bp: BiPoly, hb: Fraction) -> BiPoly:
    cols = [(j, delta_inverse(p, hb)) for j, p in _columns(bp)]
    return _from_columns(cols, bp.degree_y() + 1)


def _shift_x(bp: BiPoly, c) -> BiPoly:
    cols = [(j, p.shifted(c)) for j, p in _columns(bp)]
    return _from_columns(cols, bp.degree_y() + 1)


@dataclass(frozen=True)
class QuantumIdentityPolys:
    """The three vanishing-integral polynomials for a state pair.

    All coefficients are exact complex rationals (the float inputs are
    dyadic, so nothing is rounded): Dq is the shift-difference exact
    form built from L, Cq the antisymmetric two-variable kernel, Sq the
    plain difference t - t'.
    """

    Dq: Poly
    Cq: BiPoly
    Sq: Poly
    L: Poly
    hbar: Fraction


def build_quantum_identity_polys(t: Poly, tp: Poly, hbar,
                                 L: Poly = None) -> QuantumIdentityPolys:
    """Exact Dq, Cq, Sq for monic eigenvalue polynomials t, t'.

    With Di = delta_inverse at this hbar and s(g) = g - i*hbar,

      Dq = t Di(Lt) + t' Di(Lt') - t (Di(Lt') o s) - t' (Di(Lt) o s)
           - L t t' + delta(L)

    and Cq is the antisymmetrization R(x, y) - R(y, x) of the same
    combination with L replaced by the divided difference
    (t(x) - t(y)) / (x - y) in its first argument, minus the correction
    (1/2) (t(x) - t(y)) (t'(x) - t'(y)) / (x - y).
    """
    if t.degree != tp.degree or t.degree < 1:
        raise ValueError("t and t' must be monic of equal degree >= 1")
    hb = Fraction(hbar)
    if hb <= 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    t, tp = _lift(t), _lift(tp)
    L = _lift(L) if L is not None else Poly([CFraction(1)])
    ih = CFraction(0, hb)

    di_lt = delta_inverse(L * t, hb)
    di_ltp = delta_inverse(L * tp, hb)
    dq = (t * di_lt + tp * di_ltp
          - t * di_ltp.shifted(-ih) - tp * di_lt.shifted(-ih)
          - L * t * tp + delta(L, hb))

    tx, ty = BiPoly.from_x(t), BiPoly.from_y(t)
    tpx, tpy = BiPoly.from_x(tp), BiPoly.from_y(tp)
    u = (tx - ty).divexact_x_minus_y()
    up = (tpx - tpy).divexact_x_minus_y()
    di_u, di_up = _delta_inverse_x(u, hb), _delta_inverse_x(up, hb)
    r = (tx * di_u + tpx * di_up
         - tx * _shift_x(di_up, -ih) - tpx * _shift_x(di_u, -ih)
         - u * (tpx - tpy) * CFraction(Fraction(1, 2)))
    cq = r - r.swap()

    return QuantumIdentityPolys(Dq=dq, Cq=cq, Sq=t - tp, L=L, hbar=hb)


# ---------------------------------------------------------------------------
# deformed integrals

@dataclass(frozen=True)
class DeformedIntegralSpec:
    """One weighted line integral: Q, Q', polynomial factor, weight index.

    The contour is the real axis.  Convergence needs 1 <= k <= n-1: the
    weight must win against the oscillatory side (rate 2 pi k / hbar on
    the right) while losing against the decaying side (rate
    2 pi (n-k) / hbar on the left).
    """

    q: QFunction
    qp: QFunction
    F: Poly
    k: int = 1


def _poly_on(F: Poly, g: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(
        g, np.array([complex(c) for c in F.coeffs]))


def _outer_edge(*ts) -> float:
    """Largest branch-point magnitude among the curves t^2 - 4."""
    out = 0.0
    for t in ts:
        for sgn in (-2.0, 2.0):
            c = np.array([complex(x) for x in t.coeffs])
            c[0] -= sgn
            out = max(out, float(np.abs(np.roots(c[::-1])).max()))
    return out


def _weighted_line(qa, qb, F: Poly, k: int, margin: float,
                   ima: float = 0.0, imb: float = 0.0):
    """(integral, L1 mass) of Q(g+i*ima) Q'(g+i*imb) F(g) e^{-2 pi g k / hbar}.

    The window covers every branch point of both curves (the cores are
    O(sqrt(hbar)) oscillatory there, not small) plus margin/rate decay
    lengths per side; the trapezoid rule is spectrally accurate because
    the cores are transforms of compactly supported data.
    """
    hb = qa.hbar
    if qb.hbar != hb:
        raise ValueError("Q functions must share hbar")
    n = qa.t.degree
    edge = _outer_edge(qa.t, qb.t)
    lo = -(edge + margin * hb / max(n - k, 1))
    hi = edge + margin * hb / max(k, 1)
    num = int(round((hi - lo) * GRID_PER_HBAR / hb)) + 1
    g = np.linspace(lo, hi, num)
    vals = (qa.core_line(ima, lo, hi, num) * qb.core_line(imb, lo, hi, num)
            * _poly_on(F, g) * np.exp(2 * math.pi * (1 - k) * g / hb))
    if ima or imb:
        # each shifted monic prefactor contributes e^{i pi im / hbar}
        vals = vals * np.exp(1j * math.pi * (ima + imb) / hb)
    h = g[1] - g[0]
    return np.trapezoid(vals, dx=h), float(np.trapezoid(np.abs(vals), dx=h))


def deformed_integral(spec: DeformedIntegralSpec, *,
                      margin: float = WINDOW_MARGIN) -> float:
    """Evaluate the weighted line integral with a window-doubling check.

    Two windows (margin and 2*margin decay lengths past the outermost
    branch point) must agree to WINDOW_RTOL relative to the L1 mass of
    the integrand, else ConvergenceFailure.  The integrand of a real
    state pair is real up to transform noise; the real part is returned.
    """
    n = spec.q.t.degree
    if not 1 <= spec.k <= n - 1:
        raise ValueError(
            f"weight index k={spec.k} outside the convergent range "
            f"1..{n - 1}")
    i1, _ = _weighted_line(spec.q, spec.qp, spec.F, spec.k, margin)
    i2, l1 = _weighted_line(spec.q, spec.qp, spec.F, spec.k, 2 * margin)
    if l1 == 0.0:
        return 0.0
    if abs(i1 - i2) > WINDOW_RTOL * l1:
        raise ConvergenceFailure(
            f"window doubling moved the integral by "
            f"{abs(i1 - i2) / l1:.3e} (rtol {WINDOW_RTOL:g})")
    return float(i2.real)


def matrix_element(q: QFunction, qp: QFunction, F) -> float:
    """<t| F(b_1 .. b_{n-1}) |t'> as a determinant of one-fold integrals.

    The antisymmetric combination vandermonde * F(gamma) splits into
    Schur-type determinant blocks det(F_i(gamma_j)); each block then
    separates into a determinant of single integrals with column weight
    exponent j - n.  The blocks are independent (safe to farm out), but
    they are summed in extraction order so the result is deterministic.
    Realizable at n = 2, where Q data exists; F may be a plain Poly.
    """
    n = q.t.degree
    genus = n - 1
    if isinstance(F, Poly):
        if genus != 1:
            raise ValueError("pass a symmetric MPoly for genus > 1")
        F = MPoly(1, {(j,): c for j, c in enumerate(F.coeffs)})
    total = 0.0
    for block in antisym_to_schur(F, genus):
        m = np.empty((genus, genus))
        for i, fi in enumerate(block):
            for j in range(genus):
                m[i, j] = deformed_integral(
                    DeformedIntegralSpec(q, qp, fi, k=n - 1 - j))
        total += float(np.linalg.det(m))
    return total


# ---------------------------------------------------------------------------
# vanishing-integral checks

def quantum_prop_check(kind: str, q: QFunction, qp: QFunction, k: int = 1,
                       L: Poly = None, l: int = None) -> float:
    """Normalized residual of one vanishing-integral identity.

    P1pp: integral of Q Q' Dq(L) with weight k (proven for any
    1 <= k <= n-1).  P2pp: the double integral against Cq with weights
    (k, l); P3pp: the single integral against Sq = t - t'.  The stated
    ranges for the latter two are strict (1 < k, l < n-1), which is
    empty at n = 2; the residual is computed for any weights in the
    convergent range 1..n-1 and simply reported, since orthogonality
    (the k = 1 case of P3pp) plainly holds.  Residuals are normalized
    by the L1 mass of the integrand, so 0 means exact cancellation.
    """
    n = q.t.degree
    if l is None:
        l = k
    for name, v in (("k", k), ("l", l)):
        if not 1 <= v <= n - 1:
            raise ValueError(f"{name}={v} outside the convergent range "
                             f"1..{n - 1}")
    polys = build_quantum_identity_polys(q.t, qp.t, q.hbar, L)
    if kind == "P1pp":
        i2, l1 = _weighted_line(q, qp, polys.Dq, k, WINDOW_MARGIN)
        return abs(i2) / l1 if l1 else 0.0
    if kind == "P3pp":
        i2, l1 = _weighted_line(q, qp, polys.Sq, k, WINDOW_MARGIN)
        return abs(i2) / l1 if l1 else 0.0
    if kind == "P2pp":
        moments = {}
        for kk in {k, l}:
            deg = max(polys.Cq.degree_x(), polys.Cq.degree_y())
            moments[kk] = [_weighted_line(q, qp, Poly.monomial(m) if m
                                          else Poly([1]), kk, WINDOW_MARGIN)
                           for m in range(deg + 1)]
        num = sum(complex(c) * moments[k][a][0] * moments[l][b][0]
                  for a, b, c in polys.Cq.terms())
        den = sum(abs(complex(c)) * moments[k][a][1] * moments[l][b][1]
                  for a, b, c in polys.Cq.terms())
        return abs(num) / den if den else 0.0
    raise ValueError(f"unknown identity kind {kind!r}")


def contour_shift_residual(q: QFunction, qp: QFunction, k: int = 1) -> float:
    """Two-contour check that the weight is i*hbar-periodic.

    integral Q(g + i hbar) Q'(g) w dg must equal
    integral Q(g) Q'(g - i hbar) w dg, because shifting the contour of
    the first by -i*hbar multiplies the weight by e^{2 pi i k} = 1.
    """
    n = q.t.degree
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside the convergent range 1..{n - 1}")
    one = Poly([1])
    i1, l1a = _weighted_line(q, qp, one, k, WINDOW_MARGIN, ima=q.hbar)
    i2, l1b = _weighted_line(q, qp, one, k, WINDOW_MARGIN, imb=-q.hbar)
    return abs(i1 - i2) / max(l1a, l1b)


# ---------------------------------------------------------------------------
# quasi-classical wave function

@dataclass(frozen=True)
class ZoneWave:
    """Quasi-classical Q data on one zone of the curve.

    log_lambda holds log|Lambda| on the principal branch (negative in
    the zone interior), phase the accumulated action integral from the
    left edge divided by hbar, density the |P|^{-1/4} factor.  qqc is
    the envelope-stripped real wave 2 * density * cos(phase - pi/4);
    the suppressed growth factor e^{envelope_rate * gamma} carries no
    zeros, so the oscillation structure is intact.
    """

    j: int
    hbar: float
    gamma: np.ndarray
    log_lambda: np.ndarray
    phase: np.ndarray
    density: np.ndarray
    qqc: np.ndarray
    total_phase: float
    envelope_rate: float

    def predicted_zeros(self) -> np.ndarray:
        """Zeros from the phase condition phase = pi (m + 3/4).

        The offset follows from the quarter-wave connection at the zone
        edges; with the quantization condition total_phase is close to
        pi (n_j + 1/2), so exactly n_j zeros fit in the zone.
        """
        count = int(self.total_phase / math.pi - 0.75) + 1
        targets = math.pi * (np.arange(max(count, 0)) + 0.75)
        return np.interp(targets, self.phase, self.gamma)


@dataclass(frozen=True)
class QuasiClassicalState:
    t: Poly
    hbar: float
    zones: tuple

    @property
    def bs_numbers(self) -> tuple:
        """Per zone, total_phase / pi - 1/2: near-integer when the
        quantization condition holds."""
        return tuple(z.total_phase / math.pi - 0.5 for z in self.zones)

    def zone(self, j: int) -> ZoneWave:
        return self.zones[j - 1]


def quasiclassical_q(t: Poly, hbar: float, nodes: int = 4001
                     ) -> QuasiClassicalState:
    """Quasi-classical Q on every zone of the classical curve t^2 - 4.

    On zone j the branch of log Lambda continued from the rightmost cut
    is log|Lambda| + i pi (n - j); the imaginary part exponentiates to
    the real envelope e^{pi (n-j) gamma / hbar}, the real part to the
    oscillation.  Samples avoid the zone edges where the density
    diverges (integrably).  Useful when t approximately satisfies the
    quantization condition; bs_numbers reports how nearly it does.
    """
    if hbar <= 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    s = build_spectral(t)
    n = s.n
    tc = np.array([float(c) for c in t.coeffs])
    zones = []
    for j in range(1, n):
        a, b = s.zone(j)
        mid, rho = (a + b) / 2.0, (b - a) / 2.0
        u = np.linspace(-math.pi / 2, math.pi / 2, nodes)
        gam = mid + rho * np.sin(u)
        tv = np.polynomial.polynomial.polyval(gam, tc)
        pv = np.maximum(tv * tv - 4.0, 0.0)
        # of the two Floquet branches (t -+ sqrt(P))/2 the one continued
        # into the gap has modulus (|t| - sqrt(P))/2 <= 1
        lam = (np.abs(tv) - np.sqrt(pv)) / 2.0
        w = -np.log(np.maximum(lam, 1e-300))
        w = np.maximum(w, 0.0)
        integ = w * rho * np.cos(u)
        acc = np.concatenate(
            [[0.0], np.cumsum((integ[1:] + integ[:-1]) / 2.0 * np.diff(u))])
        phase = acc / hbar
        core = slice(1, -1)
        dens = pv[core] ** -0.25
        zones.append(ZoneWave(
            j=j, hbar=hbar, gamma=gam[core], log_lambda=-w[core],
            phase=phase[core], density=dens,
            qqc=2.0 * dens * np.cos(phase[core] - math.pi / 4),
            total_phase=float(phase[-1]),
            envelope_rate=math.pi * (n - j) / hbar))
    return QuasiClassicalState(t=t, hbar=hbar, zones=tuple(zones))


# ---------------------------------------------------------------------------
# close states against classical Fourier data

@dataclass(frozen=True)
class CloseStateReport:
    """Quantum matrix element vs classical Fourier coefficient.

    me_normalized is <t|F|t'> / sqrt(<t|t> <t'|t'>); fourier_coeff the
    coefficient of F at the k-th angle harmonic on the level's curve
    (its phase depends on the angle origin, so deviation compares
    magnitudes).  dt2 and its prediction hbar * k * A_11 check the
    eigenvalue shift against the period matrix; both are signed.
    """

    hbar: float
    level: int
    k: int
    me_normalized: float
    fourier_coeff: complex
    deviation: float
    dt2: float
    dt2_predicted: float
    spacing_rel: float


def close_state_compare(hbar: float, level: int, k: int = 1,
                        F: Poly = None) -> CloseStateReport:
    """Compare <level| F |level+k> with the classical k-th Fourier mode.

    Works on the two-site relative problem.  k = 0 degenerates to the
    diagonal expectation value against the classical time average.
    """
    if k < 0 or level < 0:
        raise ValueError("level and k must be nonnegative")
    if level + k > MAX_LEVELS - 1:
        raise ValueError(
            f"level+k={level + k} beyond the resolvable {MAX_LEVELS - 1}")
    if F is None:
        F = Poly([0, 1])
    pairs = solve_relative_spectrum(hbar, level + k + 1)
    qa = build_q(pairs[level])
    qb = qa if k == 0 else build_q(pairs[level + k])
    me = matrix_element(qa, qb, F)
    na = matrix_element(qa, qa, Poly([1]))
    nb = na if k == 0 else matrix_element(qb, qb, Poly([1]))
    me_norm = me / math.sqrt(na * nb)

    s = build_spectral(pairs[level].t)
    ck = fourier_coefficient(s, F, [k] if k else None)
    deviation = abs(abs(me_norm) - abs(ck)) / max(abs(ck), 1e-15)

    if k == 0:
        dt2 = pred = 0.0
        spacing_rel = 0.0
    else:
        dt2 = float(pairs[level + k].t.coeffs[0] - pairs[level].t.coeffs[0])
        e_mid = (pairs[level].E + pairs[level + k].E) / 2.0
        a11 = period_matrix(build_spectral(Poly([-e_mid, 0.0, 1.0]))).A[0, 0]
        pred = hbar * k * float(a11.real)
        spacing_rel = abs(dt2 - pred) / abs(pred)
    return CloseStateReport(
        hbar=hbar, level=level, k=k, me_normalized=me_norm,
        fourier_coeff=complex(ck), deviation=deviation,
        dt2=dt2, dt2_predicted=pred, spacing_rel=spacing_rel)
