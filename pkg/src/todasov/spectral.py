"""Spectral curves and a-cycle quadrature for the periodic chain.

The conserved polynomial t (monic, degree n, real zeros) defines the
hyperelliptic curve mu^2 = P(lambda) with P = t^2 - 4 and 2n real branch
points.  P is positive on the n-1 bounded gaps between the bands where
|t| <= 2; the separation variables oscillate across these gaps, and a
gap traversed twice (once per sheet) is an a-cycle.  Everything here is
quadrature over those loops: raw periods, normalized differentials and
their phase functions, classical actions, and the vanishing identities
the rest of the package leans on.

Loop convention, used consistently throughout.  On the cycle over gap j
(1-based) the curve is parameterized as

    gamma(u) = c + r sin u,    y(u) = sgn_j r cos(u) sqrt(-Rest(gamma(u)))

for u in [-pi, pi), where c and r are the gap midpoint and half-width,
Rest = P / ((gamma - left)(gamma - right)) is negative inside the gap,
and sgn_j = (-1)^(n-j) is the sign of t there.  The half sweep |u| < pi/2
runs left to right on the bank where (t + y)/2 is the eigenvalue of
larger modulus.  Division of a 1/sqrt(P) form by dgamma/du = r cos u
cancels the cos exactly, so integrands smooth on the curve become smooth
2pi-periodic functions of u and the trapezoid rule converges spectrally.
Every integral is computed twice, at N and 2N nodes, and the pair must
agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import DegenerateCurve, NonRealRoot, QuadratureFailure
from .exactpoly import BiPoly, CFraction, Poly, divided_difference
from .lax import reality_check

QUAD_NODES = 256
QUAD_RTOL = 1e-9

LOOP_KINDS = ("P1", "P2", "P1p", "P2p", "P3p")


@dataclass(frozen=True)
class SpectralData:
    """Curve data: conserved polynomial, P = t^2 - 4, sorted branch points."""

    t: Poly
    P: Poly
    branch: tuple
    genus: int
    degenerate: bool

    @property
    def n(self) -> int:
        return len(self.branch) // 2

    def zone(self, j: int):
        """Endpoints of gap j (1-based): the branch points lambda_{2j}, lambda_{2j+1}."""
        if not 1 <= j <= self.genus:
            raise ValueError(f"cycle index {j} outside 1..{self.genus}")
        return self.branch[2 * j - 1], self.branch[2 * j]

    def zone_sign(self, j: int) -> int:
        # sign of t on gap j, equal to the sign of sqrt(P) continued from
        # +infinity through the upper half plane
        return -1 if (self.n - j) % 2 else 1


def build_spectral(t: Poly, allow_degenerate: bool = False) -> SpectralData:
    """Build the curve mu^2 = t^2 - 4 for a conserved polynomial t.

    t must satisfy the reality conditions: n real zeros, local maxima at
    or above 2, local minima at or below -2.  Branch points then are real
    and simple except at band edges touching a gap endpoint; such
    degenerate curves are rejected because the period integrals diverge,
    unless the caller opts in.
    """
    rep = reality_check(t)
    if not (rep.zeros_real and rep.branch_real):
        raise NonRealRoot("polynomial violates the reality conditions")
    if not (rep.maxima_ok and rep.minima_ok):
        raise NonRealRoot("a critical value of t lies inside (-2, 2)")
    if rep.degenerate and not allow_degenerate:
        raise DegenerateCurve("two branch points closer than tolerance")
    return SpectralData(t=t, P=t * t - 4, branch=rep.branch_points,
                        genus=t.degree - 1, degenerate=rep.degenerate)


# ---------------------------------------------------------------------------
# loop sampling


@dataclass(frozen=True)
class _Loop:
    gam: np.ndarray
    dgam: np.ndarray        # dgamma/du = r cos u
    root_mrest: np.ndarray  # sqrt(-Rest(gamma(u))) > 0
    sgn: int
    u: np.ndarray


def _grid(nodes: int) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(nodes) / nodes


def _loop_samples(s: SpectralData, j: int, nodes: int) -> _Loop:
    if s.degenerate:
        raise DegenerateCurve("cycle quadrature on a degenerate curve")
    lo, hi = s.zone(j)
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    u = _grid(nodes)
    gam = c + r * np.sin(u)
    others = [b for i, b in enumerate(s.branch) if i not in (2 * j - 1, 2 * j)]
    mrest = -np.prod(np.subtract.outer(gam, np.array(others)), axis=1)
    if not np.all(mrest > 0.0):
        raise QuadratureFailure("a branch point intrudes into the gap")
    return _Loop(gam=gam, dgam=r * np.cos(u), root_mrest=np.sqrt(mrest),
                 sgn=s.zone_sign(j), u=u)


def _ccoeffs(p: Poly) -> np.ndarray:
    return np.array([complex(c) for c in p.coeffs])


def _fcoeffs(p: Poly) -> np.ndarray:
    return _ccoeffs(p).real


def _cc2(f: BiPoly) -> np.ndarray:
    out = np.zeros((f.degree_x() + 1, f.degree_y() + 1), complex)
    for i, j, c in f.terms():
        out[i, j] = complex(c)
    return out


def _even(nodes) -> int:
    nn = max(8, int(nodes))
    return nn + (nn % 2)


# ---------------------------------------------------------------------------
# phase functions


def _phase_samples(dphi_du: np.ndarray):
    """Antiderivative of smooth periodic samples, pinned to 0 at u = 0.

    Returns (phi, winding).  The mean of dphi/du is the winding number of
    e^{i phi} around the loop; for phases built from the normalized
    differentials it must sit next to an integer, and it is snapped there
    so the weight stays exactly periodic.
    """
    nn = len(dphi_du)
    fh = np.fft.rfft(dphi_du)
    mean = fh[0].real / nn
    wind = round(mean)
    if abs(mean - wind) > 1e-6:
        raise QuadratureFailure(
            f"phase winding {mean!r} is not close to an integer")
    fh[0] = 0.0
    m = np.arange(len(fh))
    m[0] = 1
    osc = np.fft.irfft(fh / (1j * m), nn)
    phi = wind * _grid(nn) + osc
    return phi - phi[nn // 2], wind


def _raw_matrix(s: SpectralData, nodes: int) -> np.ndarray:
    g = s.genus
    raw = np.empty((g, g))
    for j in range(1, g + 1):
        for l in range(g):
            raw[l, j - 1] = cycle_integral(s, l, j, nodes=nodes)
    return raw


def _a_matrix(s: SpectralData, nodes: int) -> np.ndarray:
    raw = _raw_matrix(s, nodes)
    try:
        return 2 * np.pi * np.linalg.inv(raw)
    except np.linalg.LinAlgError:
        raise QuadratureFailure("raw period matrix is singular") from None


def _sigma_coeffs(s: SpectralData, k, nodes: int) -> np.ndarray:
    """Coefficients of the real polynomial sigma with S_{t,k} = i sigma."""
    kv = np.asarray(k, dtype=float)
    if kv.shape != (s.genus,):
        raise ValueError(f"k-vector must have length {s.genus}")
    return kv @ _a_matrix(s, nodes)


def _lift_real(coeffs) -> Poly:
    return Poly([Fraction(float(c)) for c in coeffs])


def _lift_imag(coeffs) -> Poly:
    return Poly([CFraction(0, Fraction(float(c))) for c in coeffs])


# ---------------------------------------------------------------------------
# cycle integrals, periods, actions


def cycle_integral(s: SpectralData, m: int, j: int, phase=None,
                   nodes: int = QUAD_NODES):
    """Loop integral of gamma^m e^{i Phi_k(gamma)} / sqrt(P) over a-cycle j.

    phase is an integer vector of length genus (or None for no weight);
    the phase function Phi_k is the cumulative integral of sum k_l omega_l
    along the loop from the gap midpoint.  Returns a float, or a complex
    number when a phase is given.  The integral is evaluated at `nodes`
    and 2*`nodes` points; disagreement raises QuadratureFailure.
    """
    nodes = _even(nodes)
    sig = _sigma_coeffs(s, phase, nodes) if phase is not None else None
    vals = []
    l1 = 1.0
    for nn in (nodes, 2 * nodes):
        lp = _loop_samples(s, j, nn)
        f = lp.gam ** m * (lp.sgn / lp.root_mrest)
        if sig is not None:
            phi, _ = _phase_samples(
                npp.polyval(lp.gam, sig) * lp.sgn / lp.root_mrest)
            f = f * np.exp(1j * phi)
        h = 2 * np.pi / nn
        vals.append(h * f.sum())
        l1 = h * np.abs(f).sum()
    if abs(vals[0] - vals[1]) > QUAD_RTOL * max(l1, 1.0):
        raise QuadratureFailure(
            f"cycle integral m={m} j={j} did not converge: "
            f"{vals[0]!r} vs {vals[1]!r}")
    return vals[1] if phase is not None else float(vals[1].real
                                                   if np.iscomplexobj(vals[1])
                                                   else vals[1])


@dataclass(frozen=True)
class PeriodData:
    """Raw a-periods, the normalization matrix A, and the actions.

    rawPeriods[l][j-1] is the loop integral of gamma^l / sqrt(P) over
    a_j; A = 2 pi (rawPeriods)^{-1}, so row k of A holds the polynomial
    coefficients of the normalized differential omega_k and
    (1/2pi) * integral of omega_k over a_j = delta_{jk} by construction.
    """

    rawPeriods: np.ndarray
    A: np.ndarray
    J: tuple
    sTk: dict = field(default_factory=dict, repr=False, compare=False)

    def s_tk(self, k) -> Poly:
        """Exact polynomial S_{t,k} = i sum_j k_j omega_j-numerator.

        Coefficients are purely imaginary; the real companion sigma with
        S = i sigma is what the identity builders consume.
        """
        key = tuple(int(v) for v in k)
        if len(key) != self.A.shape[0]:
            raise ValueError(f"k-vector must have length {self.A.shape[0]}")
        if key not in self.sTk:
            kv = np.asarray(key, dtype=float)
            self.sTk[key] = _lift_imag(kv @ self.A)
        return self.sTk[key]


def period_matrix(s: SpectralData, nodes: int = QUAD_NODES) -> PeriodData:
    nodes = _even(nodes)
    raw = _raw_matrix(s, nodes)
    try:
        A = 2 * np.pi * np.linalg.inv(raw)
    except np.linalg.LinAlgError:
        raise QuadratureFailure("raw period matrix is singular") from None
    return PeriodData(rawPeriods=raw, A=A,
                      J=tuple(classical_actions(s, nodes=nodes)))


def classical_actions(s: SpectralData, nodes: int = QUAD_NODES):
    """Actions J_j = loop integral of log Lambda d gamma, one per gap.

    Lambda = (t + y)/2 is the monodromy eigenvalue; on the loop its
    modulus is (|t| + sqrt P)/2 >= 1 on the outbound bank and the
    reciprocal coming back, while arg Lambda is the constant pi(n - j),
    which integrates to zero around the closed loop.  Hence only
    log|Lambda| enters and J_j is real; with the left-to-right outbound
    orientation it is positive, and dJ_j / dt_m equals the raw period of
    gamma^{n-m}.
    """
    nodes = _even(nodes)
    tc = _fcoeffs(s.t)
    out = []
    for j in range(1, s.genus + 1):
        pair = []
        l1 = 1.0
        for nn in (nodes, 2 * nodes):
            lp = _loop_samples(s, j, nn)
            y = lp.sgn * lp.dgam * lp.root_mrest
            f = np.log(0.5 * np.abs(npp.polyval(lp.gam, tc) + y)) * lp.dgam
            h = 2 * np.pi / nn
            pair.append(h * f.sum())
            l1 = h * np.abs(f).sum()
        if abs(pair[0] - pair[1]) > QUAD_RTOL * max(l1, 1.0):
            raise QuadratureFailure(f"action J_{j} did not converge")
        out.append(float(pair[1]))
    return out


# ---------------------------------------------------------------------------
# identity kernels, built exactly


def build_dt(P: Poly, L: Poly) -> Poly:
    """Exact-form kernel P L' + P' L / 2: sqrt(P) times (sqrt(P) L)'."""
    return P * L.derivative() + P.derivative() * L * Fraction(1, 2)


def build_ct(P: Poly) -> BiPoly:
    """Antisymmetric bilinear kernel of the intersection pairing.

    The numerator (x - y)(P'(x) + P'(y))/2 - P(x) + P(y) vanishes to
    second order on the diagonal, so the division below is exact.
    """
    dph = P.derivative() * Fraction(1, 2)
    x_minus_y = BiPoly([[0, -1], [1]])
    num = (BiPoly.from_x(dph) + BiPoly.from_y(dph)) * x_minus_y \
        - (BiPoly.from_x(P) - BiPoly.from_y(P))
    return num.divexact_x_minus_y().divexact_x_minus_y()


def build_dtk(P: Poly, L: Poly, sigma: Poly) -> Poly:
    """Deformed exact-form kernel.

    With S = i sigma the definition reads D_t(L) - S * int_0^gamma L S;
    the two factors of i make the correction real:
    D_t(L) + sigma * int_0^gamma L sigma.
    """
    return build_dt(P, L) + sigma * (L * sigma).antiderivative()


def build_ctk(P: Poly, sigma: Poly) -> BiPoly:
    """Deformed bilinear kernel; path integrals are exact antiderivatives.

    psi(x, y) = int_0^x (sigma(g) - sigma(y)) / (g - y) dg is polynomial,
    and the correction sigma(x) psi(x, y) - sigma(y) psi(y, x) keeps the
    kernel antisymmetric.
    """
    psi = divided_difference(sigma).antiderivative_x()
    corr = BiPoly.from_x(sigma) * psi
    return build_ct(P) + corr - corr.swap()


# ---------------------------------------------------------------------------
# residuals


def _loop_residual(s, j, F: Poly, k, nodes: int) -> float:
    cf = _ccoeffs(F)
    sig = _sigma_coeffs(s, k, nodes) if k is not None else None
    vals = []
    l1 = 1e-300
    for nn in (nodes, 2 * nodes):
        lp = _loop_samples(s, j, nn)
        f = npp.polyval(lp.gam, cf) * (lp.sgn / lp.root_mrest)
        if sig is not None:
            phi, _ = _phase_samples(
                npp.polyval(lp.gam, sig) * lp.sgn / lp.root_mrest)
            f = f * np.exp(1j * phi)
        h = 2 * np.pi / nn
        vals.append(h * f.sum())
        l1 = max(h * np.abs(f).sum(), 1e-300)
    if abs(vals[0] - vals[1]) > QUAD_RTOL * max(l1, 1.0):
        raise QuadratureFailure(f"loop residual on cycle {j} did not converge")
    return float(abs(vals[1]) / l1)


def _double_residual(s, j1, j2, C: BiPoly, k, nodes: int) -> float:
    carr = _cc2(C)
    sig = _sigma_coeffs(s, k, nodes) if k is not None else None
    vals = []
    l1 = 1e-300
    for nn in (nodes, 2 * nodes):
        w = []
        gams = []
        for j in (j1, j2):
            lp = _loop_samples(s, j, nn)
            wj = (lp.sgn / lp.root_mrest).astype(complex)
            if sig is not None:
                phi, _ = _phase_samples(
                    npp.polyval(lp.gam, sig) * lp.sgn / lp.root_mrest)
                wj = wj * np.exp(1j * phi)
            w.append(wj)
            gams.append(lp.gam)
        cv = npp.polygrid2d(gams[0], gams[1], carr)
        h2 = (2 * np.pi / nn) ** 2
        vals.append(h2 * (w[0] @ cv @ w[1]))
        l1 = max(h2 * (np.abs(w[0]) @ np.abs(cv) @ np.abs(w[1])), 1e-300)
    if abs(vals[0] - vals[1]) > QUAD_RTOL * max(l1, 1.0):
        raise QuadratureFailure(
            f"double residual on cycles ({j1},{j2}) did not converge")
    return float(abs(vals[1]) / l1)


def prop_check_classical(s: SpectralData, kind: str, L: Poly = None,
                         G=None, k=None, cycles=None,
                         nodes: int = QUAD_NODES) -> float:
    """Residual |loop integral| / (L1 size of the integrand) for one identity.

    kind selects the family:
      P1   exact forms: D_t(L) / sqrt(P) over one cycle
      P2   bilinear: C_t(g1, g2) / (sqrt(P) sqrt(P)) over a cycle pair
      P1p  deformed exact forms: e^{i Phi_k} D_{t,k}(L) / sqrt(P)
      P2p  deformed bilinear with C_{t,k} and both phase weights
      P3p  the phase derivative itself: e^{i Phi_k} S_{t,k} / sqrt(P)

    L is the free polynomial of the exact-form kinds.  G is a reserved
    slot for the symmetric cofactor used by the trajectory-level
    equations; the loop identities do not involve it.  k is the integer
    phase vector (length genus), required for the deformed kinds.
    cycles is a cycle index for the single-loop kinds or a pair for the
    bilinear ones; defaults to 1 and (1, min(2, genus)).
    """
    if kind not in LOOP_KINDS:
        raise ValueError(f"unknown identity kind {kind!r}")
    nodes = _even(nodes)
    if kind in ("P1", "P1p", "P3p"):
        j = cycles if isinstance(cycles, int) else \
            (cycles[0] if cycles else 1)
        if kind == "P3p":
            if k is None:
                raise ValueError("P3p needs a k-vector")
            # |i sigma| = |sigma|: the prefactor i drops from the residual
            F = _lift_real(_sigma_coeffs(s, k, nodes))
            return _loop_residual(s, j, F, k, nodes)
        if L is None:
            raise ValueError(f"{kind} needs the polynomial L")
        if kind == "P1":
            return _loop_residual(s, j, build_dt(s.P, L), None, nodes)
        if k is None:
            raise ValueError("P1p needs a k-vector")
        sigma = _lift_real(_sigma_coeffs(s, k, nodes))
        return _loop_residual(s, j, build_dtk(s.P, L, sigma), k, nodes)
    if cycles is None:
        cycles = (1, min(2, s.genus))
    j1, j2 = cycles
    if kind == "P2":
        return _double_residual(s, j1, j2, build_ct(s.P), None, nodes)
    if k is None:
        raise ValueError("P2p needs a k-vector")
    sigma = _lift_real(_sigma_coeffs(s, k, nodes))
    return _double_residual(s, j1, j2, build_ctk(s.P, sigma), k, nodes)
