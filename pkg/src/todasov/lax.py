"""Monodromy matrix, conserved polynomial, and separation coordinates.

The chain of n sites with momenta p_j and positions q_j carries the site
matrices L_j(lambda) = [[lambda - p_j, e^{q_j}], [-e^{-q_j}, 0]].  Their
ordered product M = L_n ... L_1 = [[A, B], [C, D]] has det M = 1, the
trace t = A + D generates the conserved quantities, and the n-1 zeros
gamma_j of B together with Lambda_j = D(gamma_j) are the separation
coordinates.  For real phase points the gamma_j are real and confined to
the forbidden zones of t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NonRealRoot
from .exactpoly import Poly

REAL_ROOT_TOL = 1e-10


@dataclass(frozen=True)
class PhasePoint:
    p: tuple
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        if len(self.p) != len(self.q):
            raise ValueError("p and q must have equal length")
        if len(self.p) < 2:
            raise ValueError("need at least two sites")
        if not all(math.isfinite(v) for v in self.p + self.q):
            raise ValueError("phase point entries must be finite")

    @property
    def n(self) -> int:
        return len(self.p)

    @classmethod
    def from_dict(cls, d) -> "PhasePoint":
        return cls(tuple(d["p"]), tuple(d["q"]))

    def to_dict(self) -> dict:
        return {"p": list(self.p), "q": list(self.q)}

    def energy(self) -> float:
        kin = 0.5 * sum(v * v for v in self.p)
        pot = sum(math.exp(self.q[(j + 1) % self.n] - self.q[j])
                  for j in range(self.n))
        return kin + pot


@dataclass(frozen=True)
class MonodromyData:
    A: Poly
    B: Poly
    C: Poly
    D: Poly
    n: int
    b: float
    det_coeffs: list = field(repr=False)

    def det_defect(self) -> float:
        """Deviation of det M(lambda) from 1, relative to the product scale.

        AD and BC cancel to the constant 1; the meaningful error measure
        is coefficientwise deviation divided by the size of the terms
        being cancelled.
        """
        ad = self.A * self.D
        bc = self.B * self.C
        scale = max(1.0, max(abs(float(c)) for c in ad.coeffs),
                    max(abs(float(c)) for c in bc.coeffs))
        dev = [abs(self.det_coeffs[0] - 1.0)]
        dev += [abs(c) for c in self.det_coeffs[1:]]
        return max(dev) / scale


@dataclass(frozen=True)
class SovCoords:
    b: float
    gamma: tuple
    Lambda: tuple
    a1: float


def build_monodromy(x: PhasePoint) -> MonodromyData:
    a, b, c, d = kernels.monodromy_coeffs(x.p, x.q)
    A = Poly(list(a))
    B = Poly(list(b))
    C = Poly(list(c))
    D = Poly(list(d))
    det = A * D - B * C
    # b is the leading coefficient of B; with the product ordered
    # L_n ... L_1 that is e^{q_1}
    return MonodromyData(A=A, B=B, C=C, D=D, n=x.n,
                         b=float(b[x.n - 1]), det_coeffs=list(det.coeffs))


def conserved_poly(m: MonodromyData) -> Poly:
    """t(lambda) = A + D: monic of degree n.

    Coefficient of lambda^{n-1} is minus the total momentum; the
    lambda^{n-2} coefficient equals P^2/2 - H.
    """
    return m.A + m.D


def sov_coords(m: MonodromyData, tol: float = REAL_ROOT_TOL) -> SovCoords:
    """Zeros of B and the D-values there, sorted ascending.

    Roots come from companion-matrix eigenvalues with one Newton polish
    step.  A root farther than tol from the real axis means the phase
    point is outside the real Toda class and raises NonRealRoot.
    """
    roots = np.roots(list(m.B.coeffs)[::-1])
    dB = m.B.derivative()
    polished = []
    for r in roots:
        dv = dB(complex(r))
        if dv != 0:
            r = r - m.B(complex(r)) / dv
        polished.append(complex(r))
    bad = [r for r in polished if abs(r.imag) > tol]
    if bad:
        raise NonRealRoot(f"B-roots off the real axis: {bad}")
    gamma = tuple(sorted(r.real for r in polished))
    lam = tuple(float(m.D(g)) for g in gamma)
    a1 = float(m.A[m.n - 1])
    return SovCoords(b=m.b, gamma=gamma, Lambda=lam, a1=a1)


def sov_inverse_defect(m: MonodromyData, s: SovCoords) -> float:
    """Max |A(gamma_j)*Lambda_j - 1|; identically 0 in exact arithmetic."""
    worst = 0.0
    for g, l in zip(s.gamma, s.Lambda):
        worst = max(worst, abs(float(m.A(g)) * l - 1.0))
    return worst


@dataclass(frozen=True)
class RealityReport:
    zeros_real: bool
    maxima_ok: bool
    minima_ok: bool
    branch_real: bool
    degenerate: bool
    branch_points: tuple

    @property
    def passed(self) -> bool:
        return (self.zeros_real and self.maxima_ok and self.minima_ok
                and self.branch_real)


def reality_check(t: Poly, tol: float = REAL_ROOT_TOL,
                  gap_tol: float = 1e-6) -> RealityReport:
    """Reality conditions on the conserved polynomial.

    t must have n real zeros, its local maxima must lie at or above 2 and
    local minima at or below -2; then t^2 - 4 has 2n real zeros.  Branch
    points closer than gap_tol flag the curve degenerate (zones touch);
    degeneracy is reported, not raised, since boundary states are
    legitimate phase points.
    """
    tc = [float(c) for c in t.coeffs]
    zeros = np.roots(tc[::-1])
    zeros_real = bool(np.all(np.abs(zeros.imag) <= max(tol, 1e-8)))
    dt = t.derivative()
    crit = np.roots([float(c) for c in dt.coeffs][::-1]) if dt.degree >= 1 \
        else np.array([])
    d2 = dt.derivative()
    maxima_ok = True
    minima_ok = True
    for c in crit:
        if abs(c.imag) > 1e-8:
            continue
        xc = float(c.real)
        val = float(t(xc))
        curv = float(d2(xc))
        if curv < 0 and val < 2.0:
            maxima_ok = False
        if curv > 0 and val > -2.0:
            minima_ok = False
    P = t * t - Poly([4])
    proots = np.roots([float(c) for c in P.coeffs][::-1])
    scale = max(1.0, float(np.max(np.abs(proots))))
    # a double real branch point splits, under rounding, into a conjugate
    # pair with O(sqrt(eps)) imaginary parts; treat those as degenerate
    # rather than non-real
    degenerate = False
    for i in range(len(proots)):
        for j in range(i + 1, len(proots)):
            if abs(proots[i] - proots[j]) < gap_tol * scale:
                degenerate = True
    branch_real = bool(np.all(np.abs(proots.imag) <=
                              (gap_tol if degenerate else 1e-7) * scale))
    if not branch_real:
        degenerate = False
    return RealityReport(zeros_real=zeros_real, maxima_ok=maxima_ok,
                         minima_ok=minima_ok, branch_real=branch_real,
                         degenerate=degenerate,
                         branch_points=tuple(float(v.real) for v in np.sort_complex(proots)))
