"""Commuting flows, Abel linearization, and trajectory-level identities.

Each coefficient of the conserved polynomial generates a Hamiltonian
flow; the time of flow l belongs to the coefficient of lambda^{n-l-1}.
Along any of these flows the separation variables gamma_j oscillate
inside their gaps, the signed square root of P at gamma_j is read off
the monodromy as Lambda_j - 1/Lambda_j, and the Abel map turns the whole
motion into straight lines on the torus of angles.  The second half of
the module checks the partial differential equations satisfied by
symmetric functions of the gamma_j, with multi-time derivatives realized
by finite-difference stencils over small grids of commuting flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npp
from scipy.integrate import solve_ivp

from . import kernels
from .errors import QuadratureFailure, StepFailure
from .exactpoly import BiPoly, Poly, divided_difference
from .lax import PhasePoint, build_monodromy, conserved_poly, sov_coords
from .spectral import (QUAD_NODES, SpectralData, _even, _loop_samples,
                       _phase_samples, build_ct, build_dt, build_spectral,
                       period_matrix)

FLOW_RTOL = 1e-11
STENCIL_RTOL = 1e-13

PDE_KINDS = ("EXFO", "C", "Q", "WEI")


def _rhs(n: int, row: int):
    def f(_tau, z):
        _t, dtp, dtq = kernels.tvec_and_grads(z[:n], z[n:])
        return np.concatenate([-dtq[row], dtp[row]])
    return f


def _integrate(z0: np.ndarray, n: int, flow: int, duration: float,
               tolerance: float, t_eval=None):
    sol = solve_ivp(_rhs(n, n - flow - 1), (0.0, duration), z0,
                    method="RK45", rtol=tolerance,
                    atol=tolerance * 1e-2, t_eval=t_eval)
    if not sol.success:
        raise StepFailure(f"flow {flow} stalled: {sol.message}")
    return sol


@dataclass(frozen=True)
class Trajectory:
    """Samples of one commuting flow: phase points, separation data, t."""

    flow: int
    times: np.ndarray
    points: tuple
    sov: tuple
    tcoeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.points[0].n

    def conservation_defect(self) -> float:
        return float(np.max(np.abs(self.tcoeffs - self.tcoeffs[0])))

    def gamma_array(self) -> np.ndarray:
        return np.array([sc.gamma for sc in self.sov])

    def sqrtp_array(self) -> np.ndarray:
        """Signed sqrt(P)(gamma_j): Lambda_j - 1/Lambda_j, smooth in tau."""
        return np.array([[lam - 1.0 / lam for lam in sc.Lambda]
                         for sc in self.sov])

    def endpoint(self) -> PhasePoint:
        return self.points[-1]


def hamiltonian_flow(x0: PhasePoint, flow: int, duration: float,
                     tolerance: float = FLOW_RTOL,
                     samples: int = 2001) -> Trajectory:
    """Integrate the flow of the coefficient Hamiltonian t_{flow+1}.

    dq_i/dtau = dt_{flow+1}/dp_i and dp_i/dtau = -dt_{flow+1}/dq_i, with
    the gradients exact from forward-mode differentiation of the
    monodromy product.  Returns uniformly sampled data; conservation of
    every coefficient is the caller's check via conservation_defect().
    """
    n = x0.n
    if not 1 <= flow <= n - 1:
        raise ValueError(f"flow index {flow} outside 1..{n - 1}")
    z0 = np.array(x0.p + x0.q)
    if duration == 0.0:
        zs = z0[None, :]
        times = np.zeros(1)
    else:
        times = np.linspace(0.0, duration, max(2, samples))
        sol = _integrate(z0, n, flow, duration, tolerance, t_eval=times)
        zs = sol.y.T
    pts, sovs, tc = [], [], []
    for z in zs:
        pt = PhasePoint(tuple(z[:n]), tuple(z[n:]))
        m = build_monodromy(pt)
        pts.append(pt)
        sovs.append(sov_coords(m))
        tc.append([float(c) for c in conserved_poly(m).coeffs])
    return Trajectory(flow=flow, times=times, points=tuple(pts),
                      sov=tuple(sovs), tcoeffs=np.array(tc))


def flow_endpoint(x0: PhasePoint, flow: int, duration: float,
                  tolerance: float = FLOW_RTOL) -> PhasePoint:
    """Endpoint only, no sampling; the workhorse of the stencil grids."""
    if duration == 0.0:
        return x0
    n = x0.n
    sol = _integrate(np.array(x0.p + x0.q), n, flow, duration, tolerance)
    z = sol.y[:, -1]
    return PhasePoint(tuple(z[:n]), tuple(z[n:]))


# ---------------------------------------------------------------------------
# equations of motion in separation variables


def _lagrange_parts(g_row: np.ndarray, l: int) -> np.ndarray:
    """Per root j: coeff of lambda^{n-1-l} in prod_{k != j}(lambda - g_k)
    divided by prod_{k != j}(g_j - g_k)."""
    out = np.empty(len(g_row))
    for j in range(len(g_row)):
        others = np.delete(g_row, j)
        c = np.atleast_1d(np.poly(others))
        out[j] = c[l - 1] / np.prod(g_row[j] - others)
    return out


def em_residual(traj: Trajectory, stride: int = 1) -> float:
    """Max gap between finite-difference d gamma/d tau and the flow formula.

    The formula: dgamma_j/dtau_l = (Lambda_j - 1/Lambda_j) times the
    lambda^{n-1-l} coefficient of prod_{k != j}(lambda - gamma_k) over
    prod_{k != j}(gamma_j - gamma_k).  Near a turning point both sides
    vanish together, so no samples need excluding.  stride widens the
    difference step for convergence-order measurements.
    """
    if len(traj.times) < 2 * stride + 1:
        raise ValueError("trajectory too short for the requested stride")
    g = traj.gamma_array()
    v = traj.sqrtp_array()
    h = (traj.times[1] - traj.times[0]) * stride
    fd = (g[2 * stride:] - g[:-2 * stride]) / (2.0 * h)
    worst = 0.0
    for i in range(fd.shape[0]):
        row = g[i + stride]
        pred = v[i + stride] * _lagrange_parts(row, traj.flow)
        worst = max(worst, float(np.max(np.abs(fd[i] - pred))))
    return worst


# ---------------------------------------------------------------------------
# Abel map


class AbelMap:
    """Angle coordinates theta_j of a separation configuration.

    theta_j sums, over the cycles, the integral of the normalized
    differential omega_j from each gap midpoint to the current position
    of gamma_k on its loop.  A configuration sits on the principal bank
    of loop k (the larger-eigenvalue side) exactly when the sign of
    Lambda_k - 1/Lambda_k matches the zone sign; that fixes the loop
    angle, and the integral is evaluated spectrally from the Fourier
    data of omega_j restricted to the loop.
    """

    def __init__(self, s: SpectralData, pd=None, nodes: int = QUAD_NODES):
        self.s = s
        self.pd = pd if pd is not None else period_matrix(s, nodes=nodes)
        nn = _even(nodes)
        g = s.genus
        self._loops = []
        for k in range(1, g + 1):
            lp = _loop_samples(s, k, nn)
            lo, hi = s.zone(k)
            wind = np.empty(g)
            # coef[m-1, j] reconstructs the oscillating part of the
            # phase of omega_{j+1} along loop k; scale 2/nn except at
            # the Nyquist mode
            M = nn // 2
            coef = np.empty((M, g), complex)
            scale = np.full(M, 2.0 / nn)
            scale[-1] = 1.0 / nn
            for j in range(g):
                dphi = npp.polyval(lp.gam, self.pd.A[j]) \
                    * lp.sgn / lp.root_mrest
                fh = np.fft.rfft(dphi)
                w = round(fh[0].real / nn)
                if w != (1 if j + 1 == k else 0):
                    raise QuadratureFailure(
                        f"omega_{j + 1} winds {w} times around cycle {k}")
                wind[j] = w
                m = np.arange(1, M + 1)
                coef[:, j] = fh[1:M + 1] / (1j * m) * scale
            self._loops.append({
                "c": 0.5 * (lo + hi), "r": 0.5 * (hi - lo),
                "sgn": lp.sgn, "wind": wind, "coef": coef,
                "osc_pi": (np.exp(1j * np.pi * np.arange(1, M + 1))
                           @ coef).real,
            })

    def angles(self, gammas, branches) -> np.ndarray:
        """Angles for a batch: gammas, branches of shape (m, genus)."""
        gammas = np.atleast_2d(np.asarray(gammas, dtype=float))
        branches = np.atleast_2d(np.asarray(branches, dtype=float))
        theta = np.zeros_like(gammas)
        for k, lpd in enumerate(self._loops):
            x = np.clip((gammas[:, k] - lpd["c"]) / lpd["r"], -1.0, 1.0)
            u0 = np.arcsin(x)
            principal = np.sign(branches[:, k]) * lpd["sgn"] >= 0
            u = np.where(principal, u0, np.pi - u0)
            u = np.mod(u + np.pi, 2 * np.pi) - np.pi
            w = u + np.pi
            M = lpd["coef"].shape[0]
            E = np.exp(1j * np.outer(w, np.arange(1, M + 1)))
            osc = (E @ lpd["coef"]).real - lpd["osc_pi"]
            theta += np.outer(u, lpd["wind"]) + osc
        return theta

    def of_sov(self, sc) -> np.ndarray:
        v = [lam - 1.0 / lam for lam in sc.Lambda]
        return self.angles([sc.gamma], [v])[0]


@dataclass(frozen=True)
class AbelReport:
    """Constancy of the linearized motion along one flow.

    kron[a-1]: max deviation of sum_k gamma_k^{a-1} dgamma_k / sqrt(P)
    from its Kronecker value delta_{a, n-flow} (finite differences,
    samples near turning points excluded).  drift[j-1]: max deviation of
    theta_j(tau) from the straight line with the predicted slope
    A_{j, n-flow}.  rate[j-1]: measured mean slope.
    """

    flow: int
    kron: tuple
    drift: tuple
    rate: tuple


def abel_linearization(traj: Trajectory, nodes: int = QUAD_NODES,
                       branch_floor: float = 0.35) -> AbelReport:
    s = build_spectral(Poly(list(traj.tcoeffs[0])))
    amap = AbelMap(s, nodes=nodes)
    g = s.genus
    col = g - traj.flow  # 0-based column n - flow of A
    garr = traj.gamma_array()
    varr = traj.sqrtp_array()
    theta = np.unwrap(amap.angles(garr, varr), axis=0)
    if len(traj.times) < 3:
        zeros = tuple(0.0 for _ in range(g))
        return AbelReport(flow=traj.flow, kron=zeros, drift=zeros,
                          rate=zeros)
    target = amap.pd.A[:, col]
    line = theta[0][None, :] + np.outer(traj.times, target)
    drift = np.max(np.abs(theta - line), axis=0)
    span = traj.times[-1] - traj.times[0]
    rate = (theta[-1] - theta[0]) / span

    h = traj.times[1] - traj.times[0]
    fd = (garr[2:] - garr[:-2]) / (2.0 * h)
    mid_g, mid_v = garr[1:-1], varr[1:-1]
    keep = np.all(np.abs(mid_v) >= branch_floor
                  * np.max(np.abs(varr), axis=0), axis=1)
    ratio = fd[keep] / mid_v[keep]
    kron = []
    for a in range(1, g + 1):
        vals = np.sum(mid_g[keep] ** (a - 1) * ratio, axis=1)
        kron.append(float(np.max(np.abs(vals - (a == g - traj.flow + 1)))))
    return AbelReport(flow=traj.flow, kron=tuple(kron),
                      drift=tuple(float(d) for d in drift),
                      rate=tuple(float(r) for r in rate))


# ---------------------------------------------------------------------------
# torus averages


def fourier_coefficient(s: SpectralData, F, k=None, nodes: int = None):
    """Fourier coefficient of a symmetric function on the angle torus.

    Multi-cycle quadrature of the Vandermonde of the gamma_j times F
    times prod_j e^{i Phi_k(gamma_j)} / sqrt(P(gamma_j)), divided by its
    F = 1, k = 0 value, so the normalization convention (F = 1, k = 0)
    -> 1 holds exactly.  F is a Poly for genus 1, or a vectorized
    callable of genus arguments.  The reconstruction convention: the
    time series of F is sum over k of coefficient(k) e^{-i k . theta}.
    """
    g = s.genus
    if isinstance(F, Poly) and g > 1:
        raise ValueError("for genus > 1 pass F as a symmetric callable")
    kv = np.zeros(g) if k is None or np.isscalar(k) and k == 0 \
        else np.asarray(k, dtype=float)
    if kv.shape != (g,):
        raise ValueError(f"k-vector must have length {g}")
    if nodes is None:
        nodes = {1: 256, 2: 128}.get(g, 48)
    nodes = _even(nodes)
    pd = period_matrix(s) if kv.any() else None
    vals = []
    for nn in (nodes, 2 * nodes):
        ws, raws, gams = [], [], []
        for j in range(1, g + 1):
            lp = _loop_samples(s, j, nn)
            raw = lp.sgn / lp.root_mrest
            w = raw.astype(complex)
            if kv.any():
                sig = kv @ pd.A
                phi, _ = _phase_samples(npp.polyval(lp.gam, sig) * raw)
                w = w * np.exp(1j * phi)
            ws.append(w)
            raws.append(raw)
            gams.append(lp.gam)
        mesh = np.meshgrid(*gams, indexing="ij")
        vand = np.ones_like(mesh[0])
        for i in range(g):
            for j in range(i + 1, g):
                vand = vand * (mesh[i] - mesh[j])
        num = vand * (F(mesh[0]) if isinstance(F, Poly) else F(*mesh))
        den = vand.copy()
        for axis in range(g - 1, -1, -1):
            num = np.tensordot(num, ws[axis], axes=([axis], [0]))
            den = np.tensordot(den, raws[axis], axes=([axis], [0]))
        vals.append(complex(num) / complex(den))
    if abs(vals[0] - vals[1]) > 1e-8 * max(1.0, abs(vals[1])):
        raise QuadratureFailure(
            f"torus average did not converge: {vals[0]!r} vs {vals[1]!r}")
    return vals[1]


# ---------------------------------------------------------------------------
# partial differential equations along commuting flows


@dataclass(frozen=True)
class PdeResidualReport:
    kind: str
    residual: float
    step: float
    order: float
    inputs: dict


def _exact_t(x0: PhasePoint) -> Poly:
    tc = conserved_poly(build_monodromy(x0)).coeffs
    return Poly([Fraction(float(c)) for c in tc])


def _as_g(G):
    if G is None:
        return lambda *args: 1.0
    return G


class _Grid:
    """Gamma configurations on a displacement lattice around one point."""

    def __init__(self, x0: PhasePoint, h: float, tolerance: float):
        self.x0 = x0
        self.h = h
        self.tol = tolerance
        self.cache = {}

    def gam(self, disp) -> np.ndarray:
        disp = tuple(disp)
        if disp not in self.cache:
            pt = self.x0
            for idx, c in enumerate(disp):
                if c:
                    pt = flow_endpoint(pt, idx + 1, c * self.h, self.tol)
            m = build_monodromy(pt)
            self.cache[disp] = np.array(sov_coords(m).gamma)
        return self.cache[disp]

    def d2(self, func, l: int, m: int) -> float:
        """Centered second derivative of func(gamma) in tau_l, tau_m."""
        nf = self.x0.n - 1
        e = [0] * nf

        def at(al, am):
            d = list(e)
            d[l - 1] += al
            d[m - 1] += am
            return func(self.gam(d))

        if l == m:
            return (at(1, 0) - 2.0 * at(0, 0) + at(-1, 0)) / self.h ** 2
        return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) \
            / (4.0 * self.h ** 2)

    def d1(self, func, l: int) -> float:
        nf = self.x0.n - 1
        plus = [0] * nf
        minus = [0] * nf
        plus[l - 1] = 1
        minus[l - 1] = -1
        return (func(self.gam(plus)) - func(self.gam(minus))) \
            / (2.0 * self.h)


def _weights(g_row: np.ndarray) -> np.ndarray:
    return np.array([1.0 / np.prod(g_row[i] - np.delete(g_row, i))
                     for i in range(len(g_row))])


def _pde_value(kind: str, n: int, P: Poly, grid: _Grid,
               L: Poly, G, p: int) -> float:
    gfun = _as_g(G)
    nf = n - 1

    if kind == "WEI":
        gam0 = float(grid.gam([0])[0])
        lead = 0.0 if p == 0 else p * gam0 ** (p - 1) * float(P(gam0))
        direct = lead + 0.5 * gam0 ** p * float(P.derivative()(gam0))
        second = grid.d2(lambda g: g[0] ** (p + 1) / (p + 1), 1, 1)
        return direct - second

    if kind == "Q":
        total = 0.0
        for l in range(1, nf + 1):
            def f(g, _l=l):
                w = _weights(g)
                return sum(w[i] * g[i] ** (n - _l - 1)
                           * gfun(*np.delete(g, i))
                           for i in range(len(g)))
            total += grid.d1(f, l)
        return total

    if kind == "EXFO":
        dtl = build_dt(P, L)
        g0 = grid.gam([0] * nf)
        w0 = _weights(g0)
        direct = sum(w0[i] * float(dtl(g0[i])) * gfun(*np.delete(g0, i))
                     for i in range(len(g0)))
        second = 0.0
        for m in range(1, nf + 1):
            psi = (L * Poly.monomial(n - 1 - m)).antiderivative()
            for l in range(1, nf + 1):
                def f(g, _l=l, _psi=psi):
                    w = _weights(g)
                    return sum(w[i] * g[i] ** (n - 1 - _l)
                               * float(_psi(g[i]))
                               * gfun(*np.delete(g, i))
                               for i in range(len(g)))
                second += grid.d2(f, l, m)
        return direct - second

    # kind == "C"
    ct = build_ct(P)

    def pair_sum(g, term):
        total = 0.0
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                rest = np.delete(g, [i, j])
                pref = (g[i] - g[j]) * np.prod(
                    (g[i] - rest) * (g[j] - rest))
                total += term(g[i], g[j], rest) / pref
        return total

    g0 = grid.gam([0] * nf)
    direct = pair_sum(g0, lambda x, y, rest:
                      complex(ct(x, y)).real * gfun(*rest))
    second = 0.0
    for m in range(1, nf + 1):
        psi = divided_difference(Poly.monomial(n - 1 - m)).antiderivative_x()
        for l in range(1, nf + 1):
            def f(g, _l=l, _psi=psi):
                return pair_sum(
                    g, lambda x, y, rest:
                    (x ** (n - _l - 1) * complex(_psi(x, y)).real
                     - y ** (n - _l - 1) * complex(_psi(y, x)).real)
                    * gfun(*rest))
            second += grid.d2(f, l, m)
    return direct - second


def pde_residual(x0: PhasePoint, kind: str, L: Poly = None, G=None,
                 p: int = None, step: float = 0.004, base_points: int = 3,
                 base_span: float = 0.8,
                 tolerance: float = STENCIL_RTOL) -> PdeResidualReport:
    """Residual of one trajectory-level identity, max over base points.

    kind EXFO: exact forms against double time derivatives (needs L);
    kind C: the bilinear pairing against its double derivatives (n >= 3,
    G of n - 3 variables); kind Q: divergence of the Lagrange currents
    (G of n - 2 variables); kind WEI: the n = 2 reduction of EXFO with
    L = gamma^p, the Weierstrass equation when p = 0.  Base points are
    spread along the first flow; each residual is evaluated at `step`
    and at half of it, and the Richardson exponent of the pair is
    reported (it should sit near 2).
    """
    if kind not in PDE_KINDS:
        raise ValueError(f"unknown equation kind {kind!r}")
    n = x0.n
    if kind == "WEI":
        if n != 2:
            raise ValueError("WEI is the two-site reduction")
        p = 0 if p is None else int(p)
        if p < 0:
            raise ValueError("p must be nonnegative")
    if kind == "EXFO" and L is None:
        raise ValueError("EXFO needs the polynomial L")
    if kind == "C" and n < 3:
        raise ValueError("the bilinear equation needs n >= 3")
    tP = _exact_t(x0)
    P = tP * tP - 4
    bases = [x0]
    for _ in range(base_points - 1):
        bases.append(flow_endpoint(bases[-1], 1,
                                   base_span / max(1, base_points - 1),
                                   FLOW_RTOL))
    worst = {1: 0.0, 2: 0.0}
    for base in bases:
        for half in (1, 2):
            grid = _Grid(base, step / half, tolerance)
            val = abs(_pde_value(kind, n, P, grid, L, G, p))
            worst[half] = max(worst[half], val)
    order = math.log2(worst[1] / worst[2]) if worst[2] > 0 else float("inf")
    return PdeResidualReport(
        kind=kind, residual=worst[1], step=step, order=order,
        inputs={"L": None if L is None else [float(c) for c in L.coeffs],
                "G": G is not None, "p": p})
