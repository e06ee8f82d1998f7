"""Acceptance gate: one test per verification suite, fixed tolerances.

Every number asserted here is a hard requirement on the package; the
per-module test files explore edge cases, this file states the contract.
Each test stands alone so a red line names the broken suite directly.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from todasov.baxter import (
    bs_quantize,
    build_q,
    baxter_residual,
    solve_relative_spectrum,
)
from todasov.characters import (
    character_binomial,
    character_product,
    character_resolution,
    qfactorial,
    QSeries,
)
from todasov.dynamics import (
    abel_linearization,
    em_residual,
    flow_endpoint,
    hamiltonian_flow,
    pde_residual,
)
from todasov.exactpoly import CFraction, Poly, delta, delta_inverse
from todasov.lax import PhasePoint, build_monodromy, conserved_poly
from todasov.matrixelements import (
    build_quantum_identity_polys,
    close_state_compare,
    contour_shift_residual,
    matrix_element,
    quantum_prop_check,
    quasiclassical_q,
)
from todasov.spectral import build_spectral, prop_check_classical

CURVES = {
    1: Poly([-6.0, 0.0, 1.0]),
    2: Poly([0.0, -6.0, 0.0, 1.0]),
    3: Poly([4.0, 0.0, -8.0, 0.0, 1.0]),
}

X2 = PhasePoint((0.4, -0.4), (0.5, -0.1))
X3 = PhasePoint((1.1, -0.3, -0.2), (0.9, 0.2, -0.6))
X3SYM = PhasePoint((0.5, 0.0, -0.5), (0.6, 0.0, -0.6))
X4 = PhasePoint((0.6, -0.1, 0.2, -0.7), (0.5, 0.1, -0.2, -0.4))


@pytest.fixture(scope="module", params=[1.0, 0.5], ids=["hbar1", "hbar05"])
def quantum_states(request):
    hbar = request.param
    pairs = solve_relative_spectrum(hbar, 6)
    return hbar, pairs, [build_q(p) for p in pairs]


def test_1_structure_suite():
    """det M = 1 to 1e-12 and t1 = -P, t2 = P^2/2 - H, 100 random points."""
    rng = np.random.default_rng(11)
    for n in range(2, 7):
        for _ in range(20):
            x = PhasePoint(tuple(rng.uniform(-2, 2, n)),
                           tuple(rng.uniform(-2, 2, n)))
            m = build_monodromy(x)
            assert m.det_defect() < 1e-12, f"det defect at n={n}"
            t = conserved_poly(m)
            mom, ham = sum(x.p), x.energy()
            scale = max(1.0, abs(mom), abs(ham))
            r1 = abs(float(t.coeffs[n - 1]) + mom) / scale
            r2 = abs(float(t.coeffs[n - 2]) - (mom * mom / 2 - ham)) / scale
            assert r1 < 1e-12 and r2 < 1e-12, f"trace coeffs at n={n}"


def test_2_classical_identity_suite():
    """Loop residuals < 1e-7: plain on genus 1-3, deformed on genus 2."""
    for genus, t in CURVES.items():
        s = build_spectral(t)
        for deg in range(4):
            for j in range(1, genus + 1):
                r = prop_check_classical(s, "P1", L=Poly.monomial(deg),
                                         cycles=j)
                assert r < 1e-7, f"P1 genus {genus} deg {deg} cycle {j}: {r}"
        for j1 in range(1, genus + 1):
            for j2 in range(j1, genus + 1):
                r = prop_check_classical(s, "P2", cycles=(j1, j2))
                assert r < 1e-7, f"P2 genus {genus} pair {(j1, j2)}: {r}"
    s = build_spectral(CURVES[2])
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            k = (k1, k2)
            for deg in range(4):
                r = prop_check_classical(s, "P1p", L=Poly.monomial(deg), k=k)
                assert r < 1e-7, f"P1p k={k} deg {deg}: {r}"
            r = prop_check_classical(s, "P2p", k=k)
            assert r < 1e-7, f"P2p k={k}: {r}"
            r = prop_check_classical(s, "P3p", k=k)
            assert r < 1e-7, f"P3p k={k}: {r}"


def test_3_dynamics_suite():
    """Conservation, velocity formula with its order, Abel drift, commuting."""
    traj = hamiltonian_flow(X3, 1, 2.0)
    assert traj.conservation_defect() < 1e-9
    r1 = em_residual(traj, stride=1)
    r2 = em_residual(traj, stride=2)
    assert r1 < 1e-5, f"velocity residual {r1}"
    assert math.log2(r2 / r1) >= 1.8, "second-order step scaling lost"
    rep = abel_linearization(traj)
    assert max(rep.drift) < 1e-5, f"Abel drift {max(rep.drift)}"
    for x0, pairs in ((X3SYM, [(1, 2)]), (X4, [(1, 2), (1, 3), (2, 3)])):
        for l, m in pairs:
            a = flow_endpoint(flow_endpoint(x0, l, 0.7), m, 0.4)
            b = flow_endpoint(flow_endpoint(x0, m, 0.4), l, 0.7)
            gap = max(max(abs(u - v) for u, v in zip(a.p, b.p)),
                      max(abs(u - v) for u, v in zip(a.q, b.q)))
            assert gap < 1e-7, f"flows {l},{m} at n={x0.n}: gap {gap}"


def test_4_weierstrass_pde_suite():
    """Trajectory-level equations < 1e-4; the n = 2 family second order."""
    for p in (0, 1, 2):
        rep = pde_residual(X2, "WEI", p=p)
        assert rep.residual < 1e-4, f"WEI p={p}: {rep.residual}"
        assert 1.6 <= rep.order <= 2.4, f"WEI p={p} order {rep.order}"
    rep = pde_residual(X3, "Q")
    assert rep.residual < 1e-4, f"Q residual {rep.residual}"
    rep = pde_residual(X4, "C")
    assert rep.residual < 1e-4, f"C residual {rep.residual}"


def test_5_character_suite():
    """Product, binomial, and alternating forms agree to q^40, n = 2..6."""
    order = 40
    for n in range(2, 7):
        prod = character_product(n, order).chi
        assert prod.coeffs == character_binomial(n, order).chi.coeffs, \
            f"binomial form differs at n={n}"
        assert prod.coeffs == character_resolution(n, order).coeffs, \
            f"alternating form differs at n={n}"
    closed = (QSeries.one(order) + QSeries.qpow(2, order)) \
        / (qfactorial(1, order) * qfactorial(2, order))
    assert character_product(2, order).chi.coeffs == closed.coeffs


def test_6_quantum_suite(quantum_states):
    """n = 2 spectra: difference equation, orthogonality, vanishing laws."""
    hbar, pairs, qs = quantum_states
    for pair, q in zip(pairs, qs):
        r = baxter_residual(q, pair.t, hbar)
        assert r < 1e-6, f"level {pair.level}: baxter residual {r}"
    one = Poly([1.0])
    norms = [matrix_element(q, q, one) for q in qs[:3]]
    for a in range(3):
        for b in range(a + 1, 3):
            r = abs(matrix_element(qs[a], qs[b], one)) \
                / math.sqrt(norms[a] * norms[b])
            assert r < 1e-6, f"levels {a},{b}: overlap {r}"
    for deg in range(4):
        L = Poly.monomial(deg) if deg else one
        r = quantum_prop_check("P1pp", qs[0], qs[1], L=L)
        assert r < 1e-6, f"P1pp deg {deg}: {r}"
    # negative control: a random right-hand side must NOT integrate to zero
    ip = build_quantum_identity_polys(qs[0].t, qs[1].t, hbar)
    scale = max(abs(complex(c)) for c in ip.Dq.coeffs)
    rng = np.random.default_rng(7)
    junk = Poly(list(rng.standard_normal(4) * scale))
    from todasov.matrixelements import WINDOW_MARGIN, _weighted_line
    i, l1 = _weighted_line(qs[0], qs[1], junk, 1, WINDOW_MARGIN)
    assert abs(i) / l1 >= 1e-2, f"negative control too small: {abs(i) / l1}"
    r = contour_shift_residual(qs[0], qs[1])
    assert r < 1e-7, f"contour shift {r}"


def test_7_quasiclassical_suite():
    """Semiclassics: action rule error scaling, spacings, zero counts."""
    errs = {}
    for hb in (0.5, 0.25):
        e_exact = solve_relative_spectrum(hb, 4)[3].E
        e_bs = -float(bs_quantize(hb, 3).coeffs[0])
        errs[hb] = abs(e_bs - e_exact)
    factor = errs[0.5] / errs[0.25]
    assert 2.5 <= factor <= 6.0, f"action-rule error scaling {factor}"
    rep = close_state_compare(0.1, 5)
    assert rep.spacing_rel < 0.05, f"spacing vs period matrix {rep.spacing_rel}"
    d1 = close_state_compare(0.2, 9).deviation
    d2 = close_state_compare(0.1, 18).deviation
    assert d1 / d2 >= 1.5, f"close-state deviation ratio {d1 / d2}"
    t = solve_relative_spectrum(0.15, 7)[6].t
    n1 = len(quasiclassical_q(t, 0.15).zone(1).predicted_zeros())
    n2 = len(quasiclassical_q(t, 0.075).zone(1).predicted_zeros())
    assert abs(n2 - 2 * n1) <= 1, f"zero counts {n1} -> {n2}"


def test_8_exactness_suite():
    """Difference-calculus roundtrip, Cq antisymmetry, Sq diagonal: exact."""
    import random
    rng = random.Random(5)
    for _ in range(20):
        deg = rng.randint(0, 12)
        hb = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        l = Poly([CFraction(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
                  for _ in range(deg + 1)])
        assert delta(delta_inverse(l, hb), hb) == l
    ip = build_quantum_identity_polys(Poly([-3, 0, 1]), Poly([-5, 0, 1]), 1)
    assert not list((ip.Cq + ip.Cq.swap()).terms())
    t = Poly([Fraction(1, 3), -3, 0, 1])
    sq = build_quantum_identity_polys(t, t, Fraction(2, 3)).Sq
    assert not any(complex(c) for c in sq.coeffs)
