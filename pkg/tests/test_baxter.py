"""Quantum two-site tests.

The reference eigenvalues were produced by an independent method: a
periodic Fourier pseudospectral discretization of p^2 + 2 cosh r on
[-16, 16) with 512 and on [-18, 18) with 768 modes (dense eigh), the
two agreeing to 1.5e-11.  The module under test uses a Dirichlet box
with second-order differences and Richardson extrapolation, so the two
pipelines share nothing but the Hamiltonian.
"""
import math

import numpy as np
import pytest

from todasov.baxter import (
    EigenPair,
    asymptotics_check,
    baxter_residual,
    bs_quantize,
    build_q,
    eigen_to_t,
    solve_relative_spectrum,
)
from todasov.errors import (BracketFailure, ResolutionFailure, SignAmbiguity,
                            StepFailure)
from todasov.exactpoly import Poly
from todasov.spectral import build_spectral, classical_actions, period_matrix

E_H1 = [3.0591745969039845, 5.2851259671823811, 7.7145795729979731,
        10.327666944072281, 13.110095889439158, 16.050921424732834]
E_H05 = [2.5151770965849707, 3.574297136823831]


@pytest.fixture(scope="module")
def pairs_h1():
    return solve_relative_spectrum(1.0, 6)


@pytest.fixture(scope="module")
def q0(pairs_h1):
    return build_q(pairs_h1[0])


class TestSpectrum:
    def test_oracle_values(self, pairs_h1):
        for pair, ref in zip(pairs_h1, E_H1):
            assert abs(pair.E - ref) < 1e-8
        for pair, ref in zip(solve_relative_spectrum(0.5, 2), E_H05):
            assert abs(pair.E - ref) < 1e-8

    def test_above_well_bottom(self, pairs_h1):
        assert all(p.E > 2.0 for p in pairs_h1)

    def test_strictly_increasing(self, pairs_h1):
        es = [p.E for p in pairs_h1]
        assert all(b > a for a, b in zip(es, es[1:]))

    def test_parity_alternates(self, pairs_h1):
        assert [p.parity for p in pairs_h1] == [1, -1, 1, -1, 1, -1]

    def test_t_convention(self, pairs_h1):
        for p in pairs_h1:
            t2, t1, lead = p.t.coeffs
            assert lead == 1.0 and t1 == 0.0
            assert t2 == -p.E

    def test_validation(self):
        with pytest.raises(ValueError):
            solve_relative_spectrum(1.0, 0)
        with pytest.raises(ValueError):
            solve_relative_spectrum(1.0, 21)
        with pytest.raises(ValueError):
            solve_relative_spectrum(-1.0, 3)

    def test_coarse_grid_rejected(self):
        with pytest.raises(ResolutionFailure):
            solve_relative_spectrum(0.1, 6, base_size=256)


class TestEigenToT:
    def test_sign_stable_across_levels(self, pairs_h1):
        for p in pairs_h1:
            t = eigen_to_t(p)
            assert t.coeffs == p.t.coeffs
            assert t.coeffs[0] == -p.E

    def test_ambiguous_energy_rejected(self):
        fake = EigenPair(hbar=1.0, level=0, E=0.37,
                         t=Poly([-0.37, 0.0, 1.0]), parity=1)
        with pytest.raises(SignAmbiguity):
            eigen_to_t(fake)


class TestQFunction:
    @pytest.mark.parametrize("hbar", [1.0, 0.5])
    def test_residual_six_levels(self, hbar):
        for pair in solve_relative_spectrum(hbar, 6):
            q = build_q(pair)
            assert baxter_residual(q, pair.t, hbar) < 1e-6

    def test_real_on_real_axis(self, q0):
        v = q0.line(0.0, -4.0, 4.0, 161)
        assert np.abs(v.imag).max() < 1e-8 * np.abs(v.real).max()

    def test_normalization(self, pairs_h1):
        even = build_q(pairs_h1[0])
        assert abs(complex(even(0.0)) - 1.0) < 1e-12
        odd = build_q(pairs_h1[1])
        h = 1e-5
        slope = complex(odd(h) - odd(-h)) / (2.0 * h)
        assert abs(slope - 1.0) < 1e-8

    def test_core_parity(self, pairs_h1):
        for pair in pairs_h1[:2]:
            q = build_q(pair)
            v = q.core_line(0.0, -4.0, 4.0, 161).real
            gap = np.abs(v - pair.parity * v[::-1]).max()
            assert gap < 1e-8 * np.abs(v).max()

    def test_synthetic_evaluator(self):
        # exponential shift identity: a degenerate non-monic t, used
        # only to validate the residual computation itself
        hbar, a = 0.7, 0.3
        synthetic = lambda g: np.exp(a * np.asarray(g, complex))
        t = Poly([2.0 * math.cos(a * hbar)])
        assert baxter_residual(synthetic, t, hbar) < 1e-12

    def test_wrong_t2_inflates_residual(self, pairs_h1, q0):
        pair = pairs_h1[0]
        good = baxter_residual(q0, pair.t, pair.hbar)
        bad = baxter_residual(q0, Poly([1.01 * pair.t.coeffs[0], 0.0, 1.0]),
                              pair.hbar)
        assert bad >= 10.0 * good

    def test_im_cap_enforced(self, q0):
        with pytest.raises(ValueError):
            q0(4.0j)

    def test_parseval(self, pairs_h1):
        # int core_a core_b dgamma = 2 pi hbar scale_a scale_b <psi|psi'>
        qa, qb = build_q(pairs_h1[0]), build_q(pairs_h1[2])
        g = np.linspace(-12.0, 12.0, 4001)
        ca = qa.core_line(0.0, -12.0, 12.0, 4001).real
        cb = qb.core_line(0.0, -12.0, 12.0, 4001).real
        norm_a = np.trapezoid(ca * ca, g)
        norm_b = np.trapezoid(cb * cb, g)
        want = 2.0 * math.pi * abs(qa.scale) ** 2
        assert norm_a == pytest.approx(want, rel=1e-6)
        cross = np.trapezoid(ca * cb, g) / math.sqrt(norm_a * norm_b)
        assert abs(cross) < 1e-6

    def test_grid_cached(self, q0):
        first = q0.grid(-5.0, 5.0, 201)
        assert q0.grid(-5.0, 5.0, 201) is first


class TestAsymptotics:
    def test_level0(self, q0):
        rep = asymptotics_check(q0)
        assert rep.passed
        assert rep.zero_count == 5
        assert abs(rep.decay_slope - 2.0 * math.pi) < 0.2 * math.pi

    def test_halved_hbar(self):
        pair = solve_relative_spectrum(0.5, 1)[0]
        rep = asymptotics_check(build_q(pair))
        assert rep.passed
        assert rep.slope_target == pytest.approx(4.0 * math.pi)

    def test_gap_zeros_count_level(self, pairs_h1):
        q = build_q(pairs_h1[3])
        edge = 0.999 * math.sqrt(q.E - 2.0)
        v = q.line(0.0, -edge, edge, 2000).real
        assert int(np.sum(np.sign(v[1:]) != np.sign(v[:-1]))) == 3

    def test_narrow_fit_window_rejected(self, q0):
        with pytest.raises(StepFailure):
            asymptotics_check(q0, fit_span=(3.0, 3.2))


class TestBohrSommerfeld:
    def test_error_shrinks_quadratically(self):
        errs = {}
        for hbar in (0.5, 0.25):
            exact = solve_relative_spectrum(hbar, 4)[3].E
            approx = -bs_quantize(hbar, 3).coeffs[0]
            errs[hbar] = abs(approx - exact)
        assert 2.5 <= errs[0.5] / errs[0.25] <= 6.0

    def test_level_spacing_is_classical_frequency(self):
        pairs = solve_relative_spectrum(0.1, 7)
        spacing = pairs[6].E - pairs[5].E
        mid = 0.5 * (pairs[5].E + pairs[6].E)
        pd = period_matrix(build_spectral(Poly([-mid, 0.0, 1.0])))
        assert spacing == pytest.approx(0.1 * abs(pd.A[0, 0]), rel=0.05)

    def test_action_monotone_in_energy(self):
        j3 = classical_actions(build_spectral(Poly([-3.0, 0.0, 1.0])))[0]
        j4 = classical_actions(build_spectral(Poly([-4.0, 0.0, 1.0])))[0]
        assert j4 > j3 > 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            bs_quantize(1.0, -1)
        with pytest.raises(ValueError):
            bs_quantize(0.0, 2)

    def test_bracket_failure(self):
        with pytest.raises(BracketFailure):
            bs_quantize(1.0, 3, e_max=2.5)
