"""Exact-arithmetic layer: frozen difference-calculus oracles and ring laws.

The closed forms below were derived by hand from the definition
delta(F)(x) = F(x + i*hbar) - F(x - i*hbar) before the implementation was
written, and are frozen here:

    delta(x^2) = 4i*hbar*x
    delta(x^3) = 6i*hbar*x^2 - 2i*hbar^3
    delta_inverse(1)   = -i*x/(2*hbar)
    delta_inverse(x)   = -i*x^2/(4*hbar)
    delta_inverse(x^2) = -i*x^3/(6*hbar) - i*hbar*x/6
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from todasov.exactpoly import (
    BiPoly,
    CFraction,
    MPoly,
    Poly,
    QSeries,
    antisym_to_schur,
    delta,
    delta_inverse,
    det_functions,
    divided_difference,
    vandermonde,
)

F = Fraction


class TestCFraction:
    def test_arithmetic(self):
        a = CFraction(2, 3)
        b = CFraction(4, -1)
        assert a * b == CFraction(11, 10)
        assert a + b == CFraction(6, 2)
        assert a - b == CFraction(-2, 4)
        assert (a * b) / b == a
        assert 1 / CFraction(0, 1) == CFraction(0, -1)

    def test_mixed_scalars(self):
        a = CFraction(F(1, 2), F(1, 3))
        assert 2 * a == CFraction(1, F(2, 3))
        assert a + 1 == CFraction(F(3, 2), F(1, 3))
        assert complex(CFraction(1, -2)) == 1 - 2j

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            CFraction(1, 1) / CFraction(0, 0)


class TestPoly:
    def test_from_roots(self):
        p = Poly.from_roots([1, 2])
        assert p == Poly([2, -3, 1])
        assert p(1) == 0 and p(2) == 0 and p(0) == 2

    def test_shift_matches_evaluation(self):
        rng = random.Random(7)
        for _ in range(20):
            p = Poly([F(rng.randint(-9, 9), rng.randint(1, 5))
                      for _ in range(rng.randint(1, 9))])
            c = F(rng.randint(-5, 5), rng.randint(1, 4))
            x = F(rng.randint(-5, 5), rng.randint(1, 4))
            assert p.shifted(c)(x) == p(x + c)

    def test_antiderivative_derivative_round_trip(self):
        p = Poly([F(3), F(-1, 2), F(5, 7), F(0), F(2)])
        q = p.antiderivative()
        assert q(0) == 0
        assert q.derivative() == p

    def test_pow_and_degree(self):
        x = Poly.identity()
        assert (x + 1) ** 3 == Poly([1, 3, 3, 1])
        assert Poly([0]).degree == 0
        assert Poly.monomial(5).degree == 5


HBARS = [F(3, 7), F(1), F(2)]


class TestDeltaCalculus:
    @pytest.mark.parametrize("hbar", HBARS)
    def test_delta_quadratic(self, hbar):
        got = delta(Poly.monomial(2), hbar)
        assert got == Poly([0, CFraction(0, 4 * hbar)])

    @pytest.mark.parametrize("hbar", HBARS)
    def test_delta_cubic(self, hbar):
        got = delta(Poly.monomial(3), hbar)
        assert got == Poly([CFraction(0, -2 * hbar ** 3), 0, CFraction(0, 6 * hbar)])

    @pytest.mark.parametrize("hbar", HBARS)
    def test_delta_inverse_closed_forms(self, hbar):
        assert delta_inverse(Poly([1]), hbar) == \
            Poly([0, CFraction(0, -F(1) / (2 * hbar))])
        assert delta_inverse(Poly.monomial(1), hbar) == \
            Poly([0, 0, CFraction(0, -F(1) / (4 * hbar))])
        assert delta_inverse(Poly.monomial(2), hbar) == \
            Poly([0, CFraction(0, -hbar / 6), 0, CFraction(0, -F(1) / (6 * hbar))])

    def test_round_trip_degree_12(self):
        # delta is injective modulo constants, so both compositions are
        # checked: exact complex-rational arithmetic throughout.
        rng = random.Random(11)
        hbar = F(5, 3)
        for _ in range(10):
            deg = rng.randint(0, 12)
            l = Poly([F(rng.randint(-20, 20), rng.randint(1, 7))
                      for _ in range(deg + 1)])
            f = delta_inverse(l, hbar)
            assert f(0) == 0
            assert delta(f, hbar) == l

    def test_inverse_of_delta(self):
        hbar = F(1, 2)
        rng = random.Random(13)
        p = Poly([F(rng.randint(-9, 9)) for _ in range(8)])
        back = delta_inverse(delta(p, hbar), hbar)
        assert back == p - Poly([p[0]])

    def test_float_hbar_consistent(self):
        exact = delta_inverse(Poly.monomial(2), F(1, 4))
        approx = delta_inverse(Poly([0.0, 0.0, 1.0]), 0.25)
        for k in range(4):
            assert complex(approx[k]) == pytest.approx(complex(exact[k]), abs=1e-14)


class TestBiPoly:
    def test_divided_difference_quadratic(self):
        # t = x^2 - 3 -> (t(x)-t(y))/(x-y) = x + y
        u = divided_difference(Poly([-3, 0, 1]))
        assert u.coeff(1, 0) == 1 and u.coeff(0, 1) == 1
        assert u(F(2), F(5)) == 7

    def test_divided_difference_cubic(self):
        u = divided_difference(Poly.monomial(3))
        assert u(2, 3) == 4 + 6 + 9

    def test_divided_difference_diagonal_is_derivative(self):
        rng = random.Random(3)
        t = Poly([F(rng.randint(-9, 9)) for _ in range(7)])
        u = divided_difference(t)
        dt = t.derivative()
        for _ in range(20):
            x = F(rng.randint(-40, 40), rng.randint(1, 9))
            assert u(x, x) == dt(x)

    def test_divided_difference_reconstructs(self):
        rng = random.Random(5)
        t = Poly([F(rng.randint(-9, 9)) for _ in range(6)])
        u = divided_difference(t)
        for _ in range(10):
            x = F(rng.randint(-9, 9), rng.randint(1, 4))
            y = F(rng.randint(-9, 9), rng.randint(1, 4))
            if x == y:
                continue
            assert u(x, y) * (x - y) == t(x) - t(y)

    def test_divexact_round_trip(self):
        rng = random.Random(17)
        x_minus_y = BiPoly([[0, -1], [1, 0]])
        for _ in range(8):
            h = BiPoly([[F(rng.randint(-9, 9)) for _ in range(4)] for _ in range(5)])
            g = x_minus_y * h
            q = g.divexact_x_minus_y()
            assert list((q - h).terms()) == []

    def test_divexact_rejects_remainder(self):
        with pytest.raises(ValueError):
            BiPoly([[1]]).divexact_x_minus_y()

    def test_swap(self):
        u = BiPoly([[0, 2], [3, 0]])
        s = u.swap()
        assert s.coeff(0, 1) == 3 and s.coeff(1, 0) == 2

    def test_eval_x(self):
        u = BiPoly([[1, 0], [0, 5]])  # 1 + 5xy
        p = u.eval_x(F(2))
        assert p == Poly([1, 10])

    def test_antiderivative_x_monomial(self):
        u = BiPoly([[0, 1]])  # y
        v = u.antiderivative_x()  # xy
        assert v.coeff(1, 1) == 1 and list(v.terms()) == [(1, 1, 1)]

    def test_antiderivative_x_inverts_x_derivative(self):
        rng = random.Random(23)
        u = BiPoly([[F(rng.randint(-9, 9)) for _ in range(4)] for _ in range(5)])
        v = u.antiderivative_x()
        # row i of u must reappear as row i+1 of v times (i+1)
        for i, j, c in u.terms():
            assert v.coeff(i + 1, j) * (i + 1) == c
        # and v vanishes on the x = 0 line
        assert all(i > 0 for i, _, c in v.terms())


class TestMPoly:
    def test_elementary_symmetric(self):
        e2 = MPoly.elementary_symmetric(3, 2)
        assert e2((1, 2, 3)) == 2 + 3 + 6
        assert e2.is_symmetric()

    def test_vandermonde_product(self):
        v = vandermonde(3)
        xs = (F(1), F(4), F(9))
        assert v(xs) == (4 - 1) * (9 - 1) * (9 - 4)

    def test_is_symmetric_detects(self):
        f = MPoly.variable(2, 0)  # x alone
        assert not f.is_symmetric()
        assert (f + MPoly.variable(2, 1)).is_symmetric()


class TestSchurBlocks:
    def test_vandermonde_block_m2(self):
        blocks = antisym_to_schur(MPoly.constant(2, 1), 2)
        assert blocks == [[Poly([1]), Poly([0, 1])]]

    def test_vandermonde_block_m3(self):
        blocks = antisym_to_schur(MPoly.constant(3, 1), 3)
        assert blocks == [[Poly([1]), Poly([0, 1]), Poly([0, 0, 1])]]

    def test_power_sum_block(self):
        f = MPoly.variable(2, 0) + MPoly.variable(2, 1)
        blocks = antisym_to_schur(f, 2)
        assert blocks == [[Poly([1]), Poly([0, 0, 1])]]

    @pytest.mark.parametrize("m", [2, 3])
    def test_round_trip_exact(self, m):
        rng = random.Random(23 + m)
        for _ in range(6):
            f = MPoly.constant(m, rng.randint(-3, 3))
            for k in range(1, m + 1):
                f = f + MPoly.elementary_symmetric(m, k) * rng.randint(-3, 3)
            f = f + MPoly.elementary_symmetric(m, 1) * MPoly.elementary_symmetric(m, 1)
            blocks = antisym_to_schur(f, m)
            total = MPoly(m)
            for b in blocks:
                total = total + det_functions(b, m)
            assert (total - vandermonde(m) * f).is_zero()

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            antisym_to_schur(MPoly.variable(2, 0), 2)


class TestQSeries:
    def test_inverse(self):
        s = QSeries([1, -1], 30)  # 1 - q
        inv = s.inverse()
        assert inv == QSeries([1] * 30, 30)
        assert s * inv == QSeries.one(30)

    def test_division_requires_unit(self):
        with pytest.raises(ZeroDivisionError):
            QSeries.qpow(1, 10).inverse()

    small = st.lists(st.integers(min_value=-6, max_value=6), min_size=0, max_size=12)

    @settings(max_examples=60, deadline=None)
    @given(small, small, small)
    def test_ring_laws_order_40(self, a, b, c):
        sa, sb, sc = (QSeries(x, 40) for x in (a, b, c))
        assert (sa + sb) + sc == sa + (sb + sc)
        assert sa * sb == sb * sa
        assert (sa * sb) * sc == sa * (sb * sc)
        assert sa * (sb + sc) == sa * sb + sa * sc

    @settings(max_examples=30, deadline=None)
    @given(small)
    def test_multiplicative_inverse(self, a):
        s = QSeries([1] + a, 40)
        assert s * s.inverse() == QSeries.one(40)
