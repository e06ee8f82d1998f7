"""Graded character of the observable algebra, three ways.

The classical observables of the n-site chain are generated by the
monodromy entry coefficients (degrees 1..n, 1..n-1, 2..n+1 and 2..n),
subject to the unit-determinant relations in degrees 2..2n.  The
generating function of graded dimensions therefore has a product form; it
also equals a two-term q-binomial expression and the alternating sum
coming from the resolution of the relation module.  All three are
computed here as exact truncated q-series and must agree coefficient by
coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactpoly import QSeries


def qbracket(m: int, order: int) -> QSeries:
    """[m] = 1 - q^m."""
    return QSeries.one(order) - QSeries.qpow(m, order)


def qfactorial(m: int, order: int) -> QSeries:
    """[m]! = [1][2]...[m]."""
    out = QSeries.one(order)
    for k in range(1, m + 1):
        out = out * qbracket(k, order)
    return out


def q_binomial(n: int, m: int, order: int) -> QSeries:
    """Gaussian binomial coefficient [n choose m]."""
    if m < 0 or m > n:
        return QSeries.zero(order)
    num = QSeries.one(order)
    for j in range(n - m + 1, n + 1):
        num = num * qbracket(j, order)
    return num / qfactorial(m, order)


@dataclass(frozen=True)
class GradedCharacter:
    """Character series of the degree-graded observable algebra.

    Coefficients are the dimensions of the graded components, so they
    must come out as nonnegative integers; anything else means the
    assembled series is not a character and is rejected here.
    """

    n: int
    chi: QSeries

    def __post_init__(self):
        for c in self.chi.coeffs:
            if c.denominator != 1 or c < 0:
                raise ValueError(f"coefficient {c} is not a graded dimension")

    def dimensions(self) -> list[int]:
        return [int(c) for c in self.chi.coeffs]


def character_product(n: int, order: int) -> GradedCharacter:
    """Product form: generator degrees over relation degrees.

    Monodromy coefficients contribute 1/[n]!, 1/[n-1]!, [1]/[n+1]! and
    [1]/[n]!; the determinant relations in degrees 2..2n multiply back
    [2n]!/[1].
    """
    chi = qfactorial(n, order).inverse()
    chi = chi * qfactorial(n - 1, order).inverse()
    chi = chi * qbracket(1, order) / qfactorial(n + 1, order)
    chi = chi * qbracket(1, order) / qfactorial(n, order)
    chi = chi * qfactorial(2 * n, order) / qbracket(1, order)
    return GradedCharacter(n, chi)


def character_binomial(n: int, order: int) -> GradedCharacter:
    """Two-term q-binomial form of the same character."""
    num = q_binomial(2 * n - 1, n - 1, order) \
        - QSeries.qpow(1, order) * q_binomial(2 * n - 1, n - 2, order)
    return GradedCharacter(n, num / (qfactorial(n, order) * qfactorial(n - 1, order)))


def character_resolution(n: int, order: int) -> QSeries:
    """Alternating-sum form from the resolution by symmetric-polynomial spaces.

    The space of symmetric polynomials in j variables with degree at most
    2n-j-1 in each contributes [2n-1 choose j]; the degree-1 first-order
    relations enter with weight q and the degree-2 ones with weight q^2.
    """
    first = QSeries.zero(order)
    sign = QSeries.one(order)
    for i in range(n):
        first = first + sign * q_binomial(2 * n - 1, n - 1 - i, order)
        sign = sign * (QSeries.zero(order) - QSeries.qpow(1, order))
    second = QSeries.zero(order)
    sign = QSeries.one(order)
    for i in range(n - 2):
        second = second + sign * q_binomial(2 * n - 1, n - 3 - i, order)
        sign = sign * (QSeries.zero(order) - QSeries.qpow(1, order))
    num = first - QSeries.qpow(2, order) * second
    return num / (qfactorial(n - 1, order) * qfactorial(n, order))


def graded_dimensions(n: int, order: int) -> list[int]:
    """Integer dimension of each graded component, from the product form."""
    return character_product(n, order).dimensions()
