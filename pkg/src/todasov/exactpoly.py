"""Exact polynomial and truncated power-series arithmetic.

Everything in this module is coefficient-exact: polynomials are dense
lists of duck-typed scalars (int, Fraction, CFraction, float or complex
all work), and the only operations used are ring operations plus exact
division.  The imaginary-shift difference calculus

    delta(F)(x) = F(x + i*hbar) - F(x - i*hbar)

and its inverse are exact whenever the coefficients and hbar are
rational, which is what the identity-polynomial builders rely on.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


class CFraction:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, CFraction):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CFraction(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CFraction(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CFraction(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CFraction(self.re * o.re - self.im * o.im,
                         self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero CFraction")
        return CFraction((self.re * o.re + self.im * o.im) / n,
                         (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __neg__(self):
        return CFraction(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"CFraction({self.re!r}, {self.im!r})"


I_UNIT = CFraction(0, 1)


def _is_zero(c) -> bool:
    if isinstance(c, (float, complex)):
        return c == 0
    return not bool(c)


class Poly:
    """Dense univariate polynomial, coefficients stored constant-first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = list(coeffs)
        while len(cs) > 1 and _is_zero(cs[-1]):
            cs.pop()
        if not cs:
            cs = [0]
        self.coeffs = cs

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def identity(cls):
        return cls([0, 1])

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots):
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k <= self.degree else 0

    def __add__(self, other):
        o = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self[k] + o[k] for k in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        o = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self[k] - o[k] for k in range(n)])

    def __rsub__(self, other):
        return Poly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = other if isinstance(other, Poly) else Poly([other])
        if len(self.coeffs) != len(o.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, o.coeffs))

    def __call__(self, x):
        # Horner; works for scalars of any ring and for numpy arrays.
        acc = self.coeffs[-1]
        if hasattr(x, "shape"):
            acc = acc + 0 * x
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly([0])
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Poly":
        """Exact antiderivative vanishing at 0; divides by Fraction for int coeffs."""
        out = [0 * self.coeffs[0]]
        for k, c in enumerate(self.coeffs):
            if isinstance(c, int):
                c = Fraction(c)
            out.append(c / (k + 1))
        return Poly(out)

    def shifted(self, c) -> "Poly":
        """Coefficients of F(x + c)."""
        d = self.degree
        out = [0] * (d + 1)
        for m, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            pw = 1
            for k in range(m, -1, -1):
                out[k] = out[k] + a * math.comb(m, k) * pw
                pw = pw * c
        return Poly(out)

    def map_coeffs(self, fn) -> "Poly":
        return Poly([fn(c) for c in self.coeffs])

    def to_complex(self) -> "Poly":
        return Poly([complex(c) for c in self.coeffs])

    def __repr__(self):
        return f"Poly({self.coeffs!r})"


def delta(f: Poly, hbar) -> Poly:
    """Imaginary-shift difference F(x + i*hbar) - F(x - i*hbar)."""
    if isinstance(hbar, (int, Fraction)):
        ih = CFraction(0, hbar)
    else:
        ih = 1j * hbar
    return f.shifted(ih) - f.shifted(-ih)


def _to_cfraction(c) -> CFraction:
    if isinstance(c, CFraction):
        return c
    if isinstance(c, complex):
        return CFraction(Fraction(c.real), Fraction(c.imag))
    return CFraction(Fraction(c))


def delta_inverse(l: Poly, hbar) -> Poly:
    """The polynomial F with delta(F) = l and F(0) = 0.

    delta lowers degree by exactly one and kills only constants, so F is
    unique once the constant term is pinned.  Solved by top-down
    elimination.  Always computed exactly: float input is lifted to
    Fraction (floats are dyadic rationals) and converted back, since the
    elimination loop cannot be trusted to terminate in rounded arithmetic.
    """
    if not isinstance(hbar, (int, Fraction)):
        exact = delta_inverse(l.map_coeffs(_to_cfraction), Fraction(hbar))
        return exact.map_coeffs(complex)
    ih = CFraction(0, hbar)
    rem = l
    out = Poly([0])
    while not (rem.degree == 0 and _is_zero(rem.coeffs[0])):
        d = rem.degree
        lead = rem.coeffs[d]
        # delta(x^(d+1)) = 2*(d+1)*i*hbar*x^d + lower order
        c = lead / (2 * (d + 1) * ih)
        term = Poly.monomial(d + 1, c)
        out = out + term
        rem = rem - delta(term, hbar)
    return out - Poly([out.coeffs[0]])


class BiPoly:
    """Dense polynomial in two variables; coeffs[i][j] is the x^i y^j term."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = [list(row) for row in coeffs] or [[0]]

    @classmethod
    def zero(cls):
        return cls([[0]])

    @classmethod
    def from_x(cls, p: Poly):
        return cls([[c] for c in p.coeffs])

    @classmethod
    def from_y(cls, p: Poly):
        return cls([list(p.coeffs)])

    def degree_x(self):
        return len(self.coeffs) - 1

    def degree_y(self):
        return max(len(r) for r in self.coeffs) - 1

    def coeff(self, i, j):
        if 0 <= i < len(self.coeffs) and 0 <= j < len(self.coeffs[i]):
            return self.coeffs[i][j]
        return 0

    def _padded(self, nx, ny):
        return [[self.coeff(i, j) for j in range(ny)] for i in range(nx)]

    def __add__(self, other):
        o = other if isinstance(other, BiPoly) else BiPoly([[other]])
        nx = max(len(self.coeffs), len(o.coeffs))
        ny = max(self.degree_y(), o.degree_y()) + 1
        a = self._padded(nx, ny)
        b = o._padded(nx, ny)
        return BiPoly([[a[i][j] + b[i][j] for j in range(ny)] for i in range(nx)])

    def __sub__(self, other):
        o = other if isinstance(other, BiPoly) else BiPoly([[other]])
        return self + (o * (-1))

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return BiPoly([[c * other for c in row] for row in self.coeffs])
        nx = self.degree_x() + other.degree_x() + 1
        ny = self.degree_y() + other.degree_y() + 1
        out = [[0] * ny for _ in range(nx)]
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if _is_zero(a):
                    continue
                for k, orow in enumerate(other.coeffs):
                    for m, b in enumerate(orow):
                        if _is_zero(b):
                            continue
                        out[i + k][j + m] = out[i + k][j + m] + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def swap(self) -> "BiPoly":
        """Exchange the two variables."""
        nx = self.degree_x() + 1
        ny = self.degree_y() + 1
        return BiPoly([[self.coeff(i, j) for i in range(nx)] for j in range(ny)])

    def __call__(self, x, y):
        acc = 0
        if hasattr(x, "shape") or hasattr(y, "shape"):
            acc = 0.0 * (x + y)
        for i in reversed(range(len(self.coeffs))):
            row = self.coeffs[i]
            racc = 0
            for j in reversed(range(len(row))):
                racc = racc * y + row[j]
            acc = acc * x + racc
        return acc

    def eval_x(self, x) -> Poly:
        """Partial evaluation in the first variable."""
        ny = self.degree_y() + 1
        out = [0] * ny
        for j in range(ny):
            pw = 1
            for i in range(len(self.coeffs)):
                out[j] = out[j] + self.coeff(i, j) * pw
                pw = pw * x
        return Poly(out)

    def divexact_x_minus_y(self) -> "BiPoly":
        """Exact quotient by (x - y); raises if the remainder is nonzero."""
        # Treat as a polynomial in x over the ring of polynomials in y and
        # run synthetic division at x = y.
        rows = [Poly(row) for row in self.coeffs]
        y = Poly([0, 1])
        quo = [Poly([0])] * (len(rows) - 1)
        acc = rows[-1]
        for i in range(len(rows) - 2, -1, -1):
            quo[i] = acc
            acc = rows[i] + y * acc
        if not all(_is_zero(c) for c in acc.coeffs):
            raise ValueError("not divisible by (x - y)")
        ny = max(p.degree for p in quo) + 1 if quo else 1
        return BiPoly([[p[j] for j in range(ny)] for p in quo])

    def antiderivative_x(self) -> "BiPoly":
        """Exact antiderivative in the first variable, vanishing at x = 0."""
        out = [[0]]
        for i, row in enumerate(self.coeffs):
            out.append([(Fraction(c) if isinstance(c, int) else c) / (i + 1)
                        for c in row])
        return BiPoly(out)

    def terms(self):
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if not _is_zero(c):
                    yield i, j, c

    def __repr__(self):
        return f"BiPoly({self.coeffs!r})"


def divided_difference(t: Poly) -> BiPoly:
    """(t(x) - t(y)) / (x - y) as an exact bivariate polynomial."""
    n = t.degree
    out = [[0] * n for _ in range(max(n, 1))]
    for m in range(1, n + 1):
        c = t.coeffs[m]
        if _is_zero(c):
            continue
        for a in range(m):
            out[a][m - 1 - a] = out[a][m - 1 - a] + c
    return BiPoly(out) if n > 0 else BiPoly.zero()


class MPoly:
    """Sparse polynomial in m variables: {exponent tuple: coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            if not _is_zero(c):
                self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exponents, c=1):
        e = tuple(exponents)
        return cls(len(e), {e: c})

    @classmethod
    def elementary_symmetric(cls, nvars, k):
        out = cls(nvars)
        for combo in itertools.combinations(range(nvars), k):
            e = [0] * nvars
            for i in combo:
                e[i] = 1
            out.terms[tuple(e)] = 1
        return out

    def __add__(self, other):
        o = other if isinstance(other, MPoly) else MPoly.constant(self.nvars, other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = other if isinstance(other, MPoly) else MPoly.constant(self.nvars, other)
        return self + o * (-1)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __call__(self, xs):
        acc = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(xs, e):
                for _ in range(k):
                    t = t * x
            acc = acc + t
        return acc

    def is_zero(self):
        return not self.terms

    def is_symmetric(self):
        for i in range(self.nvars - 1):
            for e, c in self.terms.items():
                es = list(e)
                es[i], es[i + 1] = es[i + 1], es[i]
                if self.terms.get(tuple(es), 0) != c:
                    return False
        return True

    def __repr__(self):
        return f"MPoly({self.nvars}, {self.terms!r})"


def det_functions(funcs, nvars) -> MPoly:
    """Expand det(funcs[i](x_j)) over permutations into an MPoly."""
    out = MPoly(nvars)
    for perm in itertools.permutations(range(nvars)):
        sign = _perm_sign(perm)
        term = MPoly.constant(nvars, sign)
        for i, j in enumerate(perm):
            f = funcs[i]
            col = MPoly(nvars)
            for k, c in enumerate(f.coeffs):
                if _is_zero(c):
                    continue
                e = [0] * nvars
                e[j] = k
                col = col + MPoly(nvars, {tuple(e): c})
            term = term * col
        out = out + term
    return out


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def vandermonde(nvars: int) -> MPoly:
    """det(x_j^(i-1)) = prod_{i<j} (x_j - x_i)."""
    return det_functions([Poly.monomial(i) for i in range(nvars)], nvars)


def antisym_to_schur(f: MPoly, m: int):
    """Decompose vandermonde(m) * f into determinant blocks.

    Returns a list of blocks, each a list of m univariate Polys
    (F_1 ... F_m), such that

        sum over blocks of det(F_i(x_j)) = vandermonde(m) * f   exactly.

    f must be symmetric.  A single Schur-type term yields one block.
    """
    if f.nvars != m:
        raise ValueError("variable count mismatch")
    if not f.is_symmetric():
        raise ValueError("input polynomial is not symmetric")
    a = vandermonde(m) * f
    # Rows of a block are listed by increasing degree, so F=1 gives back the
    # Vandermonde rows 1, x, ..., x^(m-1); reversing row order inside the
    # determinant costs the sign below, absorbed into the top-row coefficient.
    eps = -1 if (m * (m - 1) // 2) % 2 else 1
    blocks = []
    guard = 0
    while not a.is_zero():
        guard += 1
        if guard > 100000:
            raise RuntimeError("schur extraction did not terminate")
        e = max(a.terms)
        c = a.terms[e]
        if len(set(e)) != len(e):
            raise ValueError("antisymmetrization failed: repeated exponents")
        order = sorted(e)
        block = [Poly.monomial(k) for k in order[:-1]]
        block.append(Poly.monomial(order[-1], eps * c))
        blocks.append(block)
        a = a - det_functions(block, m)
    return blocks


class QSeries:
    """Power series in q truncated at a fixed order, exact Fraction coefficients."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order: int):
        self.order = order
        cs = [Fraction(c) for c in coeffs[:order]]
        cs += [Fraction(0)] * (order - len(cs))
        self.coeffs = cs

    @classmethod
    def one(cls, order):
        return cls([1], order)

    @classmethod
    def zero(cls, order):
        return cls([], order)

    @classmethod
    def qpow(cls, k, order):
        """The monomial q^k."""
        if k >= order:
            return cls([], order)
        return cls([0] * k + [1], order)

    def _check(self, other):
        if self.order != other.order:
            raise ValueError("truncation order mismatch")

    def __add__(self, other):
        o = other if isinstance(other, QSeries) else QSeries([other], self.order)
        self._check(o)
        return QSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], self.order)

    __radd__ = __add__

    def __sub__(self, other):
        o = other if isinstance(other, QSeries) else QSeries([other], self.order)
        self._check(o)
        return QSeries([a - b for a, b in zip(self.coeffs, o.coeffs)], self.order)

    def __rsub__(self, other):
        return QSeries([other], self.order) - self

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries([c * other for c in self.coeffs], self.order)
        self._check(other)
        out = [Fraction(0)] * self.order
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(self.order - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return QSeries(out, self.order)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("series has no constant term")
        inv0 = 1 / self.coeffs[0]
        out = [inv0] + [Fraction(0)] * (self.order - 1)
        for k in range(1, self.order):
            s = Fraction(0)
            for j in range(1, k + 1):
                s += self.coeffs[j] * out[k - j]
            out[k] = -s * inv0
        return QSeries(out, self.order)

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return QSeries([c / other for c in self.coeffs], self.order)
        return self * other.inverse()

    def __eq__(self, other):
        return isinstance(other, QSeries) and self.order == other.order \
            and self.coeffs == other.coeffs

    def __repr__(self):
        return f"QSeries({self.coeffs!r}, order={self.order})"
