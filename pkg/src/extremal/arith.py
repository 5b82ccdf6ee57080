"""Integer points, 2x2 matrices and low degree polynomials.

A point ``x = (x0, x1, x2)`` of Z^3 is identified with the symmetric matrix
``[[x0, x1], [x1, x2]]``. All integer operations here are exact; the few
functions that involve the real number ``xi`` return :class:`CertifiedReal`
enclosures.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import NamedTuple

import gmpy2

from .certified import CertifiedReal, DEFAULT_PREC


def _gcd(*values: int) -> int:
    return int(reduce(gmpy2.gcd, values, gmpy2.mpz(0)))


def _z(values):
    # gmpy2 multiplies multi-megabit integers far faster than CPython
    return [gmpy2.mpz(v) for v in values]


class Matrix2(NamedTuple):
    """``[[a, b], [c, d]]``."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> Matrix2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: Matrix2) -> Matrix2:
        a, b, c, d = _z(self)
        e, f, g, h = _z(other)
        return Matrix2(int(a * e + b * g), int(a * f + b * h), int(c * e + d * g), int(c * f + d * h))

    def scale(self, k) -> Matrix2:
        return Matrix2(*(k * v for v in self))

    @property
    def T(self) -> Matrix2:
        return Matrix2(self.a, self.c, self.b, self.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def is_symmetric(self) -> bool:
        return self.b == self.c

    def is_skew_symmetric(self) -> bool:
        return self.a == 0 and self.d == 0 and self.b == -self.c

    def content(self) -> int:
        return _gcd(*self)

    def to_triple(self) -> IntTriple:
        if not self.is_symmetric():
            raise ValueError(f"matrix {self.rows()} is not symmetric")
        return IntTriple(self.a, self.b, self.d)


IDENTITY = Matrix2(1, 0, 0, 1)
J = Matrix2(0, 1, -1, 0)


class IntTriple(NamedTuple):
    x0: int
    x1: int
    x2: int

    @classmethod
    def from_matrix(cls, m: Matrix2) -> IntTriple:
        return m.to_triple()

    def matrix(self) -> Matrix2:
        return Matrix2(self.x0, self.x1, self.x1, self.x2)

    @property
    def norm(self) -> int:
        """Max-norm."""
        return max(abs(self.x0), abs(self.x1), abs(self.x2))

    def __neg__(self) -> IntTriple:
        return IntTriple(-self.x0, -self.x1, -self.x2)

    def scale(self, k: int) -> IntTriple:
        return IntTriple(k * self.x0, k * self.x1, k * self.x2)

    def content(self) -> int:
        # the content squared divides det2, which is small for the points met here
        return _gcd(det2(self), *self)

    def is_primitive(self) -> bool:
        return self.content() == 1 and primitive(self) == self


def primitive(x) -> IntTriple:
    """Divide by the gcd of the coordinates and make the first nonzero one positive."""
    x = IntTriple(*x)
    g = x.content()
    if g == 0:
        raise ValueError("the zero point has no primitive representative")
    if g != 1:
        x = IntTriple(*(int(gmpy2.mpz(v) // g) for v in x))
    lead = next(v for v in x if v)
    return -x if lead < 0 else x


def primitive_factor(x) -> Fraction:
    """The rational ``rho`` with ``primitive(x) == rho * x``."""
    x = IntTriple(*x)
    lead = next(v for v in x if v)
    sign = -1 if lead < 0 else 1
    return Fraction(sign, x.content())


def dot(x, y) -> int:
    x, y = _z(x), _z(y)
    return int(x[0] * y[0] + x[1] * y[1] + x[2] * y[2])


def euclid_norm_sq(x) -> int:
    return dot(x, x)


def det2(x) -> int:
    """Determinant of the symmetric matrix of ``x``: ``x0*x2 - x1**2``."""
    x0, x1, x2 = _z(x)
    return int(x0 * x2 - x1 * x1)


def det3(x, y, z) -> int:
    """Determinant of the 3x3 matrix with rows ``x``, ``y``, ``z``."""
    return dot(x, wedge(y, z))


def adjoint(m: Matrix2) -> Matrix2:
    a, b, c, d = m
    return Matrix2(d, -b, -c, a)


def bracket(x, z) -> IntTriple:
    """``[x, x, z] = x Adj(z) x`` read back as a point."""
    xm = IntTriple(*x).matrix()
    prod = xm @ adjoint(IntTriple(*z).matrix()) @ xm
    assert prod.is_symmetric()
    return prod.to_triple()


def wedge(x, y) -> IntTriple:
    """Vector product ``x ^ y``."""
    x, y = _z(x), _z(y)
    return IntTriple(int(x[1] * y[2] - x[2] * y[1]),
                     int(x[2] * y[0] - x[0] * y[2]),
                     int(x[0] * y[1] - x[1] * y[0]))


def trace_mj(m: Matrix2) -> int:
    """``trace(M J)`` with ``J = [[0, 1], [-1, 0]]``, equal to ``c - b``."""
    return (m @ J).trace()


def sandwich(y_next, s: Matrix2, y) -> Matrix2:
    """The (not necessarily symmetric) product ``y_next * S * y``."""
    return IntTriple(*y_next).matrix() @ s @ IntTriple(*y).matrix()


class Poly2(NamedTuple):
    """``p0 + p1*T + p2*T**2``."""

    p0: int
    p1: int
    p2: int

    @property
    def height(self) -> int:
        return max(abs(self.p0), abs(self.p1), abs(self.p2))

    def __call__(self, t):
        return self.p0 + t * (self.p1 + t * self.p2)

    def __neg__(self) -> Poly2:
        return Poly2(-self.p0, -self.p1, -self.p2)

    def normalized(self) -> Poly2:
        """Sign chosen so the highest degree nonzero coefficient is positive."""
        lead = next((c for c in (self.p2, self.p1, self.p0) if c), 0)
        return -self if lead < 0 else self


class MonicPoly3(NamedTuple):
    """``T**3 + p*T**2 + q*T + r``."""

    p: int
    q: int
    r: int

    @property
    def height(self) -> int:
        return max(1, abs(self.p), abs(self.q), abs(self.r))

    def __call__(self, t):
        return self.r + t * (self.q + t * (self.p + t))

    def derivative(self, t):
        return self.q + t * (2 * self.p + 3 * t)


def wedge_poly(P, Q) -> IntTriple:
    """``P ^ Q = (p2 q1 - p1 q2, p0 q2 - p2 q0, p1 q0 - p0 q1)``."""
    p0, p1, p2 = P
    q0, q1, q2 = Q
    return IntTriple(p2 * q1 - p1 * q2, p0 * q2 - p2 * q0, p1 * q0 - p0 * q1)


def resultant(P, Q) -> int:
    """Resultant of two formal quadratics (4x4 Sylvester determinant).

    The degree is always taken to be 2, so a vanishing leading coefficient on
    both sides gives 0.
    """
    p0, p1, p2 = P
    q0, q1, q2 = Q
    return (p2 * q0 - p0 * q2) ** 2 - (p2 * q1 - p1 * q2) * (p1 * q0 - p0 * q1)


def height_l(x, xi: CertifiedReal) -> CertifiedReal:
    """``L_xi(x) = max(|x1 - xi x0|, |x2 - xi**2 x0|)``."""
    x0, x1, x2 = x
    if x0 == 0:
        return CertifiedReal.exact(max(abs(x1), abs(x2)), xi.prec)
    first = abs(x1 - xi * x0)
    second = abs(x2 - xi.square() * x0)
    return first.max(second)


def det2_envelope(x, xi: CertifiedReal) -> CertifiedReal:
    """``||x|| (|x1 - xi x0| + |x2 - xi x1|)``, an explicit upper bound for ``|det2(x)|``."""
    x0, x1, x2 = x
    return (abs(x1 - xi * x0) + abs(x2 - xi * x1)) * IntTriple(*x).norm


def proj_dist_exact(x, y) -> Fraction:
    """``||x ^ y|| / (||x|| ||y||)`` with the max-norm."""
    nx, ny = IntTriple(*x).norm, IntTriple(*y).norm
    if nx == 0 or ny == 0:
        raise ValueError("projective distance needs nonzero points")
    return Fraction(wedge(x, y).norm, nx * ny)


def proj_dist(x, y, prec: int = DEFAULT_PREC) -> CertifiedReal:
    return CertifiedReal.exact(proj_dist_exact(x, y), prec)


def dist_to_nearest_int(r: CertifiedReal) -> CertifiedReal:
    return r.dist_to_nearest_int()


def decimal(n: int) -> str:
    """Decimal string of an integer of any size (CPython caps ``str`` at 4300 digits)."""
    return gmpy2.mpz(n).digits()
