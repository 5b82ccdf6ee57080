"""Exact arithmetic in Z[gamma], gamma = (1 + sqrt 5) / 2."""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering


def fibonacci(n: int) -> int:
    """F(n) with F(0) = 0, F(1) = 1, extended to negative n by F(-n) = (-1)^(n+1) F(n)."""
    if n < 0:
        f = fibonacci(-n)
        return f if n % 2 else -f
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@total_ordering
@dataclass(frozen=True)
class GoldenExact:
    """The real number ``a + b*gamma`` with integer ``a`` and ``b``.

    Products are reduced with ``gamma**2 = gamma + 1``. Ordering is decided
    with integer arithmetic only, so boundary cases such as
    ``2*gamma**2 == 2*gamma + 2`` compare equal rather than being at the
    mercy of a floating point rounding.
    """

    a: int = 0
    b: int = 0

    @classmethod
    def gamma_power(cls, j: int) -> GoldenExact:
        # gamma^j = F_j gamma + F_{j-1}
        return cls(fibonacci(j - 1), fibonacci(j))

    @classmethod
    def coerce(cls, x) -> GoldenExact:
        if isinstance(x, GoldenExact):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        return NotImplemented

    def __add__(self, other):
        other = GoldenExact.coerce(other)
        if other is NotImplemented:
            return other
        return GoldenExact(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return GoldenExact(-self.a, -self.b)

    def __sub__(self, other):
        other = GoldenExact.coerce(other)
        if other is NotImplemented:
            return other
        return GoldenExact(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = GoldenExact.coerce(other)
        if other is NotImplemented:
            return other
        # (a + b g)(c + d g) = ac + (ad + bc) g + bd (g + 1)
        a, b, c, d = self.a, self.b, other.a, other.b
        return GoldenExact(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def sign(self) -> int:
        # a + b*gamma = ((2a + b) + b*sqrt5) / 2
        u, v = 2 * self.a + self.b, self.b
        su = (u > 0) - (u < 0)
        sv = (v > 0) - (v < 0)
        if su == sv or sv == 0:
            return su
        if su == 0:
            return sv
        # opposite signs: the term of larger magnitude wins
        cmp = u * u - 5 * v * v
        if cmp == 0:
            return 0  # unreachable since sqrt 5 is irrational; kept for clarity
        return su if cmp > 0 else sv

    def __eq__(self, other):
        other = GoldenExact.coerce(other)
        if other is NotImplemented:
            return other
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        other = GoldenExact.coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).sign() < 0

    def __float__(self) -> float:
        return self.a + self.b * (1 + 5 ** 0.5) / 2

    def __repr__(self) -> str:
        return f"GoldenExact({self.a}, {self.b})"


def golden_compare(u: GoldenExact, v: GoldenExact) -> int:
    """Return -1, 0 or 1 as ``u`` is less than, equal to or greater than ``v``."""
    return (u - v).sign()


def golden_weight(coefficients) -> GoldenExact:
    """Exact value of ``sum_j coefficients[j] * gamma**j``."""
    total = GoldenExact()
    for j, c in enumerate(coefficients):
        if c:
            total = total + c * GoldenExact.gamma_power(j)
    return total
