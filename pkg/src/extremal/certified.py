"""Dyadic midpoint-radius real arithmetic with rigorous enclosures.

A :class:`CertifiedReal` stands for the closed interval
``[(man - rad) * 2**exp, (man + rad) * 2**exp]``. Every operation returns
an interval that contains the exact result of the same operation applied to
any points of the operand intervals. Midpoints are truncated to ``prec``
bits and the truncation error is folded into the radius, so the working
precision is carried by the values themselves rather than by a global
context.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional, Union

import gmpy2
import mpmath

DEFAULT_PREC = 128
DEFAULT_MAX_PREC = 1 << 23
# bits kept in the radius mantissa; precision below the radius scale is noise
_RAD_BITS = 32

Number = Union[int, Fraction, "CertifiedReal"]


class PrecisionError(ArithmeticError):
    """Raised when an enclosure is too wide to decide a question."""


def _floordiv(a: int, b: int) -> int:
    # CPython long division is quadratic; gmpy2 is not
    if a.bit_length() > 4096 or b.bit_length() > 4096:
        return int(gmpy2.mpz(a) // gmpy2.mpz(b))
    return a // b


def _ceildiv(a: int, b: int) -> int:
    return -_floordiv(-a, b)


def _shift(n: int, s: int) -> int:
    return n << s if s >= 0 else n >> -s


class CertifiedReal:
    __slots__ = ("man", "rad", "exp", "prec")

    def __init__(self, man: int, rad: int = 0, exp: int = 0, prec: int = DEFAULT_PREC):
        if rad < 0:
            raise ValueError("radius must be non-negative")
        man, rad, exp = int(man), int(rad), int(exp)
        s = max(man.bit_length() - prec, rad.bit_length() - _RAD_BITS, 0)
        if s:
            man >>= s  # floor: error below one unit
            rad = (rad >> s) + 2
            exp += s
        self.man, self.rad, self.exp, self.prec = man, rad, exp, prec

    # -- construction -------------------------------------------------------

    @classmethod
    def exact(cls, x: Union[int, Fraction], prec: int = DEFAULT_PREC) -> CertifiedReal:
        """Enclosure of an integer or rational, exact when ``x`` is dyadic."""
        if isinstance(x, int):
            return cls(x, 0, 0, prec=max(prec, x.bit_length()))
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        if den & (den - 1) == 0:
            e = den.bit_length() - 1
            return cls(num, 0, -e, prec=max(prec, num.bit_length()))
        s = prec + den.bit_length() - num.bit_length() + 2
        man = _floordiv(num << s, den) if s >= 0 else _floordiv(num, den << -s)
        return cls(man, 1, -s, prec=prec)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, prec: int = DEFAULT_PREC) -> CertifiedReal:
        """Smallest convenient enclosure of the rational interval ``[lo, hi]``."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        mid = cls.exact((lo + hi) / 2, prec)
        return mid.widen((hi - lo) / 2)

    @classmethod
    def coerce(cls, x: Number, prec: int) -> CertifiedReal:
        if isinstance(x, CertifiedReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.exact(x, prec)
        raise TypeError(f"cannot certify {type(x).__name__}")

    def with_prec(self, prec: int) -> CertifiedReal:
        return CertifiedReal(self.man, self.rad, self.exp, prec)

    def widen(self, r: Union[int, Fraction]) -> CertifiedReal:
        """Enclosure enlarged by an extra non-negative radius ``r``."""
        r = Fraction(r)
        if r < 0:
            raise ValueError("radius must be non-negative")
        if r == 0:
            return self
        # express r in units of 2**e, rounding up, for some e <= self.exp
        e = min(self.exp, r.numerator.bit_length() - r.denominator.bit_length() - _RAD_BITS - 2)
        if e < 0:
            units = _ceildiv(r.numerator << -e, r.denominator)
        else:
            units = _ceildiv(r.numerator, r.denominator << e)
        s = self.exp - e
        return CertifiedReal(self.man << s, (self.rad << s) + units, e, self.prec)

    # -- inspection ---------------------------------------------------------

    @property
    def lower(self) -> Fraction:
        return _dyadic(self.man - self.rad, self.exp)

    @property
    def upper(self) -> Fraction:
        return _dyadic(self.man + self.rad, self.exp)

    @property
    def mid(self) -> Fraction:
        return _dyadic(self.man, self.exp)

    @property
    def radius(self) -> Fraction:
        return _dyadic(self.rad, self.exp)

    def radius_le(self, r: Union[int, Fraction]) -> bool:
        return self.radius <= Fraction(r)

    def radius_log2(self) -> float:
        """Upper estimate of log2 of the radius (``-inf`` for exact values)."""
        if self.rad == 0:
            return -math.inf
        return self.exp + math.log2(self.rad)

    def is_exact(self) -> bool:
        return self.rad == 0

    def contains(self, x: Number) -> bool:
        if isinstance(x, CertifiedReal):
            return self.lower <= x.lower and x.upper <= self.upper
        x = Fraction(x)
        return self.lower <= x <= self.upper

    def overlaps(self, other: CertifiedReal) -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def contains_zero(self) -> bool:
        return abs(self.man) <= self.rad

    def sign(self) -> int:
        """Sign of every point of the interval; raises if it straddles zero."""
        if self.man - self.rad > 0:
            return 1
        if self.man + self.rad < 0:
            return -1
        if self.man == 0 and self.rad == 0:
            return 0
        raise PrecisionError("sign undecidable: interval contains zero")

    def compare(self, other: Number) -> int:
        """-1 or 1 when the ordering is certain, 0 only for identical exact values."""
        diff = self - other
        if diff.man == 0 and diff.rad == 0:
            return 0
        return diff.sign()

    def __lt__(self, other: Number) -> bool:
        return self.compare(other) < 0

    def __gt__(self, other: Number) -> bool:
        return self.compare(other) > 0

    def __le__(self, other: Number) -> bool:
        return self.compare(other) <= 0

    def __ge__(self, other: Number) -> bool:
        return self.compare(other) >= 0

    def __float__(self) -> float:
        return float(mpmath.mpf((self.man, self.exp)))

    def __repr__(self) -> str:
        return f"CertifiedReal({mpmath.nstr(self._mpf_mid(), 17)} +/- {self.radius_float():.3g})"

    def radius_float(self) -> float:
        if self.rad == 0:
            return 0.0
        return float(mpmath.mpf((self.rad, self.exp)))

    def _mpf_mid(self):
        with mpmath.workprec(max(64, self.man.bit_length())):
            return mpmath.mpf((self.man, self.exp))

    # -- arithmetic ---------------------------------------------------------

    def _binary_prec(self, other: CertifiedReal) -> int:
        return max(self.prec, other.prec)

    def __neg__(self) -> CertifiedReal:
        return CertifiedReal(-self.man, self.rad, self.exp, self.prec)

    def __pos__(self) -> CertifiedReal:
        return self

    def __abs__(self) -> CertifiedReal:
        if self.man - self.rad >= 0:
            return self
        if self.man + self.rad <= 0:
            return -self
        # straddles zero: [0, max(|lo|, |hi|)]
        top = abs(self.man) + self.rad
        return CertifiedReal(top, top, self.exp - 1, self.prec)

    def __add__(self, other: Number) -> CertifiedReal:
        if not isinstance(other, CertifiedReal):
            if isinstance(other, int) and other == 0:
                return self
            other = CertifiedReal.coerce(other, self.prec)
        e = min(self.exp, other.exp)
        man = _shift(self.man, self.exp - e) + _shift(other.man, other.exp - e)
        rad = _shift(self.rad, self.exp - e) + _shift(other.rad, other.exp - e)
        return CertifiedReal(man, rad, e, self._binary_prec(other))

    __radd__ = __add__

    def __sub__(self, other: Number) -> CertifiedReal:
        if not isinstance(other, CertifiedReal):
            other = CertifiedReal.coerce(other, self.prec)
        return self + (-other)

    def __rsub__(self, other: Number) -> CertifiedReal:
        return CertifiedReal.coerce(other, self.prec) - self

    def __mul__(self, other: Number) -> CertifiedReal:
        if isinstance(other, int):
            return CertifiedReal(self.man * other, self.rad * abs(other), self.exp,
                                 max(self.prec, other.bit_length()))
        if not isinstance(other, CertifiedReal):
            other = CertifiedReal.coerce(other, self.prec)
        a, b = self, other
        man = a.man * b.man
        rad = abs(a.man) * b.rad + abs(b.man) * a.rad + a.rad * b.rad
        return CertifiedReal(man, rad, a.exp + b.exp, a._binary_prec(b))

    __rmul__ = __mul__

    def square(self) -> CertifiedReal:
        sq = self * self
        if not self.contains_zero():
            return sq
        # x*x over an interval through zero is [0, max^2]
        return abs(sq) if sq.man - sq.rad >= 0 else _nonneg_part(sq)

    def __pow__(self, n: int) -> CertifiedReal:
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = CertifiedReal.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def reciprocal(self) -> CertifiedReal:
        sgn = self.sign()
        if sgn == 0:
            raise ZeroDivisionError("reciprocal of zero")
        lo, hi = sorted((abs(self.man - self.rad), abs(self.man + self.rad)))
        if lo == 0:
            raise PrecisionError("reciprocal undecidable: interval contains zero")
        s = self.prec + hi.bit_length() + 2
        one = 1 << s
        r_lo = _floordiv(one, hi)
        r_hi = _ceildiv(one, lo)
        # 1/|x| in [r_lo, r_hi] * 2**(-s - exp)
        out = CertifiedReal(r_lo + r_hi, r_hi - r_lo, -s - self.exp - 1, self.prec)
        return out if sgn > 0 else -out

    def __truediv__(self, other: Number) -> CertifiedReal:
        if isinstance(other, int) and other != 0 and other & (other - 1) == 0 and other > 0:
            return CertifiedReal(self.man, self.rad, self.exp - (other.bit_length() - 1), self.prec)
        if not isinstance(other, CertifiedReal):
            other = CertifiedReal.coerce(other, self.prec)
        return self * other.reciprocal()

    def __rtruediv__(self, other: Number) -> CertifiedReal:
        return CertifiedReal.coerce(other, self.prec) / self

    def max(self, other: Number) -> CertifiedReal:
        other = CertifiedReal.coerce(other, self.prec)
        lo = max(self.lower, other.lower)
        hi = max(self.upper, other.upper)
        if self.lower >= other.upper:
            return self
        if other.lower >= self.upper:
            return other
        return CertifiedReal.from_bounds(lo, hi, self._binary_prec(other))

    def min(self, other: Number) -> CertifiedReal:
        return -((-self).max(-CertifiedReal.coerce(other, self.prec)))

    # -- integer rounding ---------------------------------------------------

    def floor_bounds(self) -> tuple[int, int]:
        """``(floor(lower), floor(upper))``."""
        lo, hi = self.man - self.rad, self.man + self.rad
        if self.exp >= 0:
            return lo << self.exp, hi << self.exp
        return lo >> -self.exp, hi >> -self.exp

    def nearest_int(self) -> int:
        """The integer nearest to every point of the interval."""
        shifted = self + Fraction(1, 2)
        a, b = shifted.floor_bounds()
        if a != b:
            raise PrecisionError("nearest integer undecidable")
        return a

    def dist_to_nearest_int(self) -> CertifiedReal:
        """Enclosure of the distance from the value to a closest integer."""
        if self.radius >= Fraction(1, 4):
            raise PrecisionError("radius too large to bound the distance to an integer")
        shifted = self + Fraction(1, 2)
        a, b = shifted.floor_bounds()
        if a == b:
            return abs(self - a)
        # straddles a half-integer a + 1/2: the distance is at most 1/2
        low = min(abs(self - a).lower, abs(self - b).lower)
        return CertifiedReal.from_bounds(max(low, Fraction(0)), Fraction(1, 2), self.prec)

    # -- transcendental -----------------------------------------------------

    def log(self) -> CertifiedReal:
        """Natural logarithm of a positive interval.

        Endpoints are evaluated with mpmath and padded by 2**8 ulp of the
        working precision, which dominates mpmath's few-ulp error.
        """
        if self.man - self.rad <= 0:
            raise PrecisionError("log of an interval not certainly positive")
        lo, hi = self.man - self.rad, self.man + self.rad
        wp = min(self.prec, 512) + 32 + abs(self.exp).bit_length()
        with mpmath.workprec(wp):
            ln2 = mpmath.ln2
            flo = mpmath.log(lo) + self.exp * ln2
            fhi = mpmath.log(hi) + self.exp * ln2
            return _from_mpf_bounds(flo, fhi, wp, self.prec)

    def exp_(self) -> CertifiedReal:
        """Exponential, padded like :meth:`log`."""
        wp = min(self.prec, 512) + 32
        with mpmath.workprec(wp + abs(self.exp).bit_length() + self.man.bit_length()):
            flo = mpmath.exp(mpmath.mpf((self.man - self.rad, self.exp)))
            fhi = mpmath.exp(mpmath.mpf((self.man + self.rad, self.exp)))
        with mpmath.workprec(wp):
            return _from_mpf_bounds(flo, fhi, wp, self.prec)

    def rpow(self, alpha: CertifiedReal) -> CertifiedReal:
        """``self ** alpha`` for positive ``self`` and real ``alpha``."""
        return (alpha * self.log()).exp_()

    # -- formatting ---------------------------------------------------------

    def to_json(self, digits: int = 20) -> dict:
        """``{"mid": decimal string, "rad": decimal string}`` with a rigorous radius."""
        mid_str, rad = _decimal_enclosure(self, digits)
        return {"mid": mid_str, "rad": _decimal_upper(rad, 3)}

    @classmethod
    def from_json(cls, obj: dict, prec: int = DEFAULT_PREC) -> CertifiedReal:
        mid = Fraction(obj["mid"])
        rad = Fraction(obj["rad"])
        return cls.exact(mid, prec).widen(rad)

    def decimal_string(self, max_digits: Optional[int] = None) -> str:
        """``<digits> +/- 10^{-k}``: every printed digit is backed by the radius.

        ``max_digits`` caps ``k``.
        """
        if self.rad == 0:
            k = 60
        else:
            k = max(0, math.floor(-(self.radius_log2()) * math.log10(2)) - 1)
        if max_digits is not None:
            k = min(k, max_digits)
        while True:
            scaled = self * (10 ** k)
            n = scaled.nearest_int_or_none()
            if n is not None and abs(scaled - n).upper <= 1:
                break
            if k == 0:
                return f"{mpmath.nstr(self._mpf_mid(), 5)} ± {self.radius_float():.1e}"
            k -= 1
        sign = "-" if n < 0 else ""
        s = str(gmpy2.mpz(abs(n))).rjust(k + 1, "0")
        body = s[:-k] + "." + s[-k:] if k else s
        return f"{sign}{body} ± 10^-{k}"

    def nearest_int_or_none(self):
        try:
            return self.nearest_int()
        except PrecisionError:
            return None


def _nonneg_part(x: CertifiedReal) -> CertifiedReal:
    return CertifiedReal.from_bounds(Fraction(0), max(x.upper, Fraction(0)), x.prec)


def _dyadic(man: int, exp: int) -> Fraction:
    if exp >= 0 or man == 0:
        return Fraction(man << exp) if exp >= 0 else Fraction(0)
    # the reduced form only needs trailing zero bits removed, which avoids a big gcd
    tz = min((man & -man).bit_length() - 1, -exp)
    return Fraction(man >> tz, 1 << (-exp - tz), _normalize=False)


def _from_mpf_bounds(flo, fhi, wp: int, prec: int) -> CertifiedReal:
    pad = mpmath.ldexp(1, -wp + 8)
    lo = flo - pad * (abs(flo) + 1)
    hi = fhi + pad * (abs(fhi) + 1)
    return CertifiedReal.from_bounds(_mpf_fraction(lo), _mpf_fraction(hi), prec)


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if not man:
        return Fraction(0)
    return _dyadic(-int(man) if sign else int(man), int(exp))


def _decimal_enclosure(x: CertifiedReal, digits: int) -> tuple[str, Fraction]:
    with mpmath.workprec(max(64, int(digits * 3.33) + 16)):
        mid = mpmath.mpf((x.man, x.exp))
        mid_str = mpmath.nstr(mid, digits, strip_zeros=False, min_fixed=-4, max_fixed=6)
    err = abs(Fraction(mid_str) - x.mid)
    return mid_str, x.radius + err


def _decimal_upper(r: Fraction, digits: int) -> str:
    """Decimal string with ``digits`` significant digits, rounded up, for ``r >= 0``."""
    if r == 0:
        return "0"
    k = math.floor(math.log10(r.numerator) - math.log10(r.denominator))
    while True:
        scale = Fraction(10) ** (k - digits + 1)
        q = _ceildiv(r.numerator * scale.denominator, r.denominator * scale.numerator)
        if q < 10 ** digits:
            break
        k += 1
    s = str(q)
    mant = s[0] + ("." + s[1:] if len(s) > 1 else "")
    out = f"{mant}e{k}"
    assert Fraction(out) >= r
    return out


def gamma_enclosure(prec: int = DEFAULT_PREC) -> CertifiedReal:
    """The golden ratio ``(1 + sqrt 5) / 2`` to ``prec`` bits."""
    s = math.isqrt(5 << (2 * prec))
    # sqrt5 in [s, s+1] * 2**-prec
    return CertifiedReal((s << 1) + (1 << (prec + 1)) + 1, 1, -prec - 2, prec)


def certify(compute: Callable[[int], CertifiedReal], target_radius: Union[int, Fraction],
            prec: int = DEFAULT_PREC, max_prec: int = DEFAULT_MAX_PREC) -> CertifiedReal:
    """Rerun ``compute(prec)`` with doubling precision until the radius is small enough."""
    target = Fraction(target_radius)
    while True:
        value = compute(prec)
        if value.radius <= target:
            return value
        if prec >= max_prec:
            raise PrecisionError(
                f"radius {value.radius_float():.3g} above target at the {max_prec}-bit cap")
        prec = min(2 * prec, max_prec)
