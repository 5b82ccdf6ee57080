"""Extremal real numbers built from an integer matrix seed.

Starting from symmetric ``y1``, ``y2`` and a matrix ``M``, each new term is
the primitive point proportional to ``y_{i+1} S y_i``, where ``S = M`` when
the index of the new term is odd and ``S = M^t`` when it is even. The
projective limit of the terms is ``(1, xi, xi**2)``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import gmpy2

from .arith import (IntTriple, Matrix2, decimal, det2, primitive, primitive_factor,
                    sandwich, trace_mj, wedge)
from .certified import CertifiedReal

log = logging.getLogger(__name__)


class SeedError(ValueError):
    """A seed violates one of the hard conditions of the construction."""

    def __init__(self, failures: list[str], report: Optional[SeedReport] = None):
        super().__init__("; ".join(failures))
        self.failures = failures
        self.report = report


class InsufficientTermsError(ValueError):
    """The generated prefix cannot certify the requested precision."""


@dataclass(frozen=True)
class Seed:
    matrix: Matrix2
    y1: IntTriple
    y2: IntTriple

    def __post_init__(self):
        object.__setattr__(self, "matrix", Matrix2(*self.matrix))
        object.__setattr__(self, "y1", IntTriple(*self.y1))
        object.__setattr__(self, "y2", IntTriple(*self.y2))


def fibonacci_seed(a: int, b: int) -> Seed:
    """``y1 = A``, ``y2 = ABA`` and ``M = AB`` with ``A = [[a, 1], [1, 0]]``, ``B = [[b, 1], [1, 0]]``."""
    if a < 1 or b < 1:
        raise SeedError(["a and b must be positive"])
    if a == b:
        raise SeedError(["a and b must be distinct"])
    A = Matrix2(a, 1, 1, 0)
    B = Matrix2(b, 1, 1, 0)
    return Seed(A @ B, A.to_triple(), (A @ B @ A).to_triple())


def example_two_seed(a: int) -> Seed:
    """Seed with ``M = [[a, 1], [-1, 0]]`` and ``y1 = (1, 1, 0)``."""
    if a < 1:
        raise SeedError(["a must be positive"])
    y2 = (a**3 + 2 * a, a**3 - a**2 + 2 * a - 1, a**3 - 2 * a**2 + 3 * a - 2)
    return Seed(Matrix2(a, 1, -1, 0), IntTriple(1, 1, 0), IntTriple(*y2))


def _step_matrix(m: Matrix2, new_index: int) -> Matrix2:
    return m if new_index % 2 == 1 else m.T


def _rescale(x: IntTriple, rho: Fraction) -> IntTriple:
    """``rho * x`` for a ``rho`` known to give an integer point."""
    if rho.denominator == 1:
        return x if rho == 1 else IntTriple(*(-v for v in x))
    d = gmpy2.mpz(rho.denominator)
    return IntTriple(*(int(gmpy2.divexact(gmpy2.mpz(v), d)) * rho.numerator for v in x))


@dataclass(frozen=True)
class ExtremalSequence:
    """Terms ``y_1, y_2, ...`` (stored 0-based) with the exact factors ``rho_i``.

    ``rhos[k]`` is the rational with
    ``triples[k + 2] == rhos[k] * (triples[k + 1] S triples[k])``.
    ``transposed[k]`` records whether ``S`` was ``M^t`` for that step.
    """

    seed: Seed
    triples: tuple = ()
    rhos: tuple = ()
    transposed: tuple = ()

    @classmethod
    def start(cls, seed: Seed) -> ExtremalSequence:
        return cls(seed, (seed.y1, seed.y2), (), ())

    @classmethod
    def generate(cls, seed: Seed, terms: int) -> ExtremalSequence:
        seq = cls.start(seed)
        return seq.extend(max(0, terms - 2))

    def __len__(self) -> int:
        return len(self.triples)

    def term(self, i: int) -> IntTriple:
        """``y_i`` with the 1-based index used throughout."""
        if i < 1:
            raise IndexError("terms are indexed from 1")
        return self.triples[i - 1]

    @property
    def norms(self) -> list[int]:
        return [y.norm for y in self.triples]

    def extend(self, count: int) -> ExtremalSequence:
        triples = list(self.triples)
        rhos = list(self.rhos)
        transposed = list(self.transposed)
        m = self.seed.matrix
        for _ in range(count):
            new_index = len(triples) + 1
            s = _step_matrix(m, new_index)
            prod = sandwich(triples[-1], s, triples[-2])
            if not prod.is_symmetric():
                raise SeedError([f"product for y_{new_index} is not symmetric"])
            raw = prod.to_triple()
            if raw == (0, 0, 0):
                raise SeedError([f"product for y_{new_index} vanishes"])
            rho = primitive_factor(raw)
            rhos.append(rho)
            triples.append(_rescale(raw, rho))
            transposed.append(s != m)
        return ExtremalSequence(self.seed, tuple(triples), tuple(rhos), tuple(transposed))

    def step_matrix(self, new_index: int) -> Matrix2:
        """``S`` used to produce ``y_{new_index}``."""
        return _step_matrix(self.seed.matrix, new_index)

    # -- interchange --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "matrix": [_s(v) for v in self.seed.matrix],
            "y1": [_s(v) for v in self.seed.y1],
            "y2": [_s(v) for v in self.seed.y2],
            "triples": [[_s(v) for v in y] for y in self.triples],
            "rhos": [[_s(r.numerator), _s(r.denominator)] for r in self.rhos],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, obj: dict) -> ExtremalSequence:
        try:
            seed = Seed(Matrix2(*map(_i, obj["matrix"])),
                        IntTriple(*map(_i, obj["y1"])), IntTriple(*map(_i, obj["y2"])))
            triples = tuple(IntTriple(*map(_i, y)) for y in obj["triples"])
            rhos = tuple(Fraction(_i(n), _i(d)) for n, d in obj["rhos"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed sequence document: {exc!r}") from exc
        if len(triples) < 2 or triples[0] != seed.y1 or triples[1] != seed.y2:
            raise ValueError("malformed sequence document: triples must start with y1, y2")
        if len(rhos) != len(triples) - 2:
            raise ValueError("malformed sequence document: expected one rho per generated term")
        transposed = tuple(_step_matrix(seed.matrix, k + 3) != seed.matrix
                           for k in range(len(rhos)))
        return cls(seed, triples, rhos, transposed)

    @classmethod
    def from_json(cls, text: str) -> ExtremalSequence:
        return cls.from_dict(json.loads(text))


def _s(n: int) -> str:
    return decimal(n)


def _i(s) -> int:
    if isinstance(s, int):
        return s
    return int(gmpy2.mpz(str(s).strip()))


@dataclass
class SeedReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    det_m: int = 0
    det_y1: int = 0
    det_y2: int = 0
    trace_mj: int = 0
    first_norms: list[int] = field(default_factory=list)
    min_growth_ratio: Optional[Fraction] = None

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL: " + "; ".join(self.failures)
        ratio = float(self.min_growth_ratio) if self.min_growth_ratio is not None else None
        return (f"{status}\n det(M)={self.det_m} det(y1)={self.det_y1} det(y2)={self.det_y2}"
                f" trace(MJ)={self.trace_mj}\n norms={self.first_norms}\n"
                f" min ||y_(i+2)|| / (||y_(i+1)|| ||y_i||) = {ratio}")


def validate_seed(seed: Seed, raise_on_failure: bool = True) -> SeedReport:
    """Check the static seed conditions and report growth evidence.

    Unboundedness and the growth constant cannot be decided from the seed,
    so the report lists the first ten norms and the smallest observed
    ``||y_{i+2}|| / (||y_{i+1}|| ||y_i||)`` instead.
    """
    m, y1, y2 = seed.matrix, seed.y1, seed.y2
    failures = []
    if m.det() == 0:
        failures.append("M singular")
    if m.is_symmetric():
        failures.append("M symmetric")
    if m.is_skew_symmetric():
        failures.append("M skew-symmetric")
    if m.content() != 1:
        failures.append("entries of M not relatively prime")
    for name, y in (("y1", y1), ("y2", y2)):
        if y.content() != 1 or primitive(y) != y:
            failures.append(f"{name} not primitive")
        if det2(y) == 0:
            failures.append(f"{name} singular")
    if not sandwich(y2, m, y1).is_symmetric():
        failures.append("y2 M y1 not symmetric")
    report = SeedReport(not failures, failures, m.det(), det2(y1), det2(y2), trace_mj(m))
    if not failures:
        seq = ExtremalSequence.generate(seed, 10)
        report.first_norms = seq.norms
        ratios = [Fraction(n2, n1 * n0) for n0, n1, n2 in zip(seq.norms, seq.norms[1:], seq.norms[2:])]
        report.min_growth_ratio = min(ratios)
    if failures and raise_on_failure:
        raise SeedError(failures, report)
    return report


# -- the limit point ---------------------------------------------------------


_BOUND_PREC = 64


def _distance_terms(seq: ExtremalSequence, start: int) -> list[CertifiedReal]:
    """Enclosures of ``2**(j - start) d(y_j, y_{j+1})`` for ``j = start .. n - 1`` (1-based)."""
    out = []
    for j in range(start, len(seq)):
        x, y = seq.term(j), seq.term(j + 1)
        num = CertifiedReal.exact(wedge(x, y).norm << (j - start)).with_prec(_BOUND_PREC)
        out.append(num / CertifiedReal.exact(x.norm * y.norm).with_prec(_BOUND_PREC))
    return out


def projective_tail_bound(seq: ExtremalSequence, i: int) -> Fraction:
    """Upper bound for ``d(y_i, y)`` where ``[y]`` is the limit point.

    Iterating ``d(x, z) <= d(x, y) + 2 d(y, z)`` gives
    ``d(y_i, y) <= sum_j 2**(j - i) d(y_j, y_{j+1})``. Generated terms enter
    through tight enclosures; the series beyond them is majorized by
    ``last / 3``, i.e. assuming each further term is below a quarter of its
    predecessor. The last observed ratio must be certainly below 1/8 for
    this to be used.
    """
    terms = _distance_terms(seq, i)
    if len(terms) < 2:
        raise InsufficientTermsError(f"need at least two terms after y_{i}")
    gap = terms[-2] - terms[-1] * 8
    if gap.man - gap.rad <= 0:
        raise InsufficientTermsError(
            "distance ratios are not yet geometric; extend the sequence")
    total = terms[-1] / 3
    for t in terms:
        total = total + t
    return total.upper


def xi_from_sequence(seq: ExtremalSequence, target_radius, index: Optional[int] = None) -> CertifiedReal:
    """Certified enclosure of ``xi = lim y_{i,1} / y_{i,0}``.

    Let ``D`` bound ``d(y_i, y)`` and let ``y`` be scaled to max-norm 1. Then
    ``|y_1 y_{i,0} - y_0 y_{i,1}| <= ||y_i|| D`` and
    ``|y_0| >= |y_{i,0}| / ||y_i|| - D``, which bounds ``|xi - y_{i,1}/y_{i,0}|``.
    """
    target = Fraction(target_radius)
    n = len(seq)
    if index is None:
        index = n - 2
    while index >= 1 and seq.term(index).x0 == 0:
        index -= 1
    if index < 1:
        raise InsufficientTermsError("sequence too short")
    y = seq.term(index)
    dist = CertifiedReal.exact(projective_tail_bound(seq, index)).with_prec(_BOUND_PREC)
    x0 = CertifiedReal.exact(abs(y.x0)).with_prec(_BOUND_PREC)
    lead = x0 / y.norm - dist
    if lead.man - lead.rad <= 0:
        raise InsufficientTermsError("limit direction not yet separated from x0 = 0")
    err = (dist * y.norm / (lead * x0)).upper
    if err > target:
        raise InsufficientTermsError(
            f"the first {n} terms certify a radius of about 2**{math.log2(err.numerator) - math.log2(err.denominator):.0f} only;"
            " extend the sequence")
    prec = max(64, (target.denominator.bit_length() - target.numerator.bit_length()) + 32)
    num = CertifiedReal.exact(y.x1).with_prec(prec)
    den = CertifiedReal.exact(y.x0).with_prec(prec)
    return (num / den).with_prec(prec).widen(err)


def certified_xi(seed: Seed, target_radius, start_terms: int = 6,
                 max_terms: int = 64) -> tuple[CertifiedReal, ExtremalSequence]:
    """Extend the sequence until :func:`xi_from_sequence` reaches ``target_radius``."""
    seq = ExtremalSequence.generate(seed, start_terms)
    while True:
        try:
            return xi_from_sequence(seq, target_radius), seq
        except InsufficientTermsError:
            if len(seq) >= max_terms:
                raise
            seq = seq.extend(1)


# -- continued fractions -----------------------------------------------------


def fibonacci_word(a: int, b: int, length: int) -> list[int]:
    """Prefix of the fixed point of ``a -> ab, b -> a`` over the letters ``a``, ``b``."""
    prev, cur = [a], [a, b]
    while len(cur) < length:
        prev, cur = cur, cur + prev
    return (cur if length > 1 else prev)[:length]


@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple
    value: CertifiedReal

    def convergents(self) -> list[tuple[int, int]]:
        return convergents(self.quotients)


def convergents(quotients) -> list[tuple[int, int]]:
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    for a in quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def continued_fraction_value(quotients, prec: int = 128) -> CertifiedReal:
    """Enclosure of an infinite continued fraction from a prefix of its positive quotients.

    The value lies between the last two convergents and within
    ``1 / (q_{n-1} q_n)`` of ``p_{n-1}/q_{n-1}``.
    """
    conv = convergents(quotients)
    if len(conv) < 2:
        raise ValueError("need at least two partial quotients")
    (p, q), (_, q1) = conv[-2], conv[-1]
    return CertifiedReal.exact(Fraction(p, q), prec).widen(Fraction(1, q * q1))


def fibonacci_word_cf(a: int, b: int, terms: int, prec: Optional[int] = None) -> CFExpansion:
    """``[0, w_1, w_2, ...]`` for the Fibonacci word ``w`` on ``{a, b}`` with ``terms`` quotients after 0."""
    if a == b:
        raise ValueError("a and b must be distinct")
    quotients = (0, *fibonacci_word(a, b, terms))
    if prec is None:
        q = convergents(quotients)[-1][1]
        prec = max(64, 2 * q.bit_length() + 16)
    return CFExpansion(quotients, continued_fraction_value(quotients, prec))


def fibonacci_word_xi(a: int, b: int, target_radius) -> CertifiedReal:
    """Continued fraction enclosure of the Fibonacci word number to ``target_radius``."""
    target = Fraction(target_radius)
    terms = 8
    while True:
        value = fibonacci_word_cf(a, b, terms).value
        if value.radius <= target:
            return value
        terms *= 2
