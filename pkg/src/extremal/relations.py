"""Search for polynomial relations between consecutive points of a sequence.

A candidate relation is a polynomial in points ``u_0, ..., u_k`` of Z^3 with
coordinates ``u_{j,l}`` (``l = 0, 1, 2``). The space ``E(d, p)`` is spanned
by the monomials of multi-degree ``d`` (degree ``d_j`` in ``u_j``) and
weight ``p`` (sum of ``l`` over all factors ``u_{j,l}``). A polynomial in
``E(d, p)`` all of whose admissible mixed derivatives vanish at the all-ones
point vanishes on the approximation triples of an extremal number, so the
search reduces to an exact integer null space.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import gmpy2

from .arith import decimal
from .golden import golden_weight
from .sequence import ExtremalSequence

Table = tuple  # exponent table: one (e_{j,0}, e_{j,1}, e_{j,2}) per j


@dataclass(frozen=True)
class MultiDegree:
    d: tuple
    p: int

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(v) for v in self.d))
        if not self.d or any(v < 0 for v in self.d):
            raise ValueError("multi-degree entries must be non-negative")
        if not 0 <= self.p <= 2 * self.total:
            raise ValueError(f"weight must lie in [0, {2 * self.total}]")

    @property
    def k(self) -> int:
        return len(self.d) - 1

    @property
    def total(self) -> int:
        return sum(self.d)

    def mirror(self) -> MultiDegree:
        """Same multi-degree with weight ``2|d| - p``."""
        return MultiDegree(self.d, 2 * self.total - self.p)


def _compositions(n: int):
    """``(e0, e1, e2)`` with sum ``n``, in lexicographic order."""
    return [(a, b, n - a - b) for a in range(n + 1) for b in range(n - a + 1)]


def monomial_weight(table: Table) -> int:
    return sum(e1 + 2 * e2 for _, e1, e2 in table)


def enumerate_monomials(md: MultiDegree) -> list[Table]:
    """Basis of ``E(d, p)`` as exponent tables, in lexicographic order."""
    out = []
    for table in itertools.product(*(_compositions(n) for n in md.d)):
        if monomial_weight(table) == md.p:
            out.append(table)
    return out


def space_dimension(md: MultiDegree) -> int:
    return len(enumerate_monomials(md))


def _profile_ok(d, sums) -> bool:
    # 2 * sum (f_{j,1} + f_{j,2}) gamma**j <= sum d_j gamma**j, decided exactly
    lhs = golden_weight([2 * s for s in sums])
    rhs = golden_weight(d)
    return lhs <= rhs


def admissible_profiles(md: MultiDegree) -> list[tuple]:
    """All ``((f_{0,1}, f_{0,2}), ..., (f_{k,1}, f_{k,2}))`` passing both tests.

    ``f_{j,1} + f_{j,2} <= d_j`` for each ``j``, and the golden weighted
    inequality decided in exact arithmetic.
    """
    per_j = [[(a, b) for a in range(n + 1) for b in range(n - a + 1)] for n in md.d]
    out = []
    for sums in itertools.product(*(range(n + 1) for n in md.d)):
        if not _profile_ok(md.d, sums):
            continue
        choices = [[f for f in opts if f[0] + f[1] == s] for opts, s in zip(per_j, sums)]
        out.extend(itertools.product(*choices))
    return sorted(out)


def _falling(e: int, f: int) -> int:
    return math.perm(e, f) if f <= e else 0


def derivative_at_ones(table: Table, profile) -> int:
    """The mixed derivative of the monomial at the all-ones point.

    A product of falling factorials ``e (e - 1) ... (e - f + 1)`` over the
    coordinates ``l = 1, 2``; zero as soon as some ``f`` exceeds its ``e``.
    """
    out = 1
    for (_, e1, e2), (f1, f2) in zip(table, profile):
        out *= _falling(e1, f1) * _falling(e2, f2)
        if not out:
            return 0
    return out


def constraint_matrix(md: MultiDegree, basis=None, profiles=None) -> list[list[int]]:
    """Rows indexed by admissible profiles, columns by the monomial basis."""
    basis = enumerate_monomials(md) if basis is None else basis
    profiles = admissible_profiles(md) if profiles is None else profiles
    return [[derivative_at_ones(m, f) for m in basis] for f in profiles]


def _normalize(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        return v
    v = [x // g for x in v]
    lead = next(x for x in v if x)
    return [-x for x in v] if lead < 0 else v


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Integer basis of the right kernel by fraction-free Gauss-Jordan elimination.

    Each elimination step ``a_ij <- (p a_ij - a_ic a_rj) / prev`` divides
    exactly, so all entries stay integral; at the end every pivot equals the
    last pivot ``D`` and the free column ``f`` gives the kernel vector with
    ``D`` at ``f`` and ``-a_{r,f}`` at the pivot of row ``r``. Pivots are
    chosen by largest magnitude within the column.
    """
    A = [list(map(int, r)) for r in rows]
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        best = max(range(r, len(A)), key=lambda i: abs(A[i][c]), default=None)
        if best is None or A[best][c] == 0:
            continue
        A[r], A[best] = A[best], A[r]
        piv = A[r][c]
        for i in range(len(A)):
            if i == r:
                continue
            a = A[i][c]
            A[i] = [(piv * x - a * y) // prev for x, y in zip(A[i], A[r])]
        prev = piv
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    kernel = []
    for f in free:
        v = [0] * ncols
        v[f] = prev
        for row, c in enumerate(pivots):
            v[c] = -A[row][f]
        kernel.append(_normalize(v))
    return kernel


@dataclass(frozen=True)
class RelationCandidate:
    md: MultiDegree
    terms: tuple  # ((table, coefficient), ...) with nonzero coefficients, basis order

    @classmethod
    def from_vector(cls, md: MultiDegree, basis, vector) -> RelationCandidate:
        return cls(md, tuple((m, c) for m, c in zip(basis, vector) if c))

    def vector(self, basis) -> list[int]:
        coeff = dict(self.terms)
        return [coeff.get(m, 0) for m in basis]

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, points: Sequence) -> int:
        """Value at ``u_j = points[j]``."""
        pts = [[gmpy2.mpz(v) for v in p] for p in points]
        total = gmpy2.mpz(0)
        for table, c in self.terms:
            term = gmpy2.mpz(c)
            for point, row in zip(pts, table):
                for x, e in zip(point, row):
                    if e:
                        term *= x ** e
            total += term
        return int(total)

    def to_dict(self) -> dict:
        return {
            "multidegree": list(self.md.d),
            "weight": self.md.p,
            "coefficients": [[[list(r) for r in m], decimal(c)] for m, c in self.terms],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> RelationCandidate:
        md = MultiDegree(tuple(obj["multidegree"]), int(obj["weight"]))
        terms = tuple((tuple(tuple(int(x) for x in r) for r in m), int(c))
                      for m, c in obj["coefficients"])
        return cls(md, terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for table, c in self.terms:
            factors = [f"u[{j}][{l}]" + (f"^{e}" if e > 1 else "")
                       for j, row in enumerate(table) for l, e in enumerate(row) if e]
            mono = "*".join(factors) or "1"
            parts.append(("- " if c < 0 else "+ ") + (f"{abs(c)}*" if abs(c) != 1 else "") + mono)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def null_space(md: MultiDegree) -> list[RelationCandidate]:
    """Exact kernel basis of the derivative constraints on ``E(d, p)``."""
    basis = enumerate_monomials(md)
    if not basis:
        return []
    rows = constraint_matrix(md, basis)
    kernel = integer_kernel(rows, len(basis))
    for v in kernel:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    return [RelationCandidate.from_vector(md, basis, v) for v in kernel]


def in_span(candidate: RelationCandidate, kernel: list[RelationCandidate]) -> bool:
    """Whether ``candidate`` is a rational combination of ``kernel``."""
    basis = enumerate_monomials(candidate.md)
    vectors = [k.vector(basis) for k in kernel]
    target = candidate.vector(basis)
    if not vectors:
        return not any(target)
    # rank of the kernel with and without the target column, over Q
    return _rank(vectors + [target]) == _rank(vectors)


def _rank(rows) -> int:
    return len(rows[0]) - len(integer_kernel(rows, len(rows[0])))


# -- the two known relations --------------------------------------------------


class _SparsePoly(dict):
    """Polynomial in the ``u_{j,l}`` as ``{exponent table: coefficient}``."""

    @classmethod
    def var(cls, k: int, j: int, l: int) -> _SparsePoly:
        table = tuple(tuple(1 if (jj, ll) == (j, l) else 0 for ll in range(3)) for jj in range(k + 1))
        return cls({table: 1})

    def __add__(self, other):
        out = _SparsePoly(self)
        for m, c in other.items():
            out[m] = out.get(m, 0) + c
            if not out[m]:
                del out[m]
        return out

    def __neg__(self):
        return _SparsePoly({m: -c for m, c in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = _SparsePoly()
        for m1, c1 in self.items():
            for m2, c2 in other.items():
                m = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
                if not out[m]:
                    del out[m]
        return out


def _symbolic_point(k: int, j: int):
    return [_SparsePoly.var(k, j, l) for l in range(3)]


def symbolic_bracket(x, z):
    """``[x, x, z] = x Adj(z) x`` for symbolic points, as a point."""
    x0, x1, x2 = x
    z0, z1, z2 = z
    b0 = x0 * x0 * z2 - x0 * x1 * z1 - x0 * x1 * z1 + x1 * x1 * z0
    b1 = x0 * x1 * z2 - x0 * x2 * z1 - x1 * x1 * z1 + x1 * x2 * z0
    b2 = x1 * x1 * z2 - x1 * x2 * z1 - x1 * x2 * z1 + x2 * x2 * z0
    return [b0, b1, b2]


def symbolic_det3(x, y, z):
    return (x[0] * (y[1] * z[2] - y[2] * z[1])
            - x[1] * (y[0] * z[2] - y[2] * z[0])
            + x[2] * (y[0] * z[1] - y[1] * z[0]))


KNOWN = {
    "first": ((0, 1), MultiDegree((1, 1, 0, 2, 1), 5)),
    "second": ((1, 2), MultiDegree((0, 1, 1, 2, 1), 5)),
}


def expand_known_relation(which: str) -> RelationCandidate:
    """``det(u_a, u_b, [u_3, u_3, u_4])`` expanded on the monomial basis.

    ``which = "first"`` uses ``(a, b) = (0, 1)``; ``"second"`` uses ``(1, 2)``.
    """
    (a, b), md = KNOWN[which]
    k = 4
    u = [_symbolic_point(k, j) for j in range(k + 1)]
    poly = symbolic_det3(u[a], u[b], symbolic_bracket(u[3], u[4]))
    basis = enumerate_monomials(md)
    index = {m: n for n, m in enumerate(basis)}
    vec = [0] * len(basis)
    for m, c in poly.items():
        if m not in index:
            raise AssertionError(f"monomial {m} outside E(d, p)")
        vec[index[m]] = c
    return RelationCandidate.from_vector(md, basis, vec)


# -- validation and sweeps ----------------------------------------------------


NEVER, DEGENERATE = "NEVER", "DEGENERATE"


@dataclass
class Verdict:
    candidate: RelationCandidate
    first_index: Optional[int]  # i0 with vanishing on every covered window i >= i0
    status: str  # "VANISHES", NEVER or DEGENERATE
    values_nonzero: list  # window starts where the value is nonzero


def validate_candidates(cands: Iterable[RelationCandidate], seq: ExtremalSequence) -> list[Verdict]:
    """Evaluate each candidate on the windows ``(y_i, ..., y_{i+k})`` exactly."""
    out = []
    for cand in cands:
        if cand.is_zero():
            out.append(Verdict(cand, 1, DEGENERATE, []))
            continue
        k = cand.md.k
        starts = range(1, len(seq) - k + 1)
        if not starts:
            raise ValueError(f"sequence too short for windows of {k + 1} points")
        nonzero = [i for i in starts
                   if cand.evaluate([seq.term(i + j) for j in range(k + 1)]) != 0]
        last = starts[-1]
        if nonzero and nonzero[-1] == last:
            out.append(Verdict(cand, None, NEVER, nonzero))
        else:
            out.append(Verdict(cand, (nonzero[-1] + 1) if nonzero else 1, "VANISHES", nonzero))
    return out


@dataclass
class SweepResult:
    md: MultiDegree
    dimension: int
    mirror_dimension: int
    kernel: list


def sweep(max_total: int, k: int, all_weights: bool = False) -> list[SweepResult]:
    """Kernels over multi-degrees ``d`` of length ``k + 1`` with ``|d| <= max_total``.

    Only ``d`` with ``d_0 > 0`` and ``d_k > 0`` are visited, since other
    ones are shifts of shorter windows. The central weight ``p = |d|`` comes
    first; with ``all_weights`` every ``p`` is visited. Each result records
    ``dim E(d, p)`` and ``dim E(d, 2|d| - p)``, which must agree.
    """
    results = []
    for d in itertools.product(range(max_total + 1), repeat=k + 1):
        if sum(d) > max_total or sum(d) == 0 or d[0] == 0 or d[-1] == 0:
            continue
        total = sum(d)
        weights = [total] + ([p for p in range(2 * total + 1) if p != total] if all_weights else [])
        for p in weights:
            md = MultiDegree(d, p)
            dim = space_dimension(md)
            mirror = space_dimension(md.mirror())
            kernel = null_space(md) if dim else []
            results.append(SweepResult(md, dim, mirror, kernel))
    return results


def relations_to_json(cands: Iterable[RelationCandidate]) -> str:
    return json.dumps([c.to_dict() for c in cands], indent=1)
