"""Finite-range certificates for a generated sequence and its limit ``xi``.

A certificate never claims extremality, which concerns every ``X``. It
evaluates the checkable conditions on a range of indices and reports the
smallest constant that makes them hold there. A row whose certified values
are too coarse to decide is INDETERMINATE, never FAIL.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import (IntTriple, Matrix2, Poly2, adjoint, bracket, decimal, det2, det3, height_l,
                    resultant, wedge_poly)
from .certified import CertifiedReal, PrecisionError, gamma_enclosure
from .minimal import MinimalPolyRecord
from .sequence import ExtremalSequence, InsufficientTermsError, certified_xi, xi_from_sequence

PASS, FAIL, INDETERMINATE = "PASS", "FAIL", "INDETERMINATE"
EXIT_CODES = {PASS: 0, FAIL: 1, INDETERMINATE: 2}

GAMMA = (1 + math.sqrt(5)) / 2

# The two-sided bound on |Q_k(xi)| is read with exponent -gamma**3 on both
# sides; a +gamma**3 upper exponent would be vacuous.
POLY_EXPONENT_NOTE = "|Q_k(xi)| H(Q_k)**(gamma**3) bounded above and below (exponent -gamma**3 on both sides)"


def _worst(statuses) -> str:
    statuses = set(statuses)
    if FAIL in statuses:
        return FAIL
    if INDETERMINATE in statuses:
        return INDETERMINATE
    return PASS


def _cr_json(x: Optional[CertifiedReal]):
    return None if x is None else x.to_json()


def _log_int(n: int) -> float:
    return math.log(n) if n > 0 else float("nan")


# -- extremality --------------------------------------------------------------


@dataclass
class ExtremalityRow:
    index: int
    norm: int
    det2: int
    det3: int
    l_times_norm: Optional[CertifiedReal]
    log_ratio: Optional[float]  # log ||y_{i+1}|| / log ||y_i||
    l_slope: Optional[CertifiedReal]  # log L(y_i) / log ||y_i||
    growth: float  # max(X_{i+1} / X_i**gamma, X_i**gamma / X_{i+1})
    status: str = PASS


@dataclass
class ExtremalityCertificate:
    start: int
    stop: int
    rows: list[ExtremalityRow]
    c: Optional[float]
    status: str
    failures: list[str] = field(default_factory=list)

    def summary(self) -> str:
        if self.status == PASS:
            return (f"consistent with the four extremality conditions on range "
                    f"[{self.start}, {self.stop}] with c = {self.c:.6g}")
        return f"{self.status} on range [{self.start}, {self.stop}]: " + "; ".join(self.failures)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        return {
            "range": [self.start, self.stop],
            "status": self.status,
            "c": self.c,
            "summary": self.summary(),
            "rows": [{
                "i": r.index,
                "norm": decimal(r.norm),
                "det2": decimal(r.det2),
                "det3": decimal(r.det3),
                "L_times_norm": _cr_json(r.l_times_norm),
                "log_ratio": r.log_ratio,
                "log_L_over_log_norm": _cr_json(r.l_slope),
                "growth": r.growth,
                "status": r.status,
            } for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "norm_digits", "det2", "det3", "LX_mid", "LX_rad", "log_ratio",
                    "slope_mid", "slope_rad", "growth", "status"])
        for r in self.rows:
            lx = r.l_times_norm.to_json() if r.l_times_norm else {"mid": "", "rad": ""}
            sl = r.l_slope.to_json() if r.l_slope else {"mid": "", "rad": ""}
            w.writerow([r.index, len(decimal(r.norm)), r.det2, r.det3, lx["mid"], lx["rad"],
                        "" if r.log_ratio is None else repr(r.log_ratio),
                        sl["mid"], sl["rad"], repr(r.growth), r.status])
        return buf.getvalue()


def xi_for_rows(seq: ExtremalSequence, stop: int) -> tuple[CertifiedReal, ExtremalSequence]:
    """``xi`` precise enough that ``L(y_i) ||y_i||`` is well resolved for ``i <= stop``."""
    norm = seq.term(stop).norm
    target = Fraction(1, norm * norm << 32)
    try:
        return xi_from_sequence(seq, target), seq
    except InsufficientTermsError:
        return certified_xi(seq.seed, target, start_terms=len(seq), max_terms=len(seq) + 16)


def extremality_certificate(seq: ExtremalSequence, xi: Optional[CertifiedReal] = None,
                            start: int = 1, stop: Optional[int] = None) -> ExtremalityCertificate:
    """Evaluate the four extremality conditions on ``start <= i <= stop``.

    Row ``i`` needs ``y_{i+2}``, so the sequence is extended when shorter.
    Without ``xi`` one is computed from the sequence to a suitable radius.
    """
    if len(seq) < 3:
        raise ValueError("a certificate needs at least three terms")
    if stop is None:
        stop = len(seq) - 2
    if not 1 <= start <= stop:
        raise ValueError(f"bad range [{start}, {stop}]")
    if len(seq) < stop + 2:
        seq = seq.extend(stop + 2 - len(seq))
    if xi is None:
        xi, seq = xi_for_rows(seq, stop)
    rows = []
    failures = []
    c = 1.0
    for i in range(start, stop + 1):
        y, y1, y2 = seq.term(i), seq.term(i + 1), seq.term(i + 2)
        d2, d3 = det2(y), det3(y, y1, y2)
        X, X1 = y.norm, y1.norm
        status = PASS
        if d2 == 0:
            failures.append(f"det2(y_{i}) = 0")
            status = FAIL
        if d3 == 0:
            failures.append(f"det3(y_{i}, y_{i+1}, y_{i+2}) = 0")
            status = FAIL
        lx = slope = None
        try:
            # ||y_i||**-2 of xi is enough for row i; rounding keeps the enclosure
            L = height_l(y, xi.with_prec(min(xi.prec, 2 * X.bit_length() + 128)))
            lx = L * X
            if lx.lower <= 0:
                raise PrecisionError("L(y_i) not separated from 0")
            c = max(c, float(lx.upper), float(1 / lx.lower))
            if X > 1:
                slope = L.log() / CertifiedReal.exact(X, L.prec).log()
        except PrecisionError as exc:
            failures.append(f"row {i} indeterminate: {exc}")
            status = _worst([status, INDETERMINATE])
        growth = math.exp(abs(_log_int(X1) - GAMMA * _log_int(X)))
        c = max(c, growth, abs(d2), abs(d3))
        ratio = _log_int(X1) / _log_int(X) if X > 1 else None
        rows.append(ExtremalityRow(i, X, d2, d3, lx, ratio, slope, growth, status))
    status = _worst(r.status for r in rows)
    return ExtremalityCertificate(start, stop, rows, c if status == PASS else None, status, failures)


# -- relations and matrix recovery --------------------------------------------


@dataclass
class RelationRow:
    index: int
    first: int  # det(y_i, y_{i+1}, [y_{i+3}, y_{i+3}, y_{i+4}])
    second: int  # det(y_{i+1}, y_{i+2}, [y_{i+3}, y_{i+3}, y_{i+4}])


def relation_check(seq: ExtremalSequence) -> tuple[Optional[int], list[RelationRow]]:
    """Both bracket determinants for every ``i`` with ``y_{i+4}`` available.

    Returns the smallest ``i0`` from which both vanish on every covered row
    (``None`` if the last row does not vanish) and the table.
    """
    if len(seq) < 5:
        raise ValueError("relation check needs at least five terms")
    rows = []
    for i in range(1, len(seq) - 3):
        b = bracket(seq.term(i + 3), seq.term(i + 4))
        rows.append(RelationRow(i, det3(seq.term(i), seq.term(i + 1), b),
                                det3(seq.term(i + 1), seq.term(i + 2), b)))
    i0 = None
    for row in reversed(rows):
        if row.first or row.second:
            break
        i0 = row.index
    return i0, rows


class MatrixRecoveryError(ValueError):
    pass


def _canonical(m: Matrix2) -> Matrix2:
    return min((m, m.scale(-1), m.T, m.T.scale(-1)), key=tuple)


def _matrix_from_step(x: IntTriple, y: IntTriple, z: IntTriple) -> Matrix2:
    """The primitive ``S`` with ``z`` proportional to ``y S x`` (``x``, ``y`` invertible).

    ``S = Adj(y) z Adj(x)`` up to the factor ``det(x) det(y)``.
    """
    s = adjoint(y.matrix()) @ z.matrix() @ adjoint(x.matrix())
    g = s.content()
    if g == 0:
        raise MatrixRecoveryError("zero step matrix")
    return Matrix2(*(v // g for v in s))


def matrix_recovery(seq: ExtremalSequence) -> Matrix2:
    """Recover ``M`` up to sign and transposition from the terms alone.

    Each step ``y_i, y_{i+1} -> y_{i+2}`` determines its ``S`` up to a
    rational factor. Steps producing odd-indexed terms must agree with one
    ``M`` and the others with its transpose; the canonical (lexicographically
    smallest) member of ``{+-M, +-M^t}`` is returned.
    """
    if len(seq) < 3:
        raise ValueError("matrix recovery needs at least three terms")
    found = None
    for i in range(1, len(seq) - 1):
        x, y, z = seq.term(i), seq.term(i + 1), seq.term(i + 2)
        if det2(x) == 0 or det2(y) == 0:
            continue
        s = _matrix_from_step(x, y, z)
        m = s if (i + 2) % 2 == 1 else s.T
        if found is None:
            found = (i, m)
        elif m not in (found[1], found[1].scale(-1)):
            raise MatrixRecoveryError(
                f"steps producing y_{found[0] + 2} and y_{i + 2} give different matrices "
                f"{found[1].rows()} and {m.rows()}")
    if found is None:
        raise MatrixRecoveryError("no step with invertible terms")
    return _canonical(found[1])


# -- polynomial certificate ---------------------------------------------------


@dataclass
class PolyRow:
    k: int
    source_index: int  # i_k, position of Q_k among the minimal polynomials (1-based)
    poly: Poly2
    height: int
    scaled_value: CertifiedReal  # |Q_k(xi)| H(Q_k)**(gamma**3)
    independence_det: int  # det3(P_{i-1}, P_i, P_{i+1})
    resultant: Optional[int]  # Res(Q_k, Q_{k+1})
    log_ratio: Optional[float]  # log H(Q_{k+1}) / log H(Q_k)
    wedge: Optional[tuple]  # wedgePoly(Q_k, Q_{k+1})
    wedge_match: Optional[int]  # j with wedge = +-y_j, if any


@dataclass
class PolyCertificate:
    rows: list[PolyRow]
    c2: float
    status: str
    notes: list[str] = field(default_factory=list)
    reading: str = POLY_EXPONENT_NOTE

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "c2": self.c2,
            "reading": self.reading,
            "notes": self.notes,
            "rows": [{
                "k": r.k, "i_k": r.source_index, "Q": [decimal(v) for v in r.poly],
                "height": decimal(r.height), "scaled_value": r.scaled_value.to_json(),
                "independence_det": decimal(r.independence_det),
                "resultant": None if r.resultant is None else decimal(r.resultant),
                "log_ratio": r.log_ratio,
                "wedge": None if r.wedge is None else [decimal(v) for v in r.wedge],
                "wedge_match": r.wedge_match,
            } for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "i_k", "q0", "q1", "q2", "height", "scaled_mid", "scaled_rad",
                    "independence_det", "resultant", "log_ratio", "wedge_match"])
        for r in self.rows:
            sv = r.scaled_value.to_json()
            w.writerow([r.k, r.source_index, *r.poly, r.height, sv["mid"], sv["rad"],
                        r.independence_det, "" if r.resultant is None else r.resultant,
                        "" if r.log_ratio is None else repr(r.log_ratio),
                        "" if r.wedge_match is None else r.wedge_match])
        return buf.getvalue()


def extract_q_sequence(polys: list) -> list[int]:
    """1-based positions ``i_k`` of the subsequence ``Q_k``.

    ``I`` holds the ``i >= 2`` with ``P_{i-1}, P_i, P_{i+1}`` linearly
    independent; the subsequence starts at the first ``i_1`` in ``I`` after
    which every ``i`` in ``I`` has ``Res(P_i, P_{i+1}) != 0``.
    """
    P = [r.poly if isinstance(r, MinimalPolyRecord) else Poly2(*r) for r in polys]
    index_set = [i for i in range(2, len(P))
                 if det3(P[i - 2], P[i - 1], P[i]) != 0]
    start = 0
    for pos, i in enumerate(index_set):
        if resultant(P[i - 1], P[i]) == 0:
            start = pos + 1
    return index_set[start:]


def poly_certificate(polys: list, xi: CertifiedReal,
                     seq: Optional[ExtremalSequence] = None) -> PolyCertificate:
    """Rows for the subsequence ``Q_k`` of the minimal polynomials ``polys``.

    ``c2`` is the smallest constant with ``c2**-1 <= |Q_k(xi)| H**(gamma**3) <= c2``
    and ``|Res(Q_k, Q_{k+1})| <= c2`` on the rows. With ``seq``, each
    ``wedgePoly(Q_k, Q_{k+1})`` is matched against ``+-y_j``.
    """
    P = [r.poly if isinstance(r, MinimalPolyRecord) else Poly2(*r) for r in polys]
    idx = extract_q_sequence(P)
    if len(idx) < 3:
        raise InsufficientTermsError(f"only {len(idx)} usable Q_k; raise the height bound")
    g3 = gamma_enclosure(xi.prec + 16) ** 3
    lookup = {}
    if seq is not None:
        for j, y in enumerate(seq.triples, 1):
            lookup[y] = j
    rows = []
    c2 = 1.0
    status = PASS
    notes = []
    for k, i in enumerate(idx, 1):
        Q = P[i - 1]
        nxt = P[idx[k] - 1] if k < len(idx) else None
        value = abs(Q(xi))
        scaled = value * CertifiedReal.exact(Q.height, xi.prec).rpow(g3)
        indep = det3(P[i - 2], P[i - 1], P[i])
        res = resultant(Q, nxt) if nxt is not None else None
        ratio = math.log(nxt.height) / math.log(Q.height) if nxt is not None and Q.height > 1 else None
        w = wedge_poly(Q, nxt) if nxt is not None else None
        match = None
        if w is not None:
            match = lookup.get(w, lookup.get(-w))
        if scaled.lower <= 0:
            status = _worst([status, INDETERMINATE])
            notes.append(f"|Q_{k}(xi)| not separated from 0")
        else:
            c2 = max(c2, float(scaled.upper), float(1 / scaled.lower))
        if res is not None:
            if res == 0:
                status = FAIL
                notes.append(f"Res(Q_{k}, Q_{k+1}) = 0")
            c2 = max(c2, abs(res))
        rows.append(PolyRow(k, i, Q, Q.height, scaled, indep, res, ratio,
                            tuple(w) if w is not None else None, match))
    return PolyCertificate(rows, c2, status, notes)


# -- dual sandwich ------------------------------------------------------------


@dataclass
class SandwichRow:
    first: Poly2
    second: Poly2
    status: str  # PASS, FAIL, SKIPPED (precondition false) or INDETERMINATE
    value: Optional[CertifiedReal] = None  # L(P ^ Q)
    lower: Optional[CertifiedReal] = None
    upper: Optional[CertifiedReal] = None


def sandwich_pair(P: Poly2, Q: Poly2, xi: CertifiedReal) -> SandwichRow:
    """Check ``L(P ^ Q)`` against ``H(Q)|P(xi)|`` when ``2 H(P)|Q(xi)| <= H(Q)|P(xi)|``.

    The bounds are ``H(Q)|P(xi)| / (2 max(1, |xi| + xi**2))`` below and
    ``(3/2) H(Q)|P(xi)|`` above. Pairs failing the precondition are SKIPPED;
    an undecidable precondition is INDETERMINATE.
    """
    P, Q = Poly2(*P), Poly2(*Q)
    hp_q = abs(Q(xi)) * (2 * P.height)
    hq_p = abs(P(xi)) * Q.height
    try:
        holds = hp_q <= hq_p
    except PrecisionError:
        return SandwichRow(P, Q, INDETERMINATE)
    if not holds:
        return SandwichRow(P, Q, "SKIPPED")
    x = wedge_poly(P, Q)
    value = height_l(x, xi)
    scale = abs(xi) + xi.square()
    lower = hq_p / (scale.max(1) * 2)
    upper = hq_p * Fraction(3, 2)
    ok_low, ok_high = lower.upper <= value.lower, value.upper <= upper.lower
    if ok_low and ok_high:
        status = PASS
    elif lower.lower > value.upper or value.lower > upper.upper:
        status = FAIL
    else:
        status = INDETERMINATE
    return SandwichRow(P, Q, status, value, lower, upper)


def dual_sandwich_check(polys: list, xi: CertifiedReal) -> list[SandwichRow]:
    """:func:`sandwich_pair` on every consecutive pair of ``polys``."""
    P = [r.poly if isinstance(r, MinimalPolyRecord) else Poly2(*r) for r in polys]
    return [sandwich_pair(a, b, xi) for a, b in zip(P, P[1:])]
