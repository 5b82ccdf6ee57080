"""Brute force oracles for a certified real ``xi``.

Minimal points and minimal polynomials are found by exhaustive scans whose
inner loops run on fixed point integers; every decision that the fixed
point error could flip is either resolved in certified arithmetic or
reported as a :class:`PrecisionError`. Nothing here uses the matrix
construction, so the results can be checked against it independently.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .arith import IntTriple, MonicPoly3, Poly2
from .certified import CertifiedReal, PrecisionError
from .sequence import ExtremalSequence, certified_xi

TIE_BREAK = "ties in L at equal norm broken lexicographically on (x0, x1, x2)"


@dataclass(frozen=True)
class MinimalPointRecord:
    point: IntTriple
    norm: int
    L: CertifiedReal


@dataclass(frozen=True)
class MinimalPolyRecord:
    poly: Poly2
    height: int
    value: CertifiedReal  # |P(xi)|


def _fixed_point(x: CertifiedReal, bits: int) -> tuple[int, int]:
    """``(n, e)`` with ``|x * 2**bits - n| <= e``."""
    scaled = x * (1 << bits)
    lo, hi = scaled.floor_bounds()
    return (lo + hi + 1) // 2, (hi - lo) // 2 + 2


# -- minimal points -----------------------------------------------------------


def _scan_points(args):
    start, stop, n1, e1, n2, e2, bits = args
    one = 1 << bits
    half = one >> 1
    out = []
    best_lo = best_hi = None
    for x0 in range(start, stop):
        s1, s2 = x0 * n1, x0 * n2
        err1, err2 = x0 * e1, x0 * e2
        c1, c2 = (s1 + half) >> bits, (s2 + half) >> bits
        r1, r2 = s1 - (c1 << bits), s2 - (c2 << bits)
        # nearest integers are certain unless a half-integer lies within the error
        if half - abs(r1) <= err1 or half - abs(r2) <= err2:
            ambiguous = True
        else:
            ambiguous = False
        lo = max(abs(r1) - err1, abs(r2) - err2, 0)
        hi = max(abs(r1) + err1, abs(r2) + err2)
        if best_lo is None or hi < best_lo:
            if ambiguous:
                raise PrecisionError(f"rounding of x0*xi or x0*xi^2 undecidable at x0={x0}")
            out.append((x0, c1, c2, lo, hi))
            best_lo, best_hi = lo, hi
        elif lo < best_hi:
            raise PrecisionError(f"comparison of L values undecidable at x0={x0}")
    return out


def _merge_records(chunks: Iterable[list]) -> list:
    """Global prefix minima from per-chunk prefix minima (deterministic in the chunking)."""
    merged = []
    best_lo = best_hi = None
    for chunk in chunks:
        for rec in chunk:
            lo, hi = rec[3], rec[4]
            if best_lo is None or hi < best_lo:
                merged.append(rec)
                best_lo, best_hi = lo, hi
            elif lo < best_hi:
                raise PrecisionError(f"comparison of L values undecidable at x0={rec[0]}")
    return merged


def minimal_points(xi: CertifiedReal, xmax: int, workers: int = 1,
                   chunk: int = 1 << 17) -> list[MinimalPointRecord]:
    """The minimal points of ``xi`` with norm at most ``xmax``.

    For ``0 < xi < 1`` the best completion of ``x0`` is
    ``(x0, round(x0 xi), round(x0 xi**2))``, of norm ``x0``; any point whose
    norm exceeds ``|x0|`` has ``L >= 1`` and is beaten at norm 1 already. So
    the scan over ``x0 = 1 .. xmax`` is exhaustive. ``workers > 1`` splits
    the range over processes without changing the result.
    """
    if not (xi.lower > 0 and xi.upper < 1):
        raise ValueError("minimal_points expects 0 < xi < 1; translate xi by an integer first")
    if xi.radius * 8 * xmax * xmax >= 1:
        raise PrecisionError("radius of xi too large for this xmax")
    bits = max(64, 3 * xmax.bit_length() + 40, min(xi.prec, 4 * xmax.bit_length() + 64))
    n1, e1 = _fixed_point(xi, bits)
    n2, e2 = _fixed_point(xi.square(), bits)
    bounds = [(s, min(s + chunk, xmax + 1)) for s in range(1, xmax + 1, chunk)]
    jobs = [(s, t, n1, e1, n2, e2, bits) for s, t in bounds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_scan_points, jobs))
    else:
        chunks = [_scan_points(j) for j in jobs]
    out = []
    for x0, c1, c2, lo, hi in _merge_records(chunks):
        L = CertifiedReal.from_bounds(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits), xi.prec)
        out.append(MinimalPointRecord(IntTriple(x0, c1, c2), x0, L))
    return out


def crosscheck_minimal_points(records: list[MinimalPointRecord], seq: ExtremalSequence) -> dict:
    """Match minimal points against ``+-`` the generated triples.

    ``N0`` is the smallest norm from which every record is matched, or
    ``None`` when the last record is unmatched.
    """
    generated = set(seq.triples) | {-y for y in seq.triples}
    matched = [r.point in generated for r in records]
    n0 = None
    if records and matched[-1]:
        k = len(records) - 1
        while k > 0 and matched[k - 1]:
            k -= 1
        n0 = records[k].norm
    top = records[-1].norm if records else 0
    found = {r.point for r in records}
    return {
        "N0": n0,
        "unmatched": [(r.norm, r.point) for r, ok in zip(records, matched) if not ok],
        "generated_missing": [y for y in seq.triples if y.norm <= top and y not in found],
    }


# -- minimal polynomials ------------------------------------------------------


def _uint64_frac(x: CertifiedReal) -> tuple[np.uint64, int]:
    """Fractional part of ``x`` scaled by 2**64 and its error in units."""
    n, e = _fixed_point(x, 64)
    return np.uint64(n % (1 << 64)), e


def _poly_rows(args):
    p2_start, p2_stop, hmax, X1, X2, xi_f, xi2_f, best_only, cutoff = args
    p1 = np.arange(-hmax, hmax + 1, dtype=np.int64)
    p1u = p1.astype(np.uint64)
    best = np.full(hmax + 1, np.iinfo(np.uint64).max, dtype=np.uint64)
    found = []
    scale = 2.0 ** -64
    with np.errstate(over="ignore"):
        for p2 in range(p2_start, p2_stop):
            if p2 == 0:
                sel = p1 > 0
                q1, q1u = p1[sel], p1u[sel]
            else:
                q1, q1u = p1, p1u
            t = np.uint64(p2) * X2 + q1u * X1  # frac(p1 xi + p2 xi^2) * 2**64, wrapping
            delta = t.view(np.int64)  # signed offset from the nearest integer
            s = q1 * xi_f + p2 * xi2_f
            nearest = np.rint(s - delta * scale).astype(np.int64)
            d = np.abs(delta).astype(np.uint64)
            far = np.uint64(0) - d  # 1 - d for the neighbour on the other side
            far_nearest = nearest + np.where(delta >= 0, 1, -1)
            base_h = np.maximum(np.abs(q1), p2)
            for cand, cn in ((d, nearest), (far, far_nearest)):
                h = np.maximum(base_h, np.abs(cn))
                ok = h <= hmax
                if best_only:
                    np.minimum.at(best, h[ok], cand[ok])
                else:
                    hit = ok & (cand <= cutoff[np.minimum(h, hmax)])
                    for k in np.nonzero(hit)[0]:
                        found.append((int(-cn[k]), int(q1[k]), p2))
    return best if best_only else found


def _poly_value(P: Poly2, xi: CertifiedReal) -> CertifiedReal:
    return abs(P(xi))


def minimal_polys(xi: CertifiedReal, hmax: int, workers: int = 1) -> list[MinimalPolyRecord]:
    """The minimal polynomials of degree at most 2 and height at most ``hmax``.

    A first pass over all ``(p2, p1)`` computes, per height, the smallest
    ``|P(xi)|`` in 64-bit fixed point, with ``p0`` the nearest integer
    completion or its neighbour. A second pass collects every polynomial
    that could be a record given the fixed point error; those are compared
    in certified arithmetic.
    """
    if hmax < 1:
        raise ValueError("hmax must be positive")
    if xi.radius * (1 << 64) > 1:
        raise PrecisionError("xi must be known to better than 2**-64")
    X1, e1 = _uint64_frac(xi)
    xi2 = xi.square()
    X2, e2 = _uint64_frac(xi2)
    err_units = hmax * (e1 + e2) + 4
    xi_f, xi2_f = float(xi), float(xi2)

    # height one exhaustively, exact
    height_one = [Poly2(p0, p1, p2) for p2 in (0, 1) for p1 in (-1, 0, 1) for p0 in (-1, 0, 1)
                  if Poly2(p0, p1, p2).normalized() == Poly2(p0, p1, p2) and (p0, p1, p2) != (0, 0, 0)]
    candidates = set(height_one)
    if hmax >= 2:
        splits = _split_range(0, hmax + 1, workers)
        jobs = [(a, b, hmax, X1, X2, xi_f, xi2_f, True, None) for a, b in splits]
        bests = _run(_poly_rows, jobs, workers)
        best = np.minimum.reduce(bests)
        running = np.full(hmax + 1, np.iinfo(np.uint64).max, dtype=np.uint64)
        cur = np.iinfo(np.uint64).max
        for h in range(1, hmax + 1):
            running[h] = cur  # min over heights strictly below h
            cur = min(cur, int(best[h]))
        cutoff = np.array([min(int(v) + 2 * err_units, (1 << 64) - 1) for v in running],
                          dtype=np.uint64)
        jobs = [(a, b, hmax, X1, X2, xi_f, xi2_f, False, cutoff) for a, b in splits]
        for found in _run(_poly_rows, jobs, workers):
            candidates.update(Poly2(*c).normalized() for c in found)
    return _pareto(candidates, xi)


def _pareto(candidates, xi: CertifiedReal) -> list[MinimalPolyRecord]:
    by_height: dict[int, list] = {}
    for P in candidates:
        if P.height >= 1:
            by_height.setdefault(P.height, []).append(P)
    records = []
    current = None
    for h in sorted(by_height):
        scored = [(P, _poly_value(P, xi)) for P in by_height[h]]
        P, v = _certified_min(scored)
        if current is None or _certified_less(v, current.value, P, current.poly):
            current = MinimalPolyRecord(P, h, v)
            records.append(current)
    return records


def _certified_less(a: CertifiedReal, b: CertifiedReal, pa, pb) -> bool:
    if a.upper < b.lower:
        return True
    if a.lower >= b.upper:
        return False
    raise PrecisionError(f"comparison of |P(xi)| undecidable between {pa} and {pb}")


def _certified_min(scored):
    best_p, best_v = scored[0]
    for P, v in scored[1:]:
        if _certified_less(v, best_v, P, best_p):
            best_p, best_v = P, v
    return best_p, best_v


def _split_range(a: int, b: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, b - a))
    step = -(-(b - a) // parts)
    return [(s, min(s + step, b)) for s in range(a, b, step)]


def _run(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


# -- monic cubics -------------------------------------------------------------


def _cubic_scan(fixed, H: int, bits: int, cutoff=None):
    """Smallest fixed point ``|P(xi)|`` over the box, or every cubic at most ``cutoff``."""
    n1, n2, n3 = fixed
    half = 1 << (bits - 1)
    best = None
    hits = []
    for p in range(-H, H + 1):
        base = n3 + p * n2
        for q in range(-H, H + 1):
            s = base + q * n1
            r0 = -((s + half) >> bits)
            for r in {min(max(r0 + k, -H), H) for k in (-1, 0, 1)}:
                v = abs(s + (r << bits))
                if cutoff is None:
                    if best is None or v < best:
                        best = v
                elif v <= cutoff:
                    hits.append(MonicPoly3(p, q, r))
    return best if cutoff is None else hits


def best_monic_cubic(xi: CertifiedReal, H: int) -> tuple[MonicPoly3, CertifiedReal]:
    """The monic cubic with coefficients in ``[-H, H]`` minimizing ``|P(xi)|``.

    ``r`` runs over the clamped nearest integer completion and its two
    neighbours, which covers the box minimum. A fixed point pass finds the
    minimum up to a known error; the cubics within twice that error are
    compared in certified arithmetic.
    """
    if H < 1:
        raise ValueError("H must be positive")
    bits = 2 * H.bit_length() + 64
    if xi.radius * (1 << bits) > 1:
        raise PrecisionError("xi must be known to better than 2**-%d" % bits)
    n1, e1 = _fixed_point(xi, bits)
    n2, e2 = _fixed_point(xi.square(), bits)
    n3, e3 = _fixed_point(xi ** 3, bits)
    err = e3 + H * (e1 + e2) + 2
    best = _cubic_scan((n1, n2, n3), H, bits)
    close = _cubic_scan((n1, n2, n3), H, bits, cutoff=best + 2 * err)
    return _certified_min([(P, abs(P(xi))) for P in sorted(close)])


def min_monic_cubic_values(xi: CertifiedReal, heights) -> dict[int, tuple[MonicPoly3, CertifiedReal]]:
    return {H: best_monic_cubic(xi, H) for H in heights}


def _cubic_real_roots_in(P: MonicPoly3, lo: Fraction, hi: Fraction,
                         width: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals of width at most ``width`` for the roots of ``P`` in ``[lo, hi]``.

    The interval is cut at tight enclosures of the critical points so that
    each piece holds at most one root, found by a sign change.
    """
    if _has_repeated_root(P):
        return _integer_roots_in(P, lo, hi)
    p, q, _ = P
    disc = p * p - 3 * q  # critical points (-p +- sqrt(disc)) / 3
    cuts = [lo]
    if disc > 0:
        scale = max(128, 2 * width.denominator.bit_length())
        s = math.isqrt(disc << (2 * scale))
        for sgn in (-1, 1):
            ends = (Fraction(-p * (1 << scale) + sgn * s, 3 << scale),
                    Fraction(-p * (1 << scale) + sgn * (s + 1), 3 << scale))
            c_lo, c_hi = min(ends), max(ends)
            if lo < c_lo and c_hi < hi:
                cuts += [c_lo, c_hi]
    cuts.append(hi)
    roots = set()
    for a, b in zip(cuts, cuts[1:]):
        fa, fb = P(a), P(b)
        if fa == 0:
            roots.add((a, a))
        elif fb == 0:
            roots.add((b, b))
        elif (fa < 0) != (fb < 0):
            roots.add(_bisect(P, a, b, width))
    return sorted(roots)


def _has_repeated_root(P: MonicPoly3) -> bool:
    p, q, r = P
    disc = p * p * q * q - 4 * q ** 3 - 4 * p ** 3 * r - 27 * r * r + 18 * p * q * r
    return disc == 0


def _integer_roots_in(P: MonicPoly3, lo: Fraction, hi: Fraction):
    # a monic integer cubic with a repeated root splits over Z
    bound = 1 + max(abs(c) for c in P)
    return [(Fraction(t), Fraction(t)) for t in range(-bound, bound + 1)
            if P(t) == 0 and lo <= t <= hi]


def _bisect(P, a: Fraction, b: Fraction, width: Fraction):
    fa = P(a)
    while b - a > width:
        m = (a + b) / 2
        fm = P(m)
        if fm == 0:
            return (m, m)
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return (a, b)


def _trim(f):
    while f and f[0] == 0:
        f = f[1:]
    return f


def _poly_gcd(f, g):
    """Monic gcd of rational polynomials given as coefficient lists, highest degree first."""
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        while len(f) >= len(g):
            c = f[0] / g[0]
            f = _trim([x - c * y for x, y in zip(f, g + [0] * (len(f) - len(g)))][1:])
        f, g = g, f
    return [x / f[0] for x in f]


def _horner(f, t):
    out = 0
    for c in f:
        out = out * t + c
    return out


def _common_root_in(f, g, lo: Fraction, hi: Fraction) -> bool:
    """Whether ``f`` and ``g`` certainly share a root in ``[lo, hi]``."""
    h = _poly_gcd(f, g)
    if len(h) < 2:
        return False
    if len(h) == 2:
        return lo <= -h[1] <= hi
    a, b = _horner(h, lo), _horner(h, hi)
    return a == 0 or b == 0 or (a < 0) != (b < 0)


def _coeffs(P: MonicPoly3):
    return [Fraction(1), Fraction(P.p), Fraction(P.q), Fraction(P.r)]


def _reflected(P: MonicPoly3, m: Fraction):
    """Coefficients of ``P(2m - x)``."""
    out = [Fraction(0)]
    for c in _coeffs(P):
        # out * (2m - x) + c
        shifted = [-x for x in out] + [Fraction(0)]
        scaled = [Fraction(0)] + [2 * m * x for x in out]
        out = [x + y for x, y in zip(shifted, scaled)]
        out[-1] += c
    return _trim(out)


def best_cubic_algebraic_integer(xi: CertifiedReal, H: int):
    """The real root of a monic cubic of height at most ``H`` closest to ``xi``.

    Returns ``(polynomial, root enclosure, |xi - root| enclosure)``. The
    roots of the best ``|P(xi)|`` cubic give a search radius ``delta``; then
    for each ``(p, q)`` only the ``r`` for which ``P`` can vanish within
    ``delta`` of ``xi`` are examined. The same root reached from several
    cubics goes to the one of smallest height, then smallest coefficients.
    """
    if H < 1:
        raise ValueError("H must be positive")
    width = Fraction(1, 1 << 96)
    x_lo, x_hi = xi.lower, xi.upper
    P0, _ = best_monic_cubic(xi, H)
    delta = Fraction(1)
    for a, b in _cubic_real_roots_in(P0, x_lo - 2, x_hi + 2, width):
        delta = min(delta, max(b - x_lo, x_hi - a))
    lo, hi = x_lo - delta, x_hi + delta
    c = Fraction(round(xi.mid * (1 << 64)), 1 << 64)
    center = xi.mid if xi.is_exact() else None
    rad = max(c - lo, hi - c)
    best = None
    for p in range(-H, H + 1):
        c2 = 3 * c * c + 2 * p * c
        curv = abs(3 * c + p) * rad * rad + rad ** 3
        g0 = c * c * (c + p)
        for q in range(-H, H + 1):
            g = g0 + q * c
            bound = abs(c2 + q) * rad + curv
            for r in range(max(math.floor(-g - bound), -H), min(math.ceil(-g + bound), H) + 1):
                P = MonicPoly3(p, q, r)
                for a, b in _cubic_real_roots_in(P, lo, hi, width):
                    dist = (max(Fraction(0), a - x_hi, x_lo - b), max(b - x_lo, x_hi - a))
                    best = _closer(best, (P, (a, b), dist), center)
    if best is None:
        raise PrecisionError("no cubic root found near xi")
    P, (a, b), (d_lo, d_hi) = best
    return P, CertifiedReal.from_bounds(a, b, xi.prec), CertifiedReal.from_bounds(d_lo, d_hi, xi.prec)


def _closer(best, cand, center=None):
    """The nearer of two isolated roots; equal distances go to the smaller polynomial.

    Equal distances are recognised as the same root, or, for an exact
    ``xi = center``, as the mirror images ``alpha`` and ``2 center - alpha``.
    """
    if best is None:
        return cand
    (P, (a, b), (lo, hi)), (Q, (c, d), (lo2, hi2)) = best, cand
    if hi2 < lo:
        return cand
    if hi < lo2:
        return best
    tie = max(a, c) <= min(b, d) and _common_root_in(_coeffs(P), _coeffs(Q), max(a, c), min(b, d))
    if not tie and center is not None:
        c2, d2 = 2 * center - d, 2 * center - c
        tie = max(a, c2) <= min(b, d2) and _common_root_in(
            _coeffs(P), _reflected(Q, center), max(a, c2), min(b, d2))
    if tie:
        return min(best, cand, key=lambda t: (t[0].height, tuple(t[0])))
    raise PrecisionError(f"root distances of {P} and {Q} cannot be separated")


# -- cubic gap ----------------------------------------------------------------


def cubic_gap_sequence(seq: ExtremalSequence, xi, count: int,
                       digits_bits: int = 64) -> list[CertifiedReal]:
    """``{y_{i,0} xi**3}`` for ``i = 1 .. count``.

    When ``xi`` is ``None`` or too coarse for the last term, it is recomputed
    from the seed of ``seq`` so that every value carries about
    ``digits_bits`` correct bits.
    """
    seq = seq if len(seq) >= count else seq.extend(count - len(seq))
    top = max(abs(seq.term(i).x0) for i in range(1, count + 1))
    if xi is None or xi.radius * top * 8 > Fraction(1, 1 << digits_bits):
        xi, _ = certified_xi(seq.seed, Fraction(1, top << (digits_bits + 3)),
                             max_terms=max(64, count + 8))
    cube = xi ** 3
    out = []
    for i in range(1, count + 1):
        value = cube * seq.term(i).x0
        if value.radius >= Fraction(1, 4):
            raise PrecisionError(f"xi too coarse for the gap at i={i}")
        out.append(value.dist_to_nearest_int())
    return out


# -- export -------------------------------------------------------------------


def records_to_csv(records) -> str:
    """One row per record: index, coordinates or coefficients, norm or height, value mid, radius."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if records and isinstance(records[0], MinimalPointRecord):
        w.writerow(["index", "x0", "x1", "x2", "norm", "L_mid", "L_rad"])
        for k, r in enumerate(records, 1):
            j = r.L.to_json()
            w.writerow([k, *map(str, r.point), r.norm, j["mid"], j["rad"]])
    else:
        w.writerow(["index", "p0", "p1", "p2", "height", "value_mid", "value_rad"])
        for k, r in enumerate(records, 1):
            j = r.value.to_json()
            w.writerow([k, *map(str, r.poly), r.height, j["mid"], j["rad"]])
    return buf.getvalue()
