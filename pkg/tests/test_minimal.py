import csv
import io
import itertools
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from extremal.arith import IntTriple, MonicPoly3, Poly2
from extremal.certified import CertifiedReal, PrecisionError
from extremal.minimal import (best_cubic_algebraic_integer, best_monic_cubic,
                              crosscheck_minimal_points, cubic_gap_sequence, min_monic_cubic_values,
                              minimal_points, minimal_polys, records_to_csv)
from extremal.sequence import ExtremalSequence, example_two_seed


def _brute_minimal_points(xi: float, xmax: int):
    """Records over the whole cube ``[-xmax, xmax]**3``, one sign per point."""
    r = np.arange(-xmax, xmax + 1)
    x0, x1, x2 = (a.ravel() for a in np.meshgrid(r, r, r, indexing="ij"))
    norm = np.maximum(np.maximum(abs(x0), abs(x1)), abs(x2))
    L = np.maximum(abs(x1 - xi * x0), abs(x2 - xi * xi * x0))
    lead = np.where(x0 != 0, x0, np.where(x1 != 0, x1, x2))
    keep = lead > 0
    order = np.lexsort((x2[keep], x1[keep], x0[keep], L[keep], norm[keep]))
    pts = np.stack([x0[keep], x1[keep], x2[keep]], axis=1)[order]
    best = np.inf
    out = []
    for p, val in zip(pts, L[keep][order]):
        if val < best:
            best = val
            out.append(tuple(int(v) for v in p))
    return out


def _brute_minimal_polys(xi, hmax: int):
    with mpmath.workdps(50):
        x = mpmath.mpf(xi.mid.numerator) / xi.mid.denominator
        cands = []
        for p in itertools.product(range(-hmax, hmax + 1), repeat=3):
            P = Poly2(*p)
            if P == (0, 0, 0) or P.normalized() != P:
                continue
            cands.append((P.height, abs(p[0] + p[1] * x + p[2] * x * x), P))
    cands.sort(key=lambda t: (t[0], t[1]))
    best = mpmath.inf
    out = []
    for _, v, P in cands:
        if v < best:
            best = v
            out.append(P)
    return out


def test_minimal_points_against_cube(xi_fib12):
    records = minimal_points(xi_fib12, 40)
    assert [r.point for r in records] == _brute_minimal_points(float(xi_fib12), 40)


def test_minimal_points_against_cube_ex2(xi_ex2a2):
    records = minimal_points(xi_ex2a2, 30)
    assert [r.point for r in records] == _brute_minimal_points(float(xi_ex2a2), 30)


def test_single_record(xi_fib12):
    records = minimal_points(xi_fib12, 1)
    assert len(records) == 1
    assert records[0].point == (1, round(float(xi_fib12)), round(float(xi_fib12) ** 2))


def test_record_invariants(xi_fib12):
    records = minimal_points(xi_fib12, 20000)
    for a, b in zip(records, records[1:]):
        assert a.norm < b.norm
        assert b.L.upper < a.L.lower


def test_scan_partition_invariance(xi_fib12):
    one = minimal_points(xi_fib12, 30000)
    many = minimal_points(xi_fib12, 30000, workers=2, chunk=777)
    assert [(r.point, r.L.lower, r.L.upper) for r in one] == [(r.point, r.L.lower, r.L.upper) for r in many]


def test_minimal_points_preconditions(xi_fib12):
    with pytest.raises(ValueError):
        minimal_points(xi_fib12 + 1, 10)
    coarse = CertifiedReal.exact(Fraction(72, 100)).widen(Fraction(1, 10**6))
    with pytest.raises(PrecisionError):
        minimal_points(coarse, 10**4)


def test_crosscheck_consistent(fib12, xi_fib12):
    records = minimal_points(xi_fib12, 10**4)
    check = crosscheck_minimal_points(records, fib12)
    generated = set(fib12.triples)
    tail = [r for r in records if r.norm >= check["N0"]]
    assert tail and all(r.point in generated for r in tail)
    assert check["generated_missing"] == [y for y in fib12.triples
                                          if y.norm <= 10**4 and y not in {r.point for r in records}]


def test_minimal_polys_height_one(xi_fib12):
    records = minimal_polys(xi_fib12, 1)
    assert [r.poly for r in records] == _brute_minimal_polys(xi_fib12, 1)


@pytest.mark.parametrize("hmax", [2, 7, 15])
def test_minimal_polys_against_box(xi_fib12, hmax):
    records = minimal_polys(xi_fib12, hmax)
    assert [r.poly for r in records] == _brute_minimal_polys(xi_fib12, hmax)


def test_minimal_polys_against_box_ex2(xi_ex2a2):
    records = minimal_polys(xi_ex2a2, 12)
    assert [r.poly for r in records] == _brute_minimal_polys(xi_ex2a2, 12)


def test_minimal_polys_invariants(xi_fib12):
    records = minimal_polys(xi_fib12, 300)
    for a, b in zip(records, records[1:]):
        assert a.height < b.height
        assert b.value.upper < a.value.lower
    two = minimal_polys(xi_fib12, 300, workers=2)
    assert [r.poly for r in two] == [r.poly for r in records]


def test_monic_cubic_half_exhaustive():
    xi = CertifiedReal.exact(Fraction(1, 2))
    P, value = best_monic_cubic(xi, 1)
    values = {}
    for p, q, r in itertools.product((-1, 0, 1), repeat=3):
        t = Fraction(1, 2)
        values[(p, q, r)] = abs(t**3 + p * t * t + q * t + r)
    best = min(values.values())
    assert best > 0
    assert values[tuple(P)] == best and value.contains(best)


def test_monic_cubic_against_box(xi_ex2a2):
    with mpmath.workdps(60):
        x = mpmath.mpf(xi_ex2a2.mid.numerator) / xi_ex2a2.mid.denominator

        def value_at(p, q, r):
            return abs(x**3 + p * x * x + q * x + r)

        for H in (3, 8):
            best = min(value_at(*c) for c in itertools.product(range(-H, H + 1), repeat=3))
            P, value = best_monic_cubic(xi_ex2a2, H)
            assert max(abs(v) for v in P) <= H
            assert abs(value_at(*P) - best) <= mpmath.mpf(10) ** -50
            assert abs(mpmath.mpf(value.mid.numerator) / value.mid.denominator - best) <= mpmath.mpf(10) ** -50


def test_monic_cubic_monotone(xi_ex2a2):
    values = min_monic_cubic_values(xi_ex2a2, [2, 4, 8, 16, 32])
    seq = [values[H][1] for H in sorted(values)]
    for a, b in zip(seq, seq[1:]):
        assert b.lower <= a.upper


def _nearest_root_distance(xi: float, H: int):
    best = np.inf
    for p, q, r in itertools.product(range(-H, H + 1), repeat=3):
        for z in np.roots([1, p, q, r]):
            if abs(z.imag) < 1e-9:
                best = min(best, abs(z.real - xi))
    return best


def test_algebraic_integer_half():
    xi = CertifiedReal.exact(Fraction(1, 2))
    P, root, dist = best_cubic_algebraic_integer(xi, 2)
    expected = _nearest_root_distance(0.5, 2)
    assert abs(float(dist.mid) - expected) < 1e-9
    assert abs(float(P(root.mid))) < 1e-12


def test_reflected_polynomial():
    import sympy
    from extremal.minimal import _reflected
    x = sympy.Symbol("x")
    P = MonicPoly3(-2, -1, 1)
    m = Fraction(1, 3)
    expected = sympy.Poly(sympy.expand((2 * sympy.Rational(1, 3) - x) ** 3 - 2 * (2 * sympy.Rational(1, 3) - x) ** 2
                                       - (2 * sympy.Rational(1, 3) - x) + 1), x)
    assert _reflected(P, m) == [Fraction(int(c.p), int(c.q)) for c in expected.all_coeffs()]


def test_algebraic_integer_mirror_tie():
    # these two cubics have roots placed symmetrically about 1/2
    from extremal.minimal import _closer, _cubic_real_roots_in
    half = Fraction(1, 2)
    width = Fraction(1, 1 << 96)
    P, Q = MonicPoly3(-2, -1, 1), MonicPoly3(-1, -2, 1)
    candidates = []
    for poly in (P, Q):
        (a, b), = [iv for iv in _cubic_real_roots_in(poly, Fraction(0), Fraction(1), width)]
        dist = (max(Fraction(0), a - half, half - b), max(b - half, half - a))
        candidates.append((poly, (a, b), dist))
    roots = [np.roots([1, *c]) for c in (P, Q)]
    near = [min(abs(z.real - 0.5) for z in r if abs(z.imag) < 1e-9) for r in roots]
    assert abs(near[0] - near[1]) < 1e-12
    with pytest.raises(PrecisionError):
        _closer(candidates[0], candidates[1])
    assert _closer(candidates[0], candidates[1], half)[0] == P
    assert _closer(candidates[1], candidates[0], half)[0] == P


def test_algebraic_integer_against_numpy(xi_fib12):
    P, root, dist = best_cubic_algebraic_integer(xi_fib12, 6)
    expected = _nearest_root_distance(float(xi_fib12), 6)
    assert abs(float(dist.mid) - expected) < 1e-9
    assert P.height <= 6


def test_cubic_gap(ex2a2, xi_ex2a2):
    gaps = cubic_gap_sequence(ex2a2, xi_ex2a2, 12)
    assert len(gaps) == 12
    assert all(0 <= g.lower and g.upper <= Fraction(1, 2) for g in gaps)
    # y_{1,0} = 1, so the first value is the distance from xi**3 to an integer
    assert ex2a2.term(1).x0 == 1
    with mpmath.workdps(60):
        x = mpmath.mpf(xi_ex2a2.mid.numerator) / xi_ex2a2.mid.denominator
        c = x ** 3
        frac = abs(c - mpmath.nint(c))
        assert abs(mpmath.mpf(float(gaps[0].mid)) - frac) < 1e-15


def test_cubic_gap_recomputes_coarse_xi():
    seq = ExtremalSequence.generate(example_two_seed(2), 8)
    coarse = CertifiedReal.exact(Fraction(5862, 10000)).widen(Fraction(1, 10**3))
    gaps = cubic_gap_sequence(seq, None, 10)
    again = cubic_gap_sequence(seq, coarse, 10)
    assert all(a.overlaps(b) for a, b in zip(gaps, again))


def test_records_to_csv(xi_fib12):
    points = minimal_points(xi_fib12, 100)
    rows = list(csv.reader(io.StringIO(records_to_csv(points))))
    assert rows[0] == ["index", "x0", "x1", "x2", "norm", "L_mid", "L_rad"]
    assert len(rows) == len(points) + 1
    assert IntTriple(*map(int, rows[-1][1:4])) == points[-1].point
    polys = minimal_polys(xi_fib12, 20)
    rows = list(csv.reader(io.StringIO(records_to_csv(polys))))
    assert rows[0][:5] == ["index", "p0", "p1", "p2", "height"]
    assert len(rows) == len(polys) + 1
