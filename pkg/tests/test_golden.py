import random

import mpmath
from hypothesis import given
from hypothesis import strategies as st

from extremal.golden import GoldenExact, fibonacci, golden_compare, golden_weight

mpmath.mp.dps = 100
GAMMA = (1 + mpmath.sqrt(5)) / 2

elems = st.builds(GoldenExact, st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))


def _value(u: GoldenExact):
    return u.a + u.b * GAMMA


def test_fibonacci():
    assert [fibonacci(n) for n in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert [fibonacci(-n) for n in range(1, 6)] == [1, -1, 2, -3, 5]


def test_defining_relation():
    g = GoldenExact.gamma_power(1)
    assert g * g == g + 1
    assert golden_compare(GoldenExact.gamma_power(2), GoldenExact(1, 1)) == 0


def test_spec_comparisons():
    # 2 gamma < gamma + 2
    assert golden_compare(GoldenExact(0, 2), GoldenExact(2, 1)) == -1
    assert golden_compare(GoldenExact(-1, 1), GoldenExact(0, 0)) == 1


def test_gamma_powers_against_mpmath():
    for j in range(-10, 30):
        assert abs(_value(GoldenExact.gamma_power(j)) - GAMMA ** j) < mpmath.mpf(10) ** -80 * GAMMA ** abs(j)


@given(elems, elems, elems)
def test_ring_laws(u, v, w):
    assert u + v == v + u and u * v == v * u
    assert (u + v) * w == u * w + v * w
    assert (u * v) * w == u * (v * w)
    assert u - u == GoldenExact()


def test_compare_agrees_with_high_precision():
    rng = random.Random(1)
    for _ in range(10**4):
        scale = 10 ** rng.randint(0, 12)
        u = GoldenExact(rng.randint(-scale, scale), rng.randint(-scale, scale))
        v = GoldenExact(rng.randint(-scale, scale), rng.randint(-scale, scale))
        diff = _value(u) - _value(v)
        expected = 0 if u == v else (1 if diff > 0 else -1)
        assert golden_compare(u, v) == expected


def test_near_ties():
    # convergents F(n+1)/F(n) approach gamma from alternating sides
    for n in range(2, 60):
        u = GoldenExact(0, fibonacci(n))
        v = GoldenExact(fibonacci(n + 1), 0)
        expected = 1 if _value(u) > _value(v) else -1
        assert golden_compare(u, v) == expected


def test_golden_weight():
    assert golden_weight([1, 0, 1]) == GoldenExact(2, 1)
    for coeffs in ([3, 0, 2, 1], [0, 0, 0, 0, 5], [1, 1, 1, 1, 1, 1]):
        exact = golden_weight(coeffs)
        approx = sum(c * GAMMA ** j for j, c in enumerate(coeffs))
        assert abs(_value(exact) - approx) < mpmath.mpf(10) ** -80
