import itertools
import json
import random

import mpmath
import pytest
import sympy

from extremal.relations import (DEGENERATE, NEVER, MultiDegree, RelationCandidate, admissible_profiles,
                                constraint_matrix, derivative_at_ones, enumerate_monomials,
                                expand_known_relation, in_span, integer_kernel, null_space,
                                relations_to_json, space_dimension, sweep, validate_candidates)

FIRST = MultiDegree((1, 1, 0, 2, 1), 5)
SECOND = MultiDegree((0, 1, 1, 2, 1), 5)


def test_small_bases():
    assert enumerate_monomials(MultiDegree((1,), 2)) == [((0, 0, 1),)]
    assert enumerate_monomials(MultiDegree((1, 1), 0)) == [((1, 0, 0), (1, 0, 0))]
    with pytest.raises(ValueError):
        MultiDegree((1, 1), 5)


def test_basis_membership_and_homogeneity():
    basis = enumerate_monomials(FIRST)
    assert ((1, 0, 0), (0, 1, 0), (0, 0, 0), (1, 0, 1), (0, 0, 1)) in basis
    assert basis == sorted(basis) and len(set(basis)) == len(basis)
    for m in basis:
        assert [sum(r) for r in m] == list(FIRST.d)
        assert sum(r[1] + 2 * r[2] for r in m) == 5
    # independent count: coefficient of t**5 in the product of per-point generating functions
    t = sympy.Symbol("t")
    gf = sympy.prod([sum(t ** (a + 2 * b) for a in range(n + 1) for b in range(n - a + 1)) for n in FIRST.d])
    assert len(basis) == sympy.Poly(sympy.expand(gf), t).coeff_monomial(t ** 5)


def test_profile_boundary():
    profiles = admissible_profiles(MultiDegree((2,), 2))
    assert ((0, 0),) in profiles
    assert ((1, 0),) in profiles and ((0, 1),) in profiles
    assert ((2, 0),) not in profiles and ((1, 1),) not in profiles


def test_profiles_against_float():
    # every admissibility decision agrees with 100-digit evaluation
    g = (1 + mpmath.sqrt(5)) / 2
    with mpmath.workdps(100):
        for md in (FIRST, SECOND, MultiDegree((2, 1, 3), 6)):
            chosen = set(admissible_profiles(md))
            per_j = [[(a, b) for a in range(n + 1) for b in range(n - a + 1)] for n in md.d]
            rhs = sum(n * g ** j for j, n in enumerate(md.d))
            for f in itertools.product(*per_j):
                lhs = 2 * sum((a + b) * g ** j for j, (a, b) in enumerate(f))
                ok = lhs <= rhs + mpmath.mpf(10) ** -90
                assert (f in chosen) == ok


def test_profiles_stable():
    assert admissible_profiles(FIRST) == admissible_profiles(FIRST)
    assert all(p in admissible_profiles(FIRST) for p in [((0, 0),) * 5])


def test_derivative_at_ones():
    m = ((1, 2, 3),)
    assert derivative_at_ones(m, ((0, 0),)) == 1
    assert derivative_at_ones(((0, 1, 0),), ((2, 0),)) == 0
    assert derivative_at_ones(((0, 0, 3),), ((0, 2),)) == 6
    # against sympy differentiation at the all-ones point
    u = sympy.symbols("a b c")
    mono = u[0] ** 1 * u[1] ** 2 * u[2] ** 3
    for f1 in range(4):
        for f2 in range(5):
            expected = sympy.diff(mono, u[1], f1, u[2], f2).subs({s: 1 for s in u}) if f1 or f2 else 1
            assert derivative_at_ones(m, ((f1, f2),)) == expected


def test_integer_kernel_against_sympy():
    rng = random.Random(11)
    for _ in range(40):
        rows, cols = rng.randint(1, 6), rng.randint(1, 8)
        A = [[rng.randint(-4, 4) if rng.random() < 0.7 else 0 for _ in range(cols)] for _ in range(rows)]
        kernel = integer_kernel(A, cols)
        expected = sympy.Matrix(A).nullspace()
        assert len(kernel) == len(expected)
        for v in kernel:
            assert all(isinstance(x, int) for x in v)
            assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in A)
            assert sympy.igcd(*v) == 1 and next(x for x in v if x) > 0
        if kernel:
            assert sympy.Matrix(kernel).rank() == len(kernel)


def test_kernel_dimension_ignores_basis_order():
    for md in (FIRST, SECOND):
        basis = enumerate_monomials(md)
        shuffled = basis[:]
        random.Random(2).shuffle(shuffled)
        a = integer_kernel(constraint_matrix(md, basis), len(basis))
        b = integer_kernel(constraint_matrix(md, shuffled), len(basis))
        assert len(a) == len(b)


@pytest.mark.parametrize("which, md", [("first", FIRST), ("second", SECOND)])
def test_known_relation_in_kernel(which, md):
    rel = expand_known_relation(which)
    assert rel.md == md and not rel.is_zero()
    kernel = null_space(md)
    assert kernel and in_span(rel, kernel)
    for cand in kernel:
        for table, _ in cand.terms:
            assert [sum(r) for r in table] == list(md.d)
            assert sum(r[1] + 2 * r[2] for r in table) == md.p


def test_known_relation_matches_sympy():
    u = [sympy.symbols(f"u{j}_0:3") for j in range(5)]

    def bracket(x, z):
        X = sympy.Matrix([[x[0], x[1]], [x[1], x[2]]])
        Z = sympy.Matrix([[z[0], z[1]], [z[1], z[2]]])
        adj = Z.adjugate()
        b = X * adj * X
        return [b[0, 0], b[0, 1], b[1, 1]]

    poly = sympy.Matrix([list(u[0]), list(u[1]), bracket(u[3], u[4])]).det()
    poly = sympy.Poly(sympy.expand(poly), *[s for p in u for s in p])
    rel = expand_known_relation("first")
    coeffs = {}
    for monom, c in poly.terms():
        table = tuple(tuple(monom[3 * j:3 * j + 3]) for j in range(5))
        coeffs[table] = int(c)
    assert dict(rel.terms) == coeffs
    # bracket component 0 has weight 2
    b0 = sympy.Poly(sympy.expand(bracket(u[3], u[4])[0]), *u[3], *u[4])
    assert {m[1] + 2 * m[2] + m[4] + 2 * m[5] for m in b0.monoms()} == {2}


def test_only_zero_profile():
    # a lone unit degree admits only the zero profile, whose row is all ones
    for md in (MultiDegree((0, 1), 1), MultiDegree((1, 0), 2), MultiDegree((0, 0, 1), 0)):
        assert admissible_profiles(md) == [((0, 0),) * len(md.d)]
        assert len(null_space(md)) == space_dimension(md) - 1


def test_kernel_dimension_count():
    for result in sweep(4, 1, all_weights=True):
        rows = constraint_matrix(result.md)
        rank = sympy.Matrix(rows).rank() if rows and result.dimension else 0
        assert len(result.kernel) == result.dimension - rank


def test_mirror_dimension():
    for result in sweep(4, 2, all_weights=True):
        assert result.dimension == result.mirror_dimension
        assert result.md.d[0] > 0 and result.md.d[-1] > 0


def test_validate_candidates(fib12):
    seq = fib12.extend(0)
    known = [expand_known_relation("first"), expand_known_relation("second")]
    for v in validate_candidates(known, seq):
        assert v.status == "VANISHES" and v.first_index <= 3
    zero = RelationCandidate(FIRST, ())
    assert validate_candidates([zero], seq)[0].status == DEGENERATE
    basis = enumerate_monomials(FIRST)
    kernel = null_space(FIRST)
    rng = random.Random(4)
    for _ in range(3):
        vec = [0] * len(basis)
        vec[rng.randrange(len(basis))] = 1
        cand = RelationCandidate.from_vector(FIRST, basis, vec)
        assert not in_span(cand, kernel)
        assert validate_candidates([cand], seq)[0].status == NEVER


def test_kernel_vectors_vanish_on_sequence(fib12):
    for md in (FIRST, SECOND):
        for v in validate_candidates(null_space(md), fib12):
            assert v.status == "VANISHES"


def test_json_and_pretty():
    rel = expand_known_relation("first")
    doc = json.loads(relations_to_json([rel]))
    assert doc[0]["multidegree"] == [1, 1, 0, 2, 1] and doc[0]["weight"] == 5
    assert RelationCandidate.from_dict(doc[0]) == rel
    text = rel.pretty()
    assert "u[3][0]" in text and "u[4][2]" in text
    assert RelationCandidate(FIRST, ()).pretty() == "0"
