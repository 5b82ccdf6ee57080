"""
Brute force searches around an extremal number
==============================================

Run with ``python3 notebooks/02_minimal_points_and_relations.py``.
"""
from fractions import Fraction

from extremal.minimal import crosscheck_minimal_points, minimal_points, minimal_polys
from extremal.relations import MultiDegree, expand_known_relation, in_span, null_space
from extremal.sequence import certified_xi, fibonacci_seed
from extremal.verify import poly_certificate

xi, seq = certified_xi(fibonacci_seed(1, 2), Fraction(1, 10**60))

# records of L(x) = max(|x1 - xi x0|, |x2 - xi^2 x0|) by increasing norm
records = minimal_points(xi, 10**5)
for r in records:
    print(f"{r.norm:>7}  {tuple(r.point)}  L = {float(r.L.mid):.3e}")

# which records are terms of the sequence, and from which norm on all of them are
check = crosscheck_minimal_points(records, seq)
print("N0 =", check["N0"], "unmatched:", check["unmatched"])

# the dual side: record-small |P(xi)| over quadratic polynomials of bounded height
polys = minimal_polys(xi, 2000)
cert = poly_certificate(polys, xi, seq)
for row in cert.rows:
    print(tuple(row.poly), "scaled value", f"{float(row.scaled_value.mid):.3f}", "resultant", row.resultant)

# the exact null space of the derivative conditions contains det(u0, u1, [u3, u3, u4])
md = MultiDegree((1, 1, 0, 2, 1), 5)
kernel = null_space(md)
print("kernel dimension", len(kernel), "contains the known relation:",
      in_span(expand_known_relation("first"), kernel))
print(kernel[0].pretty())
