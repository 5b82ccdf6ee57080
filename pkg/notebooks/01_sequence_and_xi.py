"""
From a matrix seed to a certified extremal number
=================================================

Run with ``python3 notebooks/01_sequence_and_xi.py``.
"""
from fractions import Fraction

from extremal.arith import det2, det3
from extremal.sequence import ExtremalSequence, fibonacci_seed, fibonacci_word_xi, xi_from_sequence
from extremal.verify import extremality_certificate, relation_check

# the seed built from A = [[1,1],[1,0]] and B = [[2,1],[1,0]]
seed = fibonacci_seed(1, 2)
seq = ExtremalSequence.generate(seed, 16)
for i, y in enumerate(seq.triples[:6], 1):
    print(i, tuple(y), "det2 =", det2(y))

# norms grow like X_{i+1} ~ X_i ** 1.618...
print("norm digits:", [len(str(y.norm)) for y in seq.triples])

# the ratio y_{i,1} / y_{i,0} converges; the radius is certified
xi = xi_from_sequence(seq, Fraction(1, 10**60))
print("xi =", xi.decimal_string(60))

# the same number from its continued fraction [0, 1, 2, 1, 1, 2, 1, 2, ...]
other = fibonacci_word_xi(1, 2, Fraction(1, 10**60))
print("agree:", xi.overlaps(other))

# the consecutive determinants stay bounded
print("det3:", [det3(seq.term(i), seq.term(i + 1), seq.term(i + 2)) for i in range(1, 10)])

cert = extremality_certificate(seq, stop=14)
print(cert.summary())

i0, rows = relation_check(seq)
print("both bracket determinants vanish from i =", i0)
