"""Exact and certified computations with extremal real numbers and their approximation triples."""
