import sys
from fractions import Fraction

import pytest

from extremal.sequence import ExtremalSequence, certified_xi, example_two_seed, fibonacci_seed


@pytest.fixture(scope="session")
def fib12():
    return ExtremalSequence.generate(fibonacci_seed(1, 2), 30)


@pytest.fixture(scope="session")
def ex2a1():
    return ExtremalSequence.generate(example_two_seed(1), 27)


@pytest.fixture(scope="session")
def ex2a2():
    return ExtremalSequence.generate(example_two_seed(2), 27)


@pytest.fixture(scope="session")
def xi_fib12():
    xi, _ = certified_xi(fibonacci_seed(1, 2), Fraction(1, 10**80))
    return xi


@pytest.fixture(scope="session")
def xi_ex2a2():
    xi, _ = certified_xi(example_two_seed(2), Fraction(1, 10**80))
    return xi



def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, collected by tests/test_acceptance.py
    module = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
