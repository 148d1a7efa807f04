import random

import pytest

from nevlab.forms import HomogeneousForm, monomial_basis


def random_form(rng, n, d, height=5, density=1.0):
    coeffs = {}
    for idx in monomial_basis(n, d):
        if rng.random() <= density:
            c = rng.randint(-height, height)
            if c:
                coeffs[idx] = c
    if not coeffs:
        coeffs[monomial_basis(n, d)[0]] = 1
    return HomogeneousForm(n, d, coeffs)


@pytest.fixture
def rng():
    return random.Random(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
