import math

import numpy as np
import pytest
from hypothesis import settings

from diagcalc.funcspec import FunctionSpec, OpenDisk

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

# holomorphic corpus: (text, domain); domains keep branch cuts and poles away
CORPUS = [
    ("exp(z)", None),
    ("z^3", None),
    ("1/(z-10)", OpenDisk(0, 5)),
    ("sin(z)", None),
    ("cos(z)", None),
    ("sqrt(z+4)", OpenDisk(0, 3)),
    ("log(z+3)", OpenDisk(0, 2)),
    ("z^4 - 2*z^2 + 3*z - 1", None),
]


def corpus_functions():
    return [FunctionSpec.from_expression(t, d) for t, d in CORPUS]


@pytest.fixture(scope="session")
def corpus():
    return corpus_functions()


def lagrange_dd(f, nodes):
    """Independent oracle: sum_j f(z_j) / prod_{l != j} (z_j - z_l)."""
    total = 0j
    for j, zj in enumerate(nodes):
        den = 1 + 0j
        for l, zl in enumerate(nodes):
            if l != j:
                den *= zj - zl
        total += f(zj) / den
    return total


def separated_points(rng, n, radius, min_sep, center=0j, real=False):
    """n points in the disk (or interval) of given radius with pairwise separation >= min_sep."""
    out = []
    while len(out) < n:
        if real:
            z = center + rng.uniform(-radius, radius)
        else:
            r = radius * math.sqrt(rng.uniform())
            z = center + r * np.exp(2j * np.pi * rng.uniform())
        if all(abs(z - w) >= min_sep for w in out):
            out.append(complex(z))
    return out


def random_diagonalizable(rng, k, radius=1.0, min_sep=1e-2, max_cond=1e4):
    """(X, P, eigenvalues) with P of bounded condition number."""
    lam = np.array(separated_points(rng, k, radius, min_sep))
    while True:
        P = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        P = np.eye(k) + 0.5 * P / np.sqrt(k)
        if np.linalg.cond(P) <= max_cond:
            break
    X = P @ np.diag(lam) @ np.linalg.inv(P)
    return X, P, lam


# criterion lines collected by test_acceptance and printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
