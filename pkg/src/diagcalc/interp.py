"""Newton and Hermite interpolating polynomials built on divided-difference tables."""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .divdiff import DDTable, build_columns, group_equal

MAX_DEGREE = 31


class PolynomialC:
    """Complex polynomial in the monomial basis, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if len(nz) else c[:1] * 0
        self.coeffs = c

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def derivative(self, order=1):
        if order >= len(self.coeffs):
            return PolynomialC([0])
        return PolynomialC(npoly.polyder(self.coeffs, order))

    def __repr__(self):
        return f"PolynomialC({self.coeffs.tolist()!r})"


@dataclass(frozen=True)
class HermiteData:
    """Pairs (node, [f(node), f'(node), ..., f^(p-1)(node)]) with distinct nodes."""

    points: Tuple[Tuple[complex, Tuple[complex, ...]], ...]

    def __post_init__(self):
        nodes = [complex(z) for z, _ in self.points]
        if len(set(nodes)) != len(nodes):
            raise ValueError("Hermite nodes must be pairwise distinct")
        if any(len(v) == 0 for _, v in self.points):
            raise ValueError("each Hermite node needs at least one value")

    @classmethod
    def of(cls, pairs):
        return cls(tuple((complex(z), tuple(complex(v) for v in vals)) for z, vals in pairs))

    @property
    def n_conditions(self):
        return sum(len(v) for _, v in self.points)


@dataclass(frozen=True)
class NewtonForm:
    """sum_q coeffs[q] * prod_{j<q} (z - nodes[j])."""

    nodes: Tuple[complex, ...]
    coeffs: np.ndarray

    def __call__(self, z):
        acc = self.coeffs[-1]
        for q in range(len(self.coeffs) - 2, -1, -1):
            acc = acc * (z - self.nodes[q]) + self.coeffs[q]
        return acc

    def to_monomial(self) -> PolynomialC:
        # synthetic multiplication by (z - node), innermost factor first
        p = np.array([self.coeffs[-1]], dtype=np.complex128)
        for q in range(len(self.coeffs) - 2, -1, -1):
            shifted = np.concatenate(([0], p))
            shifted[:-1] -= self.nodes[q] * p
            shifted[0] += self.coeffs[q]
            p = shifted
        return PolynomialC(p)

    def eval_matrix(self, X) -> np.ndarray:
        """Sum of coeffs[q] * W_q with W_{q+1} = W_q (X - nodes[q] I).

        The product form keeps the banded structure of bidiagonal inputs exact.
        """
        X = np.asarray(X, dtype=np.complex128)
        k = X.shape[0]
        eye = np.eye(k, dtype=np.complex128)
        W = eye.copy()
        R = self.coeffs[0] * eye
        for q in range(1, len(self.coeffs)):
            W = W @ (X - self.nodes[q - 1] * eye)
            R = R + self.coeffs[q] * W
        return R


def newton_form(table: DDTable) -> NewtonForm:
    return NewtonForm(tuple(table.nodes), table.newton_coefficients)


def newton_poly(table: DDTable) -> PolynomialC:
    """Monomial expansion of the Newton interpolant stored in ``table``."""
    if len(table) - 1 > MAX_DEGREE:
        raise ValueError(f"degree above {MAX_DEGREE} is not supported")
    return newton_form(table).to_monomial()


def hermite_form(data: HermiteData) -> NewtonForm:
    """Confluent Newton form matching every prescribed derivative value."""
    raw = []
    prescribed = {}
    for z, vals in data.points:
        raw.extend([z] * len(vals))
        prescribed[z] = vals
    order = group_equal(raw)
    zs = [raw[p] for p in order]

    def confluent(z, j):
        return prescribed[z][j] / math.factorial(j)

    columns = build_columns(zs, confluent, lambda a, b: a - b)
    return NewtonForm(tuple(zs), np.array([c[0] for c in columns], dtype=np.complex128))


def hermite_poly(data: HermiteData) -> PolynomialC:
    if data.n_conditions - 1 > MAX_DEGREE:
        raise ValueError(f"degree above {MAX_DEGREE} is not supported")
    return hermite_form(data).to_monomial()


def poly_derivative_check(P: PolynomialC, data: HermiteData) -> float:
    """Largest |P^(s)(node) - prescribed value| over all conditions."""
    worst = 0.0
    for z, vals in data.points:
        for s, v in enumerate(vals):
            worst = max(worst, abs(P.derivative(s)(z) - v) if s else abs(P(z) - v))
    return worst
