"""Divided-difference tables (plain and confluent) and the bidiagonal Opitz matrix."""
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DegenerateNodes, DomainError, NotDifferentiable
from .funcspec import FunctionSpec
from .numkit import DEFAULT_TOL, ToleranceConfig


@dataclass(frozen=True)
class DDTable:
    """Triangular table ``columns[j][i] = Delta(z_i, ..., z_{i+j}) f``.

    ``nodes`` is the internal ordering (equal nodes made adjacent); ``order``
    maps it back to the caller's ordering: ``nodes[p] == input[order[p]]``.
    """

    nodes: Tuple[complex, ...]
    columns: Tuple[np.ndarray, ...]
    order: Tuple[int, ...]
    warnings: Tuple[str, ...] = field(default=())

    def __len__(self):
        return len(self.nodes)

    def entry(self, i, j) -> complex:
        return complex(self.columns[j][i])

    @property
    def value(self) -> complex:
        return complex(self.columns[-1][0])

    @property
    def newton_coefficients(self) -> np.ndarray:
        return np.array([c[0] for c in self.columns], dtype=np.complex128)

    @property
    def multiplicities(self) -> List[Tuple[complex, int]]:
        out = []
        for z in self.nodes:
            if out and out[-1][0] == z:
                out[-1] = (z, out[-1][1] + 1)
            else:
                out.append((z, 1))
        return out


def group_equal(nodes: Sequence[complex]):
    """Stable grouping sort: equal nodes become adjacent, first-appearance order kept."""
    first = {}
    for i, z in enumerate(nodes):
        first.setdefault(z, i)
    return sorted(range(len(nodes)), key=lambda i: first[nodes[i]])


def dd_table(f: FunctionSpec, nodes, tol: ToleranceConfig = DEFAULT_TOL, check_domain=True) -> DDTable:
    """Build the full divided-difference table of ``f`` over ``nodes``.

    A block of m equal nodes z contributes f^(j)(z)/j! at depth j < m.
    """
    raw = [complex(z) for z in nodes]
    if not raw:
        raise ValueError("at least one node is required")
    order = group_equal(raw)
    zs = [raw[p] for p in order]

    counts = {}
    for z in zs:
        counts[z] = counts.get(z, 0) + 1
    for z, m in counts.items():
        if check_domain and not f.domain.contains(z):
            raise DomainError(f"node {z!r} lies outside the domain {f.domain.describe()}")
        if m > 1:
            if f.max_derivative_order < m - 1:
                raise NotDifferentiable(f"repeated node {z!r} needs derivatives up to order {m - 1}")
            if check_domain and not f.domain.is_cluster_point(z):
                raise NotDifferentiable(f"repeated node {z!r} is not a cluster point of the domain")

    warnings = []
    distinct = list(counts)
    for a in range(len(distinct)):
        for b in range(a + 1, len(distinct)):
            if abs(distinct[a] - distinct[b]) < tol.zero_tol:
                warnings.append(
                    f"ill-conditioned: nodes {distinct[a]!r} and {distinct[b]!r} closer than zero_tol"
                )

    # derivative data needed for confluent entries, cached per node
    derivs = {}

    def confluent(z, j):
        key = (z, j)
        if key not in derivs:
            derivs[key] = f.derivative_value(z, j) / math.factorial(j)
        return derivs[key]

    columns = build_columns(zs, confluent, f.difference)
    return DDTable(tuple(zs), tuple(columns), tuple(order), tuple(warnings))


def build_columns(zs, confluent, difference):
    """Run the recursion over grouped nodes; ``confluent(z, j)`` supplies f^(j)(z)/j!."""
    n = len(zs)
    columns = [np.array([confluent(z, 0) for z in zs], dtype=np.complex128)]
    for j in range(1, n):
        prev = columns[-1]
        nxt = np.empty(n - j, dtype=np.complex128)
        for i in range(n - j):
            if zs[i + j] == zs[i]:
                nxt[i] = confluent(zs[i], j)
            else:
                nxt[i] = (prev[i + 1] - prev[i]) / difference(zs[i + j], zs[i])
        columns.append(nxt)
    return columns


def dd_value(f: FunctionSpec, nodes, tol: ToleranceConfig = DEFAULT_TOL, check_domain=True) -> complex:
    """Delta(z_1, ..., z_n) f."""
    return dd_table(f, nodes, tol, check_domain).value


def dd_batch(values: np.ndarray, diffs: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Top divided differences for many tuples of distinct pool points at once.

    ``values[a]`` is f at pool point a, ``diffs[a, b]`` is point a minus point b,
    and each row of ``tuples`` holds pool indices.
    """
    tuples = np.asarray(tuples)
    cur = values[tuples]
    n = tuples.shape[1]
    for j in range(1, n):
        num = cur[:, 1:] - cur[:, :-1]
        den = diffs[tuples[:, j:], tuples[:, : n - j]]
        cur = num / den
    return cur[:, 0]


def opitz_matrix(nodes, eps: float) -> np.ndarray:
    """Lower-bidiagonal matrix with ``nodes`` on the diagonal and ``eps`` below it."""
    zs = [complex(z) for z in nodes]
    if len(zs) < 2:
        raise ValueError("opitz_matrix needs at least two nodes")
    if len(set(zs)) != len(zs):
        raise DegenerateNodes("opitz_matrix nodes must be pairwise distinct")
    if not eps > 0:
        raise ValueError("eps must be positive")
    k = len(zs)
    A = np.diag(np.array(zs, dtype=np.complex128))
    A[np.arange(1, k), np.arange(k - 1)] = eps
    return A


def corner_of(M) -> complex:
    """Bottom-left entry (row k, column 1)."""
    return complex(np.asarray(M)[-1, 0])
