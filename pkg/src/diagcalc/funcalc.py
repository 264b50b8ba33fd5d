"""The functional calculus f[X]: eigenbasis route, Newton route and the Hermite extension."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .divdiff import dd_table
from .errors import (
    AmbiguousClustering,
    DefectiveSpectrum,
    IllConditioned,
    InZk,
    MultipleRootOutsideClusterSet,
    NotDiagonalizable,
    NotDifferentiable,
)
from .funcspec import FiniteSet, FunctionSpec
from .interp import newton_form
from .numkit import (
    DEFAULT_TOL,
    EigenDecomposition,
    ToleranceConfig,
    as_matrix,
    eig,
    numerical_rank,
    op_norm,
)

PATHS = ("diag", "newton", "hermite")


@dataclass(frozen=True)
class Cluster:
    value: complex
    alg_mult: int
    min_poly_exp: int
    members: Tuple[complex, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class SpectrumData:
    clusters: Tuple[Cluster, ...]
    in_Z_k: bool
    diagonalizable: bool
    dim: int
    eig: EigenDecomposition = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class CalcResult:
    value: np.ndarray
    path: str
    cond_used: float
    warnings: Tuple[str, ...] = ()


def _cluster_values(values, radius):
    """Single-linkage clusters (lists of indices) at the given radius."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(j)] = find(i)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _min_poly_exponent(M, rep, members, tol):
    """Smallest p with rank((M - rep I)^p) = k - alg_mult.

    The rank threshold allows for the spread of the cluster: replacing each
    member by the representative perturbs the p-th power by about
    p * spread * (||M - rep I|| + spread)^(p-1).
    """
    k = M.shape[0]
    m = len(members)
    spread = max(abs(z - rep) for z in members)
    B = M - rep * np.eye(k)
    s = max(1.0, op_norm(B))
    P = np.eye(k, dtype=np.complex128)
    for p in range(1, m + 1):
        P = P @ B
        threshold = tol.zero_tol * s**p + p * spread * (s + spread) ** (p - 1)
        if numerical_rank(P, threshold) <= k - m:
            return p
    return m


def analyze_spectrum(X, tol: ToleranceConfig = DEFAULT_TOL) -> SpectrumData:
    """Cluster eigenvalues and detect minimal-polynomial exponents and Z_k membership."""
    M = as_matrix(X)
    k = M.shape[0]
    ed = eig(M, tol)
    groups = _cluster_values(ed.values, tol.cluster_tol)
    reps = [complex(np.mean(ed.values[g])) for g in groups]
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            if abs(reps[a] - reps[b]) <= 3 * tol.cluster_tol:
                raise AmbiguousClustering(
                    f"cluster representatives {reps[a]!r} and {reps[b]!r} are within 3*cluster_tol"
                )
    clusters = []
    for g, rep in zip(groups, reps):
        members = tuple(complex(v) for v in ed.values[g])
        p = _min_poly_exponent(M, rep, members, tol)
        clusters.append(Cluster(rep, len(g), p, members))
    diagonalizable = all(c.min_poly_exp == 1 for c in clusters)
    in_zk = len(clusters) == 1 and clusters[0].min_poly_exp == k
    return SpectrumData(tuple(clusters), in_zk, diagonalizable, k, ed)


def _snap(f: FunctionSpec, z, tol, warnings):
    key = f.snap(z, tol.cluster_tol)
    if key != z and isinstance(f.domain, FiniteSet):
        warnings.append(f"snapped eigenvalue {complex(z)!r} to domain point {key!r}")
    return key


def _diag_value(f, M, ed, tol, warnings):
    fv = np.array([f.value(_snap(f, lam, tol, warnings)) for lam in ed.values])
    P = ed.vectors
    # P diag(fv) P^-1 via a solve rather than an explicit inverse
    return np.linalg.solve(P.T, (P * fv).T).T


def calc_diag(f: FunctionSpec, X, tol: ToleranceConfig = DEFAULT_TOL) -> CalcResult:
    """f[X] = P diag(f(lambda)) P^-1 for diagonalizable X with a well-conditioned eigenbasis."""
    M = as_matrix(X)
    ed = eig(M, tol)
    if not ed.has_basis:
        spec = analyze_spectrum(M, tol)
        if not spec.diagonalizable:
            raise NotDiagonalizable("matrix has a repeated root of its minimal polynomial")
        raise IllConditioned(
            f"eigenbasis condition number {ed.cond_estimate:.3g} exceeds cond_max {tol.cond_max:.3g}"
        )
    warnings = []
    value = _diag_value(f, M, ed, tol, warnings)
    return CalcResult(value, "diag", ed.cond_estimate, tuple(warnings))


def _newton(f, M, spec, tol, warnings):
    if not spec.diagonalizable:
        raise DefectiveSpectrum("minimal polynomial has a repeated root; use the Hermite route")
    nodes = [_snap(f, c.value, tol, warnings) for c in spec.clusters]
    table = dd_table(f, nodes, tol, check_domain=False)
    warnings.extend(table.warnings)
    return newton_form(table).eval_matrix(M)


def calc_newton(f: FunctionSpec, X, tol: ToleranceConfig = DEFAULT_TOL, spectrum: Optional[SpectrumData] = None) -> CalcResult:
    """f[X] = V[X] with V the Newton interpolant on the distinct eigenvalues.

    No eigenvector matrix is inverted, which keeps this route usable when
    eigenvalues nearly coalesce.
    """
    M = as_matrix(X)
    spec = spectrum or analyze_spectrum(M, tol)
    warnings = []
    value = _newton(f, M, spec, tol, warnings)
    return CalcResult(value, "newton", spec.eig.cond_estimate, tuple(warnings))


def _is_cluster_point(f: FunctionSpec, z, tol):
    if isinstance(f.domain, FiniteSet):
        return False
    return f.domain.distance(z) <= tol.cluster_tol


def calc_extended(f: FunctionSpec, X, tol: ToleranceConfig = DEFAULT_TOL, spectrum: Optional[SpectrumData] = None) -> CalcResult:
    """f[X] = P[X] where P matches f and its derivatives at each minimal-polynomial root."""
    M = as_matrix(X)
    k = M.shape[0]
    spec = spectrum or analyze_spectrum(M, tol)
    warnings = []
    budget = f.max_derivative_order
    nodes = []
    for c in spec.clusters:
        z = _snap(f, c.value, tol, warnings)
        if c.min_poly_exp > 1:
            if spec.in_Z_k and k == budget + 2:
                raise InZk(
                    f"matrix lies in Z_{k} and {f.label} has derivatives only up to order {k - 2}"
                )
            if not _is_cluster_point(f, z, tol):
                raise MultipleRootOutsideClusterSet(
                    f"repeated root {z!r} of the minimal polynomial is an isolated domain point"
                )
            if c.min_poly_exp - 1 > budget:
                raise NotDifferentiable(
                    f"root {z!r} has exponent {c.min_poly_exp} but {f.label} has no derivatives"
                )
        nodes.extend([z] * c.min_poly_exp)
    table = dd_table(f, nodes, tol, check_domain=False)
    warnings.extend(table.warnings)
    value = newton_form(table).eval_matrix(M)
    return CalcResult(value, "hermite", spec.eig.cond_estimate, tuple(warnings))


def calc_auto(f: FunctionSpec, X, tol: ToleranceConfig = DEFAULT_TOL) -> CalcResult:
    """Dispatch: eigenbasis when well conditioned, Newton when simple but ill conditioned, else Hermite."""
    M = as_matrix(X)
    spec = analyze_spectrum(M, tol)
    ed = spec.eig
    if spec.diagonalizable and ed.has_basis:
        warnings = ["route: diag"]
        value = _diag_value(f, M, ed, tol, warnings)
        return CalcResult(value, "diag", ed.cond_estimate, tuple(warnings))
    if spec.diagonalizable:
        res = calc_newton(f, M, tol, spec)
        note = (
            f"route: newton (eigenbasis condition number {ed.cond_estimate:.3g} "
            f"exceeds cond_max {tol.cond_max:.3g})"
        )
        return CalcResult(res.value, res.path, res.cond_used, (note,) + res.warnings)
    res = calc_extended(f, M, tol, spec)
    return CalcResult(res.value, res.path, res.cond_used, ("route: hermite",) + res.warnings)


def calc(f: FunctionSpec, X, tol: ToleranceConfig = DEFAULT_TOL, mode: str = "auto") -> CalcResult:
    """Run one route by name: auto, diag, newton or hermite."""
    if mode == "auto":
        return calc_auto(f, X, tol)
    if mode == "diag":
        return calc_diag(f, X, tol)
    if mode == "newton":
        return calc_newton(f, X, tol)
    if mode == "hermite":
        return calc_extended(f, X, tol)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Spectrum pairing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """Bijection ``pairs[(i, j)]`` from ``values[i]`` to ``limit_values[j]``."""

    pairs: Tuple[Tuple[int, int], ...]
    max_distance: float
    values: np.ndarray = field(repr=False, compare=False, default=None)
    limit_values: np.ndarray = field(repr=False, compare=False, default=None)


def pair_values(a: Sequence[complex], b: Sequence[complex]) -> Pairing:
    """Bottleneck-optimal matching of two equal-size multisets.

    Among matchings minimizing the largest distance, the one with the least
    total distance is returned.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError("multisets must have equal size")
    D = np.abs(a[:, None] - b[None, :])
    candidates = np.unique(D)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        blocked = (D > candidates[mid]).astype(float)
        r, c = linear_sum_assignment(blocked)
        if blocked[r, c].sum() == 0:
            hi = mid
        else:
            lo = mid + 1
    t = candidates[lo]
    cost = np.where(D <= t, D, D.max() * len(a) + 1.0)
    r, c = linear_sum_assignment(cost)
    pairs = tuple((int(i), int(j)) for i, j in zip(r, c))
    return Pairing(pairs, float(D[r, c].max()), a, b)


def pair_spectra(A_seq, A_limit, tol: ToleranceConfig = DEFAULT_TOL) -> List[Pairing]:
    """Pair each member's eigenvalues with the limit's, minimizing the worst distance."""
    limit = eig(A_limit, tol).values
    out = []
    for A in A_seq:
        if np.shape(A) != np.shape(A_limit):
            raise ValueError("all matrices must have the same dimension")
        out.append(pair_values(eig(A, tol).values, limit))
    return out
