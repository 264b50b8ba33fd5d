"""Constructive experiments around the functional calculus, each producing a ProbeReport."""
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .divdiff import corner_of, dd_value, opitz_matrix
from .errors import DomainError, DomainTooSparse, RangeError, SpectrumOutsideDomain
from .funcalc import calc
from .funcspec import FiniteSet, FunctionSpec, RealInterval
from .funcspec.function import TCDIS_MAX_N, tcdis_domain
from .numkit import DEFAULT_TOL, ToleranceConfig, as_matrix, op_norm
from .report import COMPLEX, INT, REAL, ProbeReport

DEFAULT_H = tuple(10.0**-m for m in range(1, 9))
DEFAULT_EPS = (0.01, 0.1, 1.0, 10.0)
MAX_SWEEP_DIM = 32


def probe_opitz(f: FunctionSpec, nodes, eps_list=DEFAULT_EPS, tol: ToleranceConfig = DEFAULT_TOL,
                mode: str = "newton") -> ProbeReport:
    """Corner of f[A] for the bidiagonal A with ``nodes`` on the diagonal and eps below it.

    The prediction is Delta(nodes) f * eps^(k-1).
    """
    zs = [complex(z) for z in nodes]
    k = len(zs)
    delta = dd_value(f, zs, tol)
    rep = ProbeReport(
        "opitz",
        [("f", f.label), ("k", k), ("nodes", tuple(zs)), ("mode", mode)],
        [("eps", REAL), ("corner", COMPLEX), ("predicted", COMPLEX), ("abs_error", REAL), ("rel_error", REAL)],
    )
    for eps in sorted(float(e) for e in eps_list):
        A = opitz_matrix(zs, eps)
        c = corner_of(calc(f, A, tol, mode).value)
        p = delta * eps ** (k - 1)
        err = abs(c - p)
        rep.add_row(eps, c, p, err, err / abs(p) if p != 0 else err)
    return rep


def _tcdis_tol(N, base: ToleranceConfig):
    # the closest eigenvalue pair is 3^-N apart, so clustering must resolve it
    gap = 3.0**-N
    cluster = min(base.cluster_tol, gap / 100)
    zero = min(base.zero_tol, cluster / 10)
    return ToleranceConfig(cluster, zero, base.cond_max, base.rel_tol)


def probe_tcdis(N: int, eps: float = 1.0, f: Optional[FunctionSpec] = None,
                tol: ToleranceConfig = DEFAULT_TOL, mode: str = "newton") -> ProbeReport:
    """Corners of f[A_n] for A_n = opitz((1/n + 3^-n, 1/n), eps), n = 2..N.

    ``dist_scalar`` is ||A_n - (1/n) I|| and ``dist_limit`` is the distance to
    the nilpotent limit eps*E21 of the sequence. A different table ``f`` on the
    same points may be supplied.
    """
    if not isinstance(N, int) or N < 2 or N > TCDIS_MAX_N:
        raise RangeError(f"N must be an integer in [2, {TCDIS_MAX_N}], got {N!r}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    g = f if f is not None else tcdis_domain(N)
    t = _tcdis_tol(N, tol)
    limit = np.array([[0, 0], [eps, 0]], dtype=np.complex128)
    rep = ProbeReport(
        "tcdis",
        [("N", N), ("eps", float(eps)), ("f", g.label), ("mode", mode)],
        [("n", INT), ("corner", REAL), ("predicted", REAL), ("growth_ratio", REAL),
         ("dist_scalar", REAL), ("dist_limit", REAL)],
    )
    prev = None
    for n in range(2, N + 1):
        hi, lo = complex(1 / n + 3.0**-n), complex(1 / n)
        hi = g.domain.nearest(hi) if isinstance(g.domain, FiniteSet) else hi
        A = opitz_matrix((hi, lo), eps)
        corner = corner_of(calc(g, A, t, mode).value).real
        ratio = corner / prev if prev else math.nan
        rep.add_row(n, corner, 1.5**n * eps, ratio, op_norm(A - lo * np.eye(2)), op_norm(A - limit))
        prev = corner
    corners = np.abs(rep.column("corner"))
    dist = rep.column("dist_limit")
    growing = len(corners) > 1 and all(b > a for a, b in zip(corners, corners[1:]))
    converging = dist[-1] < dist[0] and all(b <= a for a, b in zip(dist, dist[1:]))
    if growing and converging:
        rep.verdict = "discontinuity witnessed"
    elif not growing:
        rep.verdict = "no growth"
    else:
        rep.verdict = "inconclusive"
    return rep


def uniform3_matrix(x, y, z, w, k: int = 3) -> np.ndarray:
    """diag(x, y, z, ..., z) with w at positions (2,1) and (3,2)."""
    if k < 3:
        raise ValueError("the construction needs k >= 3")
    A = np.diag(np.array([x, y] + [z] * (k - 2), dtype=np.complex128))
    A[1, 0] = w
    A[2, 1] = w
    return A


def probe_uniform3(f: FunctionSpec, x, y, z, w_list, delta: float, k: int = 3,
                   tol: ToleranceConfig = DEFAULT_TOL, mode: str = "newton") -> ProbeReport:
    """|b(w+delta) - b(w)| where b(w) is entry (3,1) of f[A(w)], against |Delta| |2 w delta + delta^2|."""
    x, y, z = complex(x), complex(y), complex(z)
    if len({x, y, z}) != 3:
        raise ValueError("x, y, z must be distinct")
    d3 = dd_value(f, (x, y, z), tol)
    rep = ProbeReport(
        "uniform3",
        [("f", f.label), ("x", x), ("y", y), ("z", z), ("delta", float(delta)), ("k", k), ("mode", mode)],
        [("w", REAL), ("b", COMPLEX), ("difference", REAL), ("predicted", REAL)],
    )

    def b(w):
        return calc(f, uniform3_matrix(x, y, z, w, k), tol, mode).value[2, 0]

    for w in sorted(float(v) for v in w_list):
        bw = b(w)
        diff = abs(b(w + delta) - bw)
        rep.add_row(w, bw, diff, abs(d3) * abs(2 * w * delta + delta * delta))
    diffs = rep.column("difference")
    scale = 1 + max(abs(x), abs(y), abs(z)) + max(abs(w) for w in rep.column("w")) + abs(delta)
    if abs(d3) <= 1e-9 * scale:
        rep.verdict = "affine-consistent"
    elif len(diffs) > 1 and diffs[-1] >= 10 * diffs[0]:
        rep.verdict = "uniform continuity violated"
    else:
        rep.verdict = "inconclusive"
    return rep


def probe_continuity(f: FunctionSpec, X0, direction, h_list=DEFAULT_H, tol: ToleranceConfig = DEFAULT_TOL,
                     mode: str = "auto", path: Optional[Callable[[float], np.ndarray]] = None) -> ProbeReport:
    """||f[X(h)] - f[X0]|| along X(h) = X0 + h*direction (or a supplied path) as h shrinks.

    Points of the path whose spectrum leaves the domain are skipped and noted.
    """
    X0 = as_matrix(X0)
    D = as_matrix(direction) if path is None else None
    if D is not None and D.shape != X0.shape:
        raise ValueError("direction must have the shape of X0")
    F0 = calc(f, X0, tol, mode).value
    scale = 1 + op_norm(F0)
    rep = ProbeReport(
        "continuity",
        [("f", f.label), ("k", X0.shape[0]), ("mode", mode), ("path", "line" if path is None else "custom")],
        [("h", REAL), ("difference", REAL), ("ratio", REAL)],
    )
    skipped = []
    for h in sorted((float(v) for v in h_list), reverse=True):
        X = X0 + h * D if path is None else as_matrix(path(h))
        try:
            F = calc(f, X, tol, mode).value
        except (DomainError, SpectrumOutsideDomain):
            skipped.append(h)
            continue
        d = op_norm(F - F0)
        rep.add_row(h, d, d / h)
    if skipped:
        rep.parameters.append(("skipped", tuple(skipped)))
    diffs = rep.column("difference")
    if not diffs:
        rep.verdict = "inconclusive"
    elif diffs[-1] <= tol.rel_tol * scale or (len(diffs) > 1 and diffs[-1] <= 1e-3 * diffs[0]):
        rep.verdict = "convergent"
    else:
        rep.verdict = "non-convergent"
    return rep


def _family_nodes(f: FunctionSpec, lam, eps, k, samples, seed):
    """Deterministic node sets within eps of lam, kept well separated."""
    if isinstance(f.domain, FiniteSet):
        arr = f.domain._array
        near = arr[np.abs(arr - lam) <= eps]
        near = near[np.argsort(np.abs(near - lam), kind="stable")]
        if len(near) < k:
            raise DomainTooSparse(f"only {len(near)} domain points within {eps!r} of {lam!r}, need {k}")
        starts = range(0, min(samples, len(near) - k + 1))
        return [near[s:s + k] for s in starts]
    shifts = qmc.Halton(d=2, scramble=True, seed=seed).random(samples)
    out = []
    for u, v in shifts:
        rho = eps * (0.5 + 0.45 * v)
        if isinstance(f.domain, RealInterval):
            # shifted Chebyshev points on [lam - rho, lam + rho]
            t = np.cos((2 * np.arange(k) + 1 + u) * np.pi / (2 * k + 1))
            zs = lam + rho * t
        else:
            zs = lam + rho * np.exp(2j * np.pi * (u + np.arange(k)) / k)
        zs = np.array([z for z in zs if f.domain.contains(z)], dtype=np.complex128)
        if len(zs) == k:
            out.append(zs)
    if not out:
        raise DomainTooSparse(f"no node family of size {k} fits in the domain near {lam!r}")
    return out


def probe_dimension_sweep(f: FunctionSpec, lam, eps: float, k_list=range(2, 13), samples: int = 8,
                          seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL, mode: str = "newton") -> ProbeReport:
    """max ||f[X]|| over X = eps*A + Diag(nodes), A the unit subdiagonal, for growing k."""
    lam = complex(lam)
    ks = sorted(int(k) for k in k_list)
    if not ks or ks[0] < 1 or ks[-1] > MAX_SWEEP_DIM:
        raise RangeError(f"dimensions must lie in [1, {MAX_SWEEP_DIM}]")
    rep = ProbeReport(
        "dimension",
        [("f", f.label), ("lambda", lam), ("eps", float(eps)), ("samples", samples), ("seed", seed), ("mode", mode)],
        [("k", INT), ("max_norm", REAL), ("max_matrix_norm", REAL), ("members", INT)],
    )
    for k in ks:
        best, xnorm, count = 0.0, 0.0, 0
        for zs in _family_nodes(f, lam, eps, k, samples, seed):
            X = np.diag(zs).astype(np.complex128)
            X[np.arange(1, k), np.arange(k - 1)] += eps
            best = max(best, op_norm(calc(f, X, tol, mode).value))
            xnorm = max(xnorm, op_norm(X))
            count += 1
        rep.add_row(k, best, xnorm, count)
    norms = rep.column("max_norm")
    ref = norms[rep.column("k").index(2)] if 2 in ks else norms[0]
    if max(norms) <= 10 * ref:
        rep.verdict = "bounded (holomorphic-consistent)"
    else:
        rep.verdict = "growth (no holomorphic extension indicated)"
    return rep
