"""Sampled estimators for bounded and convergent divided differences and Taylor remainders.

The classes are defined by limits, so every verdict here comes from a finite
sweep over shrinking scales h with declared thresholds. At each scale the
sample is a shell h/2 <= |z - center| <= h: for continuous domains a seeded,
symmetric low-discrepancy pattern scaled by h, for finite sets the stored
points in that shell.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .divdiff import dd_batch, dd_table
from .errors import DomainTooSparse, NotDifferentiable
from .funcspec import FiniteSet, FunctionSpec, RealInterval
from .funcspec.function import HOLOMORPHIC, TABLE
from .interp import newton_form
from .numkit import DEFAULT_TOL
from .report import REAL, TEXT, ProbeReport, fmt_complex

EPS = np.finfo(float).eps
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class RegularityConfig:
    """Sampling and decision parameters.

    ``bounded_ratio``: DDB passes when the last statistic is at most this
    multiple of the first. ``growth_ratio``: DDB fails at or above it.
    ``contraction``: DDC needs the last spread at most this fraction of the
    first. ``stall``: DDC fails when the last spread stays above this fraction.
    """

    seed: int = 0
    max_tuples: int = 10_000
    max_pool: int = 64
    min_separation: float = 1e-6
    bounded_ratio: float = 10.0
    growth_ratio: float = 1e3
    contraction: float = 0.1
    stall: float = 0.5
    taylor_ratio: float = 0.1
    taylor_floor: float = 1e-12

    def __post_init__(self):
        if self.max_tuples < 1 or self.max_pool < 2:
            raise ValueError("max_tuples and max_pool must be positive")
        if not 0 < self.contraction < self.stall:
            raise ValueError("need 0 < contraction < stall")
        if not 1 <= self.bounded_ratio < self.growth_ratio:
            raise ValueError("need 1 <= bounded_ratio < growth_ratio")


DEFAULT_CONFIG = RegularityConfig()


@dataclass(frozen=True)
class Witness:
    nodes: Tuple[complex, ...]
    magnitude: float
    partner: Optional[Tuple[complex, ...]] = None


@dataclass(frozen=True)
class SweepPoint:
    h: float
    statistic: float
    noise: float
    n_tuples: int
    mean: complex = complex("nan")

    @property
    def resolved(self):
        return bool(self.statistic > self.noise)


@dataclass(frozen=True)
class RegularityVerdict:
    class_tested: str
    verdict: str
    witness: Optional[Witness]
    sweep: Tuple[SweepPoint, ...]
    limit: Optional[complex] = None
    notes: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("a failing verdict needs a witness")
        hs = [p.h for p in self.sweep]
        if any(a <= b for a, b in zip(hs, hs[1:])):
            raise ValueError("sweep must be sorted by decreasing h")

    def to_report(self, parameters=()) -> ProbeReport:
        params = [("class", self.class_tested)] + list(parameters)
        if self.witness is not None:
            params.append(("witness", tuple(self.witness.nodes)))
            params.append(("witness_magnitude", self.witness.magnitude))
        if self.limit is not None:
            params.append(("limit", self.limit))
        rep = ProbeReport(
            "classify",
            params,
            [("h", REAL), ("statistic", REAL), ("noise", REAL), ("tuples", TEXT), ("resolved", TEXT)],
            verdict=self.verdict,
        )
        for p in self.sweep:
            rep.add_row(p.h, p.statistic, p.noise, p.n_tuples, "yes" if p.resolved else "no")
        return rep


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def pool_size(k: int, cfg: RegularityConfig = DEFAULT_CONFIG) -> int:
    """Largest M <= max_pool whose (k+1)-subsets all fit in the tuple budget."""
    M = k + 1
    while M < cfg.max_pool and math.comb(M + 1, k + 1) <= cfg.max_tuples:
        M += 1
    return M


def _halton(n, d, seed):
    if n <= 0:
        return np.zeros((0, d))
    return qmc.Halton(d=d, scramble=True, seed=seed).random(n)


def unit_pattern(k: int, one_dimensional: bool, cfg: RegularityConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Scale-free sample in the annulus 1/2 <= |u| <= 1.

    On a line the pattern is mirror-symmetric with anchors at +-1/2 and +-1.
    In the plane it is a stack of staggered rings with a seeded rotation, so
    that averages over all subsets cancel low-order odd terms.
    """
    M = pool_size(k, cfg)
    if one_dimensional:
        half = max(1, M // 2)
        t = np.concatenate(([0.0, 1.0], _halton(half - 2, 1, cfg.seed)[:, 0]))[:half]
        r = np.sort(0.5 + 0.5 * t)
        return np.concatenate((r, -r)).astype(np.complex128)
    rings = max(1, min(4, M // 8))
    m = max(3, M // rings)
    theta0 = 2 * np.pi * _halton(1, 1, cfg.seed)[0, 0]
    radii = np.linspace(0.5, 1.0, rings) if rings > 1 else np.array([0.5])
    pts = []
    for j, r in enumerate(radii):
        ang = theta0 + j * np.pi / m + 2 * np.pi * np.arange(m) / m
        pts.append(r * np.exp(1j * ang))
    return np.concatenate(pts)


def _shell(f: FunctionSpec, center, h, k, cfg):
    """Pool points for scale h, nearest to center first."""
    if isinstance(f.domain, FiniteSet):
        arr = f.domain._array
        d = np.abs(arr - center)
        keep = (d >= h / 2) & (d <= h) & (arr != center)
        pts = arr[keep]
    else:
        u = unit_pattern(k, isinstance(f.domain, RealInterval), cfg)
        cand = center + h * u
        pts = np.array([z for z in cand if f.domain.contains(z)], dtype=np.complex128)
    order = np.argsort(np.abs(pts - center), kind="stable")
    return pts[order]


def _points_within(f, center, radius, k, cfg):
    if isinstance(f.domain, FiniteSet):
        arr = f.domain._array
        return int(np.sum(np.abs(arr - center) <= radius))
    return len(_shell(f, center, radius, k, cfg))


def _tuples(m, k, cfg):
    it = itertools.combinations(range(m), k + 1)
    return np.array(list(itertools.islice(it, cfg.max_tuples)), dtype=np.intp).reshape(-1, k + 1)


def _differences(f, pts):
    n = len(pts)
    if isinstance(f.domain, FiniteSet) and f.domain.exact is not None:
        D = np.empty((n, n), dtype=np.complex128)
        for a in range(n):
            for b in range(n):
                D[a, b] = f.difference(pts[a], pts[b]) if a != b else 0
        return D
    return pts[:, None] - pts[None, :]


def _noise(values, D, T):
    """Rounding bound for each tuple from the Lagrange form of the divided difference."""
    absD = np.abs(D)
    G = absD[T[:, :, None], T[:, None, :]]
    n = T.shape[1]
    G[:, np.arange(n), np.arange(n)] = 1.0
    with np.errstate(divide="ignore"):
        L = np.sum(1.0 / np.prod(G, axis=2), axis=1)
    fmax = np.max(np.abs(values[T]), axis=1)
    return 4 * n * EPS * fmax * L


@dataclass
class _Scale:
    h: float
    pts: np.ndarray
    tuples: np.ndarray
    dd: np.ndarray
    noise: np.ndarray


def _sample(f, k, center, scales, cfg):
    scales = [float(h) for h in scales]
    if not scales or any(h <= 0 for h in scales) or any(a <= b for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be positive and strictly decreasing")
    if k < 0:
        raise ValueError("k must be non-negative")
    center = complex(center)
    if _points_within(f, center, scales[0], k, cfg) < k + 1:
        raise DomainTooSparse(
            f"fewer than {k + 1} domain points within {scales[0]!r} of {center!r}"
        )
    out = []
    for h in scales:
        pts = _shell(f, center, h, k, cfg)
        if len(pts) < k + 1:
            out.append(_Scale(h, pts, np.zeros((0, k + 1), np.intp), np.zeros(0, complex), np.zeros(0)))
            continue
        T = _tuples(len(pts), k, cfg)
        D = _differences(f, pts)
        if not isinstance(f.domain, FiniteSet) and k > 0:
            A = np.abs(D)[T[:, :, None], T[:, None, :]]
            A[:, np.arange(k + 1), np.arange(k + 1)] = np.inf
            T = T[A.min(axis=(1, 2)) >= h * cfg.min_separation]
        values = np.array([f.value(z) for z in pts], dtype=np.complex128)
        dd = dd_batch(values, D, T) if k > 0 else values[T[:, 0]]
        noise = _noise(values, D, T) if k > 0 else 4 * EPS * np.abs(dd)
        out.append(_Scale(h, pts, T, dd, noise))
    return center, out


def _nan_point(s):
    return SweepPoint(s.h, math.nan, math.nan, 0)


def estimate_ddb(f: FunctionSpec, k: int, center, scales: Sequence[float],
                 config: RegularityConfig = DEFAULT_CONFIG) -> RegularityVerdict:
    """Track max |Delta(z_1..z_{k+1}) f| over each shell as h shrinks.

    Statistics below the rounding bound of their scale are treated as
    unresolved and cannot by themselves signal growth.
    """
    center, samples = _sample(f, k, center, scales, config)
    sweep, eff, argmax = [], [], []
    for s in samples:
        if len(s.dd) == 0:
            sweep.append(_nan_point(s))
            continue
        mag = np.abs(s.dd)
        i = int(np.argmax(mag))
        p = SweepPoint(s.h, float(mag[i]), float(np.max(s.noise)), len(s.dd))
        sweep.append(p)
        eff.append((p.statistic if p.resolved else 0.0, p, s, i))
    label = f"DDB({k})"
    notes = []
    if len(eff) < 2:
        return RegularityVerdict(label, INCONCLUSIVE, None, tuple(sweep), notes=("fewer than two populated scales",))
    first, last = eff[0], eff[-1]
    base = max(first[0], first[1].noise, np.finfo(float).tiny)
    growth = last[0] / base
    worst = max(eff, key=lambda e: e[0])
    if worst[0] == 0:
        notes.append("all statistics within rounding of zero")
    if growth <= config.bounded_ratio:
        verdict, witness = PASS, None
    elif growth >= config.growth_ratio * (1 - 1e-9):
        _, p, s, i = last
        witness = Witness(tuple(complex(s.pts[j]) for j in s.tuples[i]), p.statistic)
        verdict = FAIL
    else:
        verdict, witness = INCONCLUSIVE, None
    notes.append(f"growth ratio {growth:.6g}")
    return RegularityVerdict(label, verdict, witness, tuple(sweep), notes=tuple(notes))


def estimate_ddc(f: FunctionSpec, k: int, center, scales: Sequence[float],
                 config: RegularityConfig = DEFAULT_CONFIG) -> RegularityVerdict:
    """Track the spread of Delta values over each shell; convergence means the spread collapses.

    The limit estimate is the mean at the scale where the spread plus the
    rounding bound is smallest.
    """
    center, samples = _sample(f, k, center, scales, config)
    sweep, rows = [], []
    for s in samples:
        if len(s.dd) == 0:
            sweep.append(_nan_point(s))
            continue
        lo = np.array([s.dd.real.min(), s.dd.imag.min()])
        hi = np.array([s.dd.real.max(), s.dd.imag.max()])
        spread = float(np.hypot(*(hi - lo)))
        noise = 2 * float(np.max(s.noise))
        mean = complex(np.mean(s.dd))
        p = SweepPoint(s.h, spread, noise, len(s.dd), mean)
        sweep.append(p)
        rows.append((spread if p.resolved else 0.0, p, s))
    label = f"DDC({k})"
    if len(rows) < 2:
        return RegularityVerdict(label, INCONCLUSIVE, None, tuple(sweep), notes=("fewer than two populated scales",))
    best = min(rows, key=lambda r: r[1].statistic + r[1].noise)
    limit = best[1].mean
    first, last = rows[0], rows[-1]
    base = max(first[0], first[1].noise)
    # Cauchy check: successive means agree within the coarser scale's uncertainty
    cauchy = all(
        abs(b[1].mean - a[1].mean) <= a[1].statistic + a[1].noise + b[1].noise
        for a, b in zip(rows, rows[1:])
    )
    notes = []
    if last[0] <= config.contraction * base and cauchy:
        return RegularityVerdict(label, PASS, None, tuple(sweep), limit, (f"limit {fmt_complex(limit)}",))
    if last[0] > 0 and last[0] >= config.stall * base:
        s = last[2]
        i = int(np.argmax(np.abs(s.dd - s.dd.mean())))
        j = int(np.argmax(np.abs(s.dd - s.dd[i])))
        witness = Witness(
            tuple(complex(s.pts[a]) for a in s.tuples[i]),
            float(abs(s.dd[i] - s.dd[j])),
            tuple(complex(s.pts[a]) for a in s.tuples[j]),
        )
        return RegularityVerdict(label, FAIL, witness, tuple(sweep), None, ("spread does not contract",))
    if not cauchy:
        notes.append("means not Cauchy across scales")
    return RegularityVerdict(label, INCONCLUSIVE, None, tuple(sweep), limit, tuple(notes))


# ---------------------------------------------------------------------------
# Taylor remainder
# ---------------------------------------------------------------------------

def _stencil(f: FunctionSpec, a, k):
    """k domain points near a, each at least a quarter of its own distance to a from the others."""
    arr = f.domain._array
    d = np.abs(arr - a)
    chosen = []
    for idx in np.argsort(d, kind="stable"):
        z = complex(arr[idx])
        if z == a:
            continue
        if all(abs(z - w) >= 0.25 * abs(z - a) for w in chosen):
            chosen.append(z)
            if len(chosen) == k:
                return chosen
    raise DomainTooSparse(f"not enough well-separated domain points near {a!r} for order {k}")


def taylor_polynomial(f: FunctionSpec, k: int, a, derivatives: Optional[Sequence[complex]] = None):
    """Callable z -> sum_{j<=k} u_j (z-a)^j / j! and the interpolation nodes used.

    Without explicit ``derivatives``, expressions use their symbolic
    derivatives and tables use a Newton interpolant through a and a
    well-separated stencil of nearby stored points.
    """
    a = complex(a)
    if derivatives is not None:
        u = [complex(v) for v in derivatives]
        if len(u) != k + 1:
            raise ValueError(f"need {k + 1} derivative values, got {len(u)}")
        coeffs = [u[j] / math.factorial(j) for j in range(k + 1)]
        return (lambda z: sum(c * (z - a) ** j for j, c in enumerate(coeffs))), (a,)
    if f.differentiability == HOLOMORPHIC:
        u = [f.derivative_value(a, j) for j in range(k + 1)]
        return taylor_polynomial(f, k, a, u)
    if f.differentiability == TABLE:
        nodes = [a] + (_stencil(f, a, k) if k > 0 else [])
        nf = newton_form(dd_table(f, nodes, DEFAULT_TOL))
        return (lambda z: nf(z)), tuple(nodes)
    raise NotDifferentiable(f"{f.label} has no derivative data at {a!r}")


def taylor_remainder(f: FunctionSpec, k: int, a, probes: Sequence[complex],
                     config: RegularityConfig = DEFAULT_CONFIG,
                     derivatives: Optional[Sequence[complex]] = None) -> RegularityVerdict:
    """|tau_a(z)| = |f(z) - T_k(z)| / |z - a|^k at each probe, nearest probe last."""
    a = complex(a)
    if k < 0:
        raise ValueError("k must be non-negative")
    if not f.domain.contains(a):
        raise NotDifferentiable(f"{a!r} is not a domain point")
    T, used = taylor_polynomial(f, k, a, derivatives)
    # interpolation nodes have zero remainder by construction, so they are not probes
    probes = sorted({complex(z) for z in probes if complex(z) not in used}, key=lambda z: (-abs(z - a), z.real, z.imag))
    sweep = []
    for z in probes:
        tau = abs(f.eval(z) - T(z)) / abs(z - a) ** k
        sweep.append(SweepPoint(abs(z - a), float(tau), 0.0, 1))
    # equal distances would break the strict ordering of the sweep
    dedup = {}
    for p in sweep:
        dedup[p.h] = p if p.h not in dedup else max(dedup[p.h], p, key=lambda q: q.statistic)
    sweep = tuple(dedup[h] for h in sorted(dedup, reverse=True))
    label = f"TC({k})"
    if len(sweep) < 2:
        return RegularityVerdict(label, INCONCLUSIVE, None, sweep, notes=("fewer than two probes",))
    floor = config.taylor_floor * (1 + abs(f.eval(a)))
    first, last = sweep[0].statistic, sweep[-1].statistic
    if all(p.statistic <= floor for p in sweep) or last <= config.taylor_ratio * first or last <= floor:
        return RegularityVerdict(label, PASS, None, sweep)
    if last >= first:
        w = sweep[-1]
        zs = [z for z in probes if abs(z - a) == w.h]
        return RegularityVerdict(label, FAIL, Witness((zs[0],), w.statistic), sweep, notes=("remainder does not shrink",))
    return RegularityVerdict(label, INCONCLUSIVE, None, sweep)


def default_scales(f: FunctionSpec, center, k: int = 1) -> Tuple[float, ...]:
    """Decades 1e-1..1e-4 for continuous domains; halvings of the table radius for finite sets."""
    if not isinstance(f.domain, FiniteSet):
        return (1e-1, 1e-2, 1e-3, 1e-4)
    d = np.abs(f.domain._array - complex(center))
    d = d[d > 0]
    if len(d) == 0:
        return (1.0,)
    h = 2.0 ** math.ceil(math.log2(d.max()))
    out = []
    while h >= d.min() and len(out) < 60:
        out.append(h)
        h /= 2
    return tuple(out) or (float(d.max()),)
