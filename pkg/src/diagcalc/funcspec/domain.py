"""Domains of scalar functions: open disks, real intervals, finite sets, the plane."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class WholePlane:
    def contains(self, z, tol=0.0):
        return True

    def distance(self, z):
        return 0.0

    def is_cluster_point(self, z):
        return True

    def sample(self, n=100):
        # sunflower spiral inside |z| <= 2
        j = np.arange(1, n + 1)
        r = 2.0 * np.sqrt(j / n)
        return r * np.exp(2j * np.pi * j * 0.6180339887498949)

    def describe(self):
        return "plane"


@dataclass(frozen=True)
class OpenDisk:
    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("disk radius must be positive and finite")

    def distance(self, z):
        return max(0.0, abs(z - self.center) - self.radius)

    def contains(self, z, tol=0.0):
        d = abs(z - self.center)
        return d < self.radius or (tol > 0 and d <= self.radius + tol)

    def is_cluster_point(self, z):
        return abs(z - self.center) <= self.radius

    def sample(self, n=100):
        j = np.arange(1, n + 1)
        r = 0.99 * self.radius * np.sqrt(j / n)
        return self.center + r * np.exp(2j * np.pi * j * 0.6180339887498949)

    def describe(self):
        c = complex(self.center)
        return f"disk:{c.real!r}:{c.imag!r}:{self.radius!r}"


@dataclass(frozen=True)
class RealInterval:
    a: float
    b: float
    closed_left: bool = True
    closed_right: bool = True

    def __post_init__(self):
        if not (self.a < self.b):
            raise DomainError(f"degenerate interval [{self.a}, {self.b}]")

    def distance(self, z):
        z = complex(z)
        x = min(max(z.real, self.a), self.b)
        return math.hypot(z.real - x, z.imag)

    def contains(self, z, tol=0.0):
        z = complex(z)
        if tol > 0:
            return self.distance(z) <= tol
        if z.imag != 0:
            return False
        x = z.real
        left = x >= self.a if self.closed_left else x > self.a
        right = x <= self.b if self.closed_right else x < self.b
        return left and right

    def is_cluster_point(self, z):
        z = complex(z)
        return z.imag == 0 and self.a <= z.real <= self.b

    def sample(self, n=100):
        t = (np.arange(n) + 0.5) / n
        return (self.a + (self.b - self.a) * t).astype(np.complex128)

    def describe(self):
        ends = ("c" if self.closed_left else "o") + ("c" if self.closed_right else "o")
        return f"interval:{self.a!r}:{self.b!r}:{ends}"


@dataclass(frozen=True)
class FiniteSet:
    """A finite set of points, optionally with exact rational coordinates.

    Exact coordinates let differences of nearby points be computed without
    the cancellation that plain floating-point subtraction suffers.
    """

    points: Tuple[complex, ...]
    exact: Optional[Tuple[Tuple[Fraction, Fraction], ...]] = None

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise DomainError("finite set points must be pairwise distinct")
        if self.exact is not None and len(self.exact) != len(self.points):
            raise DomainError("exact coordinates must align with points")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})
        object.__setattr__(self, "_array", np.array(self.points, dtype=np.complex128))

    def distance(self, z):
        return float(np.min(np.abs(self._array - z))) if self.points else math.inf

    def contains(self, z, tol=0.0):
        if tol > 0:
            return self.distance(z) <= tol
        return complex(z) in self._index

    def is_cluster_point(self, z):
        return False

    def nearest(self, z):
        i = int(np.argmin(np.abs(self._array - z)))
        return self.points[i]

    def exact_point(self, z):
        if self.exact is None:
            return None
        i = self._index.get(complex(z))
        return None if i is None else self.exact[i]

    def sample(self, n=100):
        return self._array[:n]

    def describe(self):
        return f"finite:{len(self.points)}"


Domain = (WholePlane, OpenDisk, RealInterval, FiniteSet)


def parse_domain(text: str):
    """Parse ``plane``, ``disk:RE:IM:R`` or ``interval:A:B[:cc|co|oc|oo]``."""
    parts = text.strip().split(":")
    kind = parts[0].lower()
    try:
        if kind == "plane" and len(parts) == 1:
            return WholePlane()
        if kind == "disk" and len(parts) == 4:
            return OpenDisk(complex(float(parts[1]), float(parts[2])), float(parts[3]))
        if kind == "interval" and len(parts) in (3, 4):
            ends = parts[3] if len(parts) == 4 else "cc"
            if len(ends) != 2 or set(ends) - {"c", "o"}:
                raise ValueError(ends)
            return RealInterval(float(parts[1]), float(parts[2]), ends[0] == "c", ends[1] == "c")
    except ValueError as exc:
        raise DomainError(f"cannot parse domain {text!r}") from exc
    raise DomainError(f"cannot parse domain {text!r}")
