"""Scalar functions on a domain: parsed expressions or finite sample tables."""
import math
from fractions import Fraction
from typing import Mapping, Optional, Union

from ..errors import DomainError, FormatError, NotDifferentiable, RangeError, SpectrumOutsideDomain
from . import expr as ex
from .domain import FiniteSet, WholePlane

HOLOMORPHIC = "holomorphic_expr"
REAL_SMOOTH = "real_smooth_expr"
NON_SMOOTH = "non_smooth"
TABLE = "table"


class SampleTable:
    """Finite map from points to values; keys match by exact float equality."""

    def __init__(self, values: Mapping[complex, complex]):
        self.values = {complex(k): complex(v) for k, v in values.items()}

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, SampleTable) and self.values == other.values

    def __hash__(self):
        return hash(tuple(sorted((k.real, k.imag) for k in self.values)))


class FunctionSpec:
    """A scalar function ``f: domain -> C``.

    ``body`` is either an expression tree over ``z`` or a :class:`SampleTable`.
    Instances are immutable; build them with :meth:`from_expression`,
    :meth:`from_table` or :func:`tcdis_domain`.
    """

    __slots__ = ("body", "domain", "label", "_eval")

    def __init__(self, body: Union[ex.Node, SampleTable], domain=None, label: Optional[str] = None):
        if domain is None:
            domain = WholePlane()
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "domain", domain)
        if isinstance(body, SampleTable):
            if not isinstance(domain, FiniteSet) or set(body.values) - set(domain.points):
                raise DomainError("table keys must lie in a finite_set domain")
            object.__setattr__(self, "_eval", None)
            object.__setattr__(self, "label", label or "table")
        else:
            object.__setattr__(self, "_eval", ex.compile_expr(body))
            object.__setattr__(self, "label", label or ex.to_text(body))

    def __setattr__(self, name, value):
        raise AttributeError("FunctionSpec is immutable")

    def __repr__(self):
        return f"FunctionSpec({self.label!r}, domain={self.domain.describe()})"

    # -- construction --------------------------------------------------------

    @classmethod
    def from_expression(cls, text_or_node, domain=None, check=True):
        node = ex.parse(text_or_node) if isinstance(text_or_node, str) else text_or_node
        label = text_or_node if isinstance(text_or_node, str) else None
        f = cls(node, domain, label)
        if check:
            f.check_evaluable()
        return f

    @classmethod
    def from_table(cls, values: Mapping, exact=None, label=None):
        """Build a table function; ``exact`` optionally maps keys to (Fraction, Fraction)."""
        table = SampleTable(values)
        keys = tuple(table.values)
        exact_coords = None
        if exact is not None:
            exact_coords = tuple(exact[k] for k in keys)
        return cls(table, FiniteSet(keys, exact_coords), label)

    def check_evaluable(self, n=100):
        """Evaluate at ``n`` deterministic domain points; raises on the first failure."""
        for z in self.domain.sample(n):
            try:
                self.value(complex(z))
            except Exception as exc:
                raise DomainError(f"{self.label} is not evaluable at {complex(z)!r}: {exc}") from exc

    # -- classification ------------------------------------------------------

    @property
    def is_table(self):
        return isinstance(self.body, SampleTable)

    @property
    def differentiability(self):
        if self.is_table:
            return TABLE
        names = ex.function_names(self.body)
        if "abs" in names:
            return NON_SMOOTH
        if names & ex.NON_HOLOMORPHIC:
            return REAL_SMOOTH
        return HOLOMORPHIC

    @property
    def max_derivative_order(self):
        return math.inf if self.differentiability == HOLOMORPHIC else 0

    # -- evaluation ----------------------------------------------------------

    def value(self, z) -> complex:
        """f(z) without the domain membership check (tables still need an exact key)."""
        z = complex(z)
        if self._eval is None:
            try:
                return self.body.values[z]
            except KeyError:
                raise DomainError(f"{z!r} is not a key of the sample table") from None
        return self._eval(z)

    def eval(self, z) -> complex:
        z = complex(z)
        if not self.domain.contains(z):
            raise DomainError(f"{z!r} lies outside the domain {self.domain.describe()}")
        return self.value(z)

    __call__ = eval

    def derivative_value(self, z, order: int) -> complex:
        """f^(order)(z); order 0 is the plain value."""
        if order == 0:
            return self.value(z)
        if self.is_table:
            raise NotDifferentiable("sample tables carry no derivative data")
        return ex.evaluate(ex.derivative(self.body, order), complex(z))

    def difference(self, a, b) -> complex:
        """a - b, rounded once from exact coordinates when both are exact table keys."""
        if isinstance(self.domain, FiniteSet) and self.domain.exact is not None:
            ea, eb = self.domain.exact_point(a), self.domain.exact_point(b)
            if ea is not None and eb is not None:
                return complex(float(ea[0] - eb[0]), float(ea[1] - eb[1]))
        return complex(a) - complex(b)

    def snap(self, z, tol: float) -> complex:
        """Map an approximate point onto the domain or raise SpectrumOutsideDomain."""
        z = complex(z)
        if isinstance(self.domain, FiniteSet):
            key = self.domain.nearest(z)
            if abs(key - z) <= tol:
                return key
            raise SpectrumOutsideDomain(z)
        if self.domain.distance(z) <= tol:
            return z
        raise SpectrumOutsideDomain(z)


def _exact_decimal(text, lineno):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a decimal number: {text!r}", lineno) from None


def parse_table(text: str, label="table") -> FunctionSpec:
    """Parse the ``re im f_re f_im`` table format (``#`` starts a comment line)."""
    values, exact = {}, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 4:
            raise FormatError(f"expected 4 fields, got {len(fields)}", lineno)
        re_, im_ = (_exact_decimal(s, lineno) for s in fields[:2])
        fre, fim = (float(_exact_decimal(s, lineno)) for s in fields[2:])
        key = complex(float(re_), float(im_))
        if not all(math.isfinite(v) for v in (key.real, key.imag, fre, fim)):
            raise FormatError("non-finite number", lineno)
        if key in values:
            raise FormatError(f"duplicate key {key!r}", lineno)
        values[key] = complex(fre, fim)
        exact[key] = (re_, im_)
    if not values:
        raise FormatError("table has no points")
    return FunctionSpec.from_table(values, exact, label)


def load_table(path) -> FunctionSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read(), label=str(path))


def format_table(f: FunctionSpec) -> str:
    if not f.is_table:
        raise TypeError("not a table function")
    lines = ["# re im f_re f_im"]
    for k, v in f.body.values.items():
        lines.append(f"{k.real!r} {k.imag!r} {v.real!r} {v.imag!r}")
    return "\n".join(lines) + "\n"


TCDIS_MAX_N = 40


def tcdis_points(N: int):
    """Exact points and values of the compact counterexample domain, n = 2..N."""
    pts = [(Fraction(0), Fraction(0))]
    for n in range(2, N + 1):
        pts.append((Fraction(1, n), Fraction(0)))
        pts.append((Fraction(1, n) + Fraction(1, 3**n), Fraction(2) ** -n))
    return pts


def tcdis_domain(N: int) -> FunctionSpec:
    """f(0) = f(1/n) = 0 and f(1/n + 3^-n) = 2^-n on a truncated compact domain."""
    if not isinstance(N, int) or N < 2 or N > TCDIS_MAX_N:
        raise RangeError(f"N must be an integer in [2, {TCDIS_MAX_N}], got {N!r}")
    values, exact = {}, {}
    for x, fx in tcdis_points(N):
        key = complex(float(x), 0.0)
        if key in values:
            raise RangeError(f"points 1/n and 1/n + 3^-n coincide in double precision at N={N}")
        values[key] = complex(float(fx), 0.0)
        exact[key] = (x, Fraction(0))
    return FunctionSpec.from_table(values, exact, label=f"tcdis({N})")
