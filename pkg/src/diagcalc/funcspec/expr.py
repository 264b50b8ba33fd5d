"""Expression mini-language over the variable ``z``.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' nonneg-integer)?
    base   := number | 'z' | 'i' | ident '(' expr ')' | '(' expr ')' | '-' base

Note that ``-z^2`` parses as ``(-z)^2`` because unary minus binds inside ``base``.
"""
import cmath
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from ..errors import (
    DomainError,
    ExpressionSyntaxError,
    NotDifferentiable,
    UndefinedValue,
)

FUNCTIONS = ("exp", "sin", "cos", "log", "sqrt", "conj", "re", "im", "abs")
NON_HOLOMORPHIC = frozenset({"conj", "re", "im", "abs"})


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("integer powers must be non-negative")


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


Node = Union[Const, Var, Imag, Neg, BinOp, Pow, Call]

Z = Var()
I = Imag()
ZERO = Const(0j)
ONE = Const(1 + 0j)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    # byte offset of each character index, plus one past the end
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", offsets[pos])
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), offsets[pos]))
        pos = m.end()
    tokens.append(("eof", "", offsets[len(text)]))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what="unexpected token"):
        kind, value, offset = tok
        if kind == "eof":
            raise ExpressionSyntaxError("unexpected end of input", offset)
        raise ExpressionSyntaxError(f"{what} {value!r}", offset)

    def expect(self, value):
        tok = self.advance()
        if tok[0] != "op" or tok[1] != value:
            self.fail(tok, f"expected {value!r}, got")
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "eof":
            self.fail(self.peek())
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            tok = self.advance()
            if tok[0] != "number" or not tok[1].isdigit():
                self.fail(tok, "exponent must be a non-negative integer, got")
            node = Pow(node, int(tok[1]))
        return node

    def base(self):
        tok = self.advance()
        kind, value, _ = tok
        if kind == "number":
            x = float(value)
            if not math.isfinite(x):
                self.fail(tok, "number out of range")
            return Const(complex(x))
        if kind == "ident":
            if value == "z":
                return Z
            if value == "i":
                return I
            if value not in FUNCTIONS:
                self.fail(tok, "unknown identifier")
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(value, arg)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and value == "-":
            return Neg(self.base())
        self.fail(tok)


def parse(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    Raises ExpressionSyntaxError carrying the 0-based byte offset of the first
    invalid token.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _fmt_real(x):
    return repr(float(x))


def _const_text(c: complex):
    if c.imag == 0 and math.copysign(1.0, c.real) > 0:
        return _fmt_real(c.real), 4
    if c.imag == 0:
        return f"(-{_fmt_real(-c.real)})", 4
    re_part = _fmt_real(abs(c.real))
    im_part = _fmt_real(abs(c.imag))
    re_sign = "-" if c.real < 0 else ""
    im_sign = "-" if c.imag < 0 else "+"
    return f"({re_sign}{re_part} {im_sign} {im_part}*i)", 4


def _to_text(node):
    """Return (text, precedence level): 1 sum, 2 product, 3 power, 4 base."""
    if isinstance(node, Const):
        return _const_text(node.value)
    if isinstance(node, Var):
        return "z", 4
    if isinstance(node, Imag):
        return "i", 4
    if isinstance(node, Call):
        return f"{node.name}({_to_text(node.arg)[0]})", 4
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, 4), 4
    if isinstance(node, Pow):
        return f"{_wrap(node.base, 4)}^{node.exponent}", 3
    if isinstance(node, BinOp):
        if node.op in "+-":
            return f"{_wrap(node.left, 1)} {node.op} {_wrap(node.right, 2)}", 1
        return f"{_wrap(node.left, 2)}{node.op}{_wrap(node.right, 3)}", 2
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node, level):
    text, own = _to_text(node)
    return text if own >= level else f"({text})"


def to_text(node: Node) -> str:
    """Render ``node`` in the grammar accepted by :func:`parse`."""
    return _to_text(node)[0]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _on_cut(w):
    # values exactly on the negative real axis take the limit from above
    return complex(w.real, 0.0) if w.imag == 0 else w


def _log(w):
    if w == 0:
        raise UndefinedValue("log(0)")
    return cmath.log(_on_cut(w))


def _sqrt(w):
    if w == 0:
        raise UndefinedValue("sqrt(0)")
    return cmath.sqrt(_on_cut(w))


_CALLS = {
    "exp": cmath.exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "log": _log,
    "sqrt": _sqrt,
    "conj": lambda w: w.conjugate(),
    "re": lambda w: complex(w.real, 0.0),
    "im": lambda w: complex(w.imag, 0.0),
    "abs": lambda w: complex(abs(w), 0.0),
}


def _div(a, b):
    if b == 0:
        raise DomainError("division by zero (pole of the expression)")
    return a / b


def _compile(node) -> Callable[[complex], complex]:
    if isinstance(node, Const):
        v = complex(node.value)
        return lambda z: v
    if isinstance(node, Var):
        return lambda z: z
    if isinstance(node, Imag):
        return lambda z: 1j
    if isinstance(node, Neg):
        f = _compile(node.arg)
        return lambda z: -f(z)
    if isinstance(node, Pow):
        f, n = _compile(node.base), node.exponent
        return lambda z: f(z) ** n if n else 1 + 0j
    if isinstance(node, Call):
        f, g = _compile(node.arg), _CALLS[node.name]
        return lambda z: g(f(z))
    if isinstance(node, BinOp):
        f, g = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda z: f(z) + g(z)
        if node.op == "-":
            return lambda z: f(z) - g(z)
        if node.op == "*":
            return lambda z: f(z) * g(z)
        return lambda z: _div(f(z), g(z))
    raise TypeError(f"not an expression node: {node!r}")


@lru_cache(maxsize=512)
def compile_expr(node: Node) -> Callable[[complex], complex]:
    """Compile ``node`` into a callable that raises on undefined or non-finite values."""
    raw = _compile(node)

    def evaluate(z):
        try:
            w = complex(raw(complex(z)))
        except OverflowError as exc:
            raise UndefinedValue(f"overflow evaluating at {z!r}") from exc
        except ZeroDivisionError as exc:
            raise DomainError(f"division by zero at {z!r}") from exc
        if not cmath.isfinite(w):
            raise UndefinedValue(f"non-finite value at {z!r}")
        return w

    return evaluate


def evaluate(node: Node, z) -> complex:
    return compile_expr(node)(z)


# ---------------------------------------------------------------------------
# Structure and symbolic differentiation
# ---------------------------------------------------------------------------

def walk(node):
    yield node
    if isinstance(node, (Neg, Call)):
        yield from walk(node.arg)
    elif isinstance(node, Pow):
        yield from walk(node.base)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)


def function_names(node) -> set:
    return {n.name for n in walk(node) if isinstance(n, Call)}


def is_holomorphic(node) -> bool:
    return not (function_names(node) & NON_HOLOMORPHIC)


def _is_const(node, value=None):
    return isinstance(node, Const) and (value is None or node.value == value)


def add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return BinOp("+", a, b)


def sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(b) and not _is_const(a):
        a, b = b, a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a) and isinstance(b, BinOp) and b.op == "*" and _is_const(b.left):
        return mul(Const(a.value * b.left.value), b.right)
    if _is_const(a, -1):
        return neg(b)
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    return BinOp("*", a, b)


def div(a, b):
    if _is_const(b, 1):
        return a
    if _is_const(a, 0):
        return ZERO
    if _is_const(a) and _is_const(b) and b.value != 0:
        return Const(a.value / b.value)
    if isinstance(a, Neg):
        return neg(div(a.arg, b))
    return BinOp("/", a, b)


def power(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a):
        return Const(a.value**n)
    if isinstance(a, Pow):
        return Pow(a.base, a.exponent * n)
    return Pow(a, n)


def _d(node):
    if isinstance(node, (Const, Imag)):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return neg(_d(node.arg))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du, dv = _d(u), _d(v)
        if node.op == "+":
            return add(du, dv)
        if node.op == "-":
            return sub(du, dv)
        if node.op == "*":
            return add(mul(du, v), mul(u, dv))
        if _is_const(dv, 0):
            return div(du, v)
        if isinstance(v, Pow):
            # d(u / w^n) = (u' w - n u w') / w^(n+1) keeps rational terms compact
            w, n = v.base, v.exponent
            num = sub(mul(du, w), mul(mul(Const(complex(n)), u), _d(w)))
            return div(num, power(w, n + 1))
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    if isinstance(node, Pow):
        n = node.exponent
        if n == 0:
            return ZERO
        return mul(mul(Const(complex(n)), power(node.base, n - 1)), _d(node.base))
    if isinstance(node, Call):
        u = node.arg
        du = _d(u)
        if node.name in NON_HOLOMORPHIC:
            raise NotDifferentiable(f"{node.name}() is not holomorphic")
        if node.name == "exp":
            outer = node
        elif node.name == "sin":
            outer = Call("cos", u)
        elif node.name == "cos":
            outer = neg(Call("sin", u))
        elif node.name == "log":
            return div(du, u)
        else:  # sqrt
            return div(du, mul(Const(2 + 0j), node))
        return mul(outer, du)
    raise TypeError(f"not an expression node: {node!r}")


@lru_cache(maxsize=1024)
def derivative(node: Node, order: int = 1) -> Node:
    """Symbolic derivative of the given order (holomorphic expressions only)."""
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    bad = function_names(node) & NON_HOLOMORPHIC
    if bad:
        raise NotDifferentiable(f"expression uses non-holomorphic {sorted(bad)}")
    prev = node if order == 1 else derivative(node, order - 1)
    return _d(prev)
