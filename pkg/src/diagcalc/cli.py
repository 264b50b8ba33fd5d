"""Command-line front end.

Exit codes: 0 on success, 1 on a mathematical or domain failure, 2 on a usage
or input-format problem. Failures print ``error: <Token>: <message>`` to stderr.
"""
import argparse
import io
import math
import sys
from typing import List, Optional, TextIO

import numpy as np

from . import funcspec as fs
from .divdiff import dd_table
from .errors import USAGE_ERRORS, CalcError, DomainError, FormatError
from .funcalc import analyze_spectrum, calc
from . import probes, regclass
from .funcspec.expr import Var, walk
from .numkit import DEFAULT_TOL, MAX_DIM, ToleranceConfig
from .report import COMPLEX, INT, ProbeReport, fmt_complex

MAX_SEED = 2**64 - 1


class UsageError(Exception):
    token = "UsageError"

    def __str__(self):
        return f"{self.token}: {super().__str__()}"


# ---------------------------------------------------------------------------
# Matrix files
# ---------------------------------------------------------------------------

def parse_matrix(text: str) -> np.ndarray:
    """Line 1 is k; then k rows of 2k numbers alternating real and imaginary parts."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, parts) for n, parts in lines if parts]
    if not lines:
        raise FormatError("empty matrix file", 1)
    n0, head = lines[0]
    if len(head) != 1:
        raise FormatError("first line must hold the dimension only", n0)
    try:
        k = int(head[0])
    except ValueError:
        raise FormatError(f"bad dimension {head[0]!r}", n0) from None
    if not 1 <= k <= MAX_DIM:
        raise FormatError(f"dimension must be in [1, {MAX_DIM}]", n0)
    rows = lines[1:]
    if len(rows) != k:
        line = rows[k][0] if len(rows) > k else (rows[-1][0] + 1 if rows else n0 + 1)
        raise FormatError(f"expected {k} rows, found {len(rows)}", line)
    M = np.empty((k, k), dtype=np.complex128)
    for r, (n, parts) in enumerate(rows):
        if len(parts) != 2 * k:
            raise FormatError(f"expected {2 * k} numbers, found {len(parts)}", n)
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise FormatError("non-numeric entry", n) from None
        if not all(math.isfinite(v) for v in vals):
            raise FormatError("non-finite entry", n)
        # assign parts separately so signed zeros survive
        M.real[r] = vals[0::2]
        M.imag[r] = vals[1::2]
    return M


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def format_matrix(M) -> str:
    M = np.asarray(M, dtype=np.complex128)
    out = [str(M.shape[0])]
    for row in M:
        out.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(out) + "\n"


def write_matrix(M, sink: TextIO):
    sink.write(format_matrix(M))


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def parse_constant(text: str) -> complex:
    """A constant expression such as ``1/3 + 2*i`` or ``log(2)``."""
    node = fs.parse(text)
    if any(isinstance(n, Var) for n in walk(node)):
        raise UsageError(f"constant expected, got {text!r}")
    return fs.evaluate(node, 0j)


def parse_list(text: str) -> List[complex]:
    items = [t for t in text.split(";") if t.strip()]
    if not items:
        raise UsageError("empty list")
    return [parse_constant(t) for t in items]


def parse_real_list(text: str) -> List[float]:
    out = []
    for z in parse_list(text):
        if z.imag != 0:
            raise UsageError(f"real value expected, got {fmt_complex(z)}")
        out.append(z.real)
    return out


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _function(args) -> fs.FunctionSpec:
    if getattr(args, "tcdis", None) is not None:
        return fs.tcdis_domain(args.tcdis)
    if getattr(args, "table", None):
        return fs.load_table(args.table)
    if getattr(args, "func", None):
        try:
            domain = fs.parse_domain(args.domain) if args.domain else None
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        return fs.FunctionSpec.from_expression(args.func, domain)
    raise UsageError("one of --func, --table or --tcdis is required")


def _tolerance(args) -> ToleranceConfig:
    d = DEFAULT_TOL
    try:
        return ToleranceConfig(
            args.cluster_tol if args.cluster_tol is not None else d.cluster_tol,
            args.zero_tol if args.zero_tol is not None else d.zero_tol,
            args.cond_max if args.cond_max is not None else d.cond_max,
            args.rel_tol if args.rel_tol is not None else d.rel_tol,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_compute(args, out, err):
    f = _function(args)
    M = read_matrix(args.matrix)
    res = calc(f, M, _tolerance(args), args.mode)
    for w in res.warnings:
        err.write(f"warning: {w}\n")
    write_matrix(res.value, out)


def cmd_spectrum(args, out, err):
    spec = analyze_spectrum(read_matrix(args.matrix), _tolerance(args))
    flag = lambda b: "true" if b else "false"  # noqa: E731
    out.write(f"dim={spec.dim} diagonalizable={flag(spec.diagonalizable)} in_Z_k={flag(spec.in_Z_k)}\n")
    for c in spec.clusters:
        out.write(f"lambda={fmt_complex(c.value)} alg_mult={c.alg_mult} min_poly_exp={c.min_poly_exp}\n")


def cmd_ddtable(args, out, err):
    f = _function(args)
    nodes = parse_list(args.nodes)
    table = dd_table(f, nodes, _tolerance(args))
    for w in table.warnings:
        err.write(f"warning: {w}\n")
    rep = ProbeReport(
        "ddtable",
        [("f", f.label), ("nodes", tuple(table.nodes))],
        [("i", INT), ("j", INT), ("value", COMPLEX)],
    )
    for j, col in enumerate(table.columns):
        for i, v in enumerate(col):
            rep.add_row(i, j, v)
    out.write(rep.to_csv())


def cmd_classify(args, out, err):
    f = _function(args)
    cfg = regclass.RegularityConfig(seed=args.seed)
    center = parse_constant(args.center)
    if args.cls == "tc":
        pts = parse_list(args.probes) if args.probes else [center + 10.0**-m for m in range(1, 6)]
        verdict = regclass.taylor_remainder(f, args.k, center, pts, cfg)
    else:
        scales = parse_real_list(args.scales) if args.scales else regclass.default_scales(f, center, args.k)
        est = regclass.estimate_ddb if args.cls == "ddb" else regclass.estimate_ddc
        verdict = est(f, args.k, center, scales, cfg)
    params = [("f", f.label), ("k", args.k), ("center", center), ("seed", args.seed)]
    out.write(verdict.to_report(params).to_csv())


def cmd_probe(args, out, err):
    tol = _tolerance(args)
    which = args.probe
    if which == "tcdis":
        f = fs.load_table(args.table) if args.table else None
        rep = probes.probe_tcdis(args.n, args.eps, f, tol, args.mode)
    elif which == "opitz":
        eps = parse_real_list(args.eps) if args.eps else probes.DEFAULT_EPS
        rep = probes.probe_opitz(_function(args), parse_list(args.nodes), eps, tol, args.mode)
    elif which == "uniform3":
        x, y, z = (parse_constant(t) for t in (args.x, args.y, args.z))
        rep = probes.probe_uniform3(_function(args), x, y, z, parse_real_list(args.w), args.delta, args.k, tol, args.mode)
    elif which == "continuity":
        X0 = read_matrix(args.matrix)
        D = read_matrix(args.direction)
        hs = parse_real_list(args.h) if args.h else probes.DEFAULT_H
        rep = probes.probe_continuity(_function(args), X0, D, hs, tol, args.mode)
    else:
        ks = [int(v) for v in parse_real_list(args.k_list)] if args.k_list else range(2, 13)
        rep = probes.probe_dimension_sweep(
            _function(args), parse_constant(args.lam), args.eps, ks, args.samples, args.seed, tol, args.mode
        )
    out.write(rep.to_csv())


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_function_args(p, tcdis=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--func", help="expression in z, e.g. 'exp(z)'")
    g.add_argument("--table", help="sample table file: lines 're im f_re f_im'")
    if tcdis:
        g.add_argument("--tcdis", type=int, metavar="N", help="built-in counterexample table of size N")
    p.add_argument("--domain", help="plane | disk:RE:IM:R | interval:A:B[:cc|co|oc|oo]")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cluster-tol", type=float)
    common.add_argument("--zero-tol", type=float)
    common.add_argument("--cond-max", type=float)
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    parser = _Parser(prog="diagcalc", description="Matrix functional calculus via divided differences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", parents=[common], help="print f[X] as a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--mode", choices=("auto", "diag", "newton", "hermite"), default="auto")
    _add_function_args(p)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalue clusters and Jordan data")
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("ddtable", parents=[common], help="divided-difference table as CSV")
    p.add_argument("--nodes", required=True, help="';'-separated constants")
    _add_function_args(p)

    p = sub.add_parser("classify", parents=[common], help="sampled regularity verdict")
    p.add_argument("--class", dest="cls", choices=("ddb", "ddc", "tc"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--center", default="0")
    p.add_argument("--scales", help="';'-separated decreasing scales")
    p.add_argument("--probes", help="';'-separated probe points for tc")
    _add_function_args(p)

    p = sub.add_parser("probe", help="run a probe sweep and print CSV")
    psub = p.add_subparsers(dest="probe", required=True, parser_class=_Parser)
    modes = ("auto", "diag", "newton", "hermite")

    q = psub.add_parser("tcdis", parents=[common])
    q.add_argument("--n", type=int, default=20)
    q.add_argument("--eps", type=float, default=1.0)
    q.add_argument("--table", help="replacement values on the same points")
    q.add_argument("--mode", choices=modes, default="newton")

    q = psub.add_parser("opitz", parents=[common])
    q.add_argument("--nodes", required=True)
    q.add_argument("--eps", help="';'-separated list")
    q.add_argument("--mode", choices=modes, default="newton")
    _add_function_args(q)

    q = psub.add_parser("uniform3", parents=[common])
    for name in ("x", "y", "z"):
        q.add_argument(f"--{name}", required=True)
    q.add_argument("--w", default="1;10;100")
    q.add_argument("--delta", type=float, default=1.0)
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--mode", choices=modes, default="newton")
    _add_function_args(q)

    q = psub.add_parser("continuity", parents=[common])
    q.add_argument("--matrix", required=True)
    q.add_argument("--direction", required=True)
    q.add_argument("--h", help="';'-separated step sizes")
    q.add_argument("--mode", choices=modes, default="auto")
    _add_function_args(q)

    q = psub.add_parser("dimension", parents=[common])
    q.add_argument("--lambda", dest="lam", default="0")
    q.add_argument("--eps", type=float, default=0.5)
    q.add_argument("--k-list", help="';'-separated dimensions")
    q.add_argument("--samples", type=int, default=8)
    q.add_argument("--mode", choices=modes, default="newton")
    _add_function_args(q)
    return parser


COMMANDS = {
    "compute": cmd_compute,
    "spectrum": cmd_spectrum,
    "ddtable": cmd_ddtable,
    "classify": cmd_classify,
    "probe": cmd_probe,
}


def run(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.output:
            buf = io.StringIO()
            COMMANDS[args.command](args, buf, err)
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        else:
            COMMANDS[args.command](args, out, err)
    except (UsageError, OSError, ValueError) + USAGE_ERRORS as exc:
        if isinstance(exc, (UsageError,) + USAGE_ERRORS):
            msg = str(exc)
        elif isinstance(exc, OSError):
            msg = f"IOError: {exc}"
        else:
            msg = f"UsageError: {exc}"
        err.write(f"error: {msg}\n")
        return 2
    except CalcError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # never surface a traceback
        err.write(f"error: InternalError: {type(exc).__name__}: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
