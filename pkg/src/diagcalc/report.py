"""Tabular sweep records serialized as CSV."""
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

REAL, COMPLEX, INT, TEXT = "real", "complex", "int", "text"


def fmt_real(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def fmt_complex(z) -> str:
    z = complex(z)
    return f"{fmt_real(z.real)}{'+' if math.copysign(1, z.imag) > 0 else '-'}{fmt_real(abs(z.imag))}i"


def fmt_param(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_real(v)
    if isinstance(v, complex):
        return fmt_complex(v)
    if isinstance(v, (list, tuple)):
        return ";".join(fmt_param(x) for x in v)
    return str(v).replace(" ", "_")


@dataclass
class ProbeReport:
    """One probe sweep: ordered parameters, a fixed column schema and rows."""

    probe_name: str
    parameters: List[Tuple[str, object]]
    columns: List[Tuple[str, str]]
    rows: List[Sequence] = field(default_factory=list)
    verdict: Optional[str] = None

    def add_row(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, schema has {len(self.columns)}")
        self.rows.append(tuple(values))

    def column(self, name):
        i = [c for c, _ in self.columns].index(name)
        return [row[i] for row in self.rows]

    def header(self) -> List[str]:
        out = []
        for name, kind in self.columns:
            out.extend([f"{name}_re", f"{name}_im"] if kind == COMPLEX else [name])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        params = " ".join(f"{k}={fmt_param(v)}" for k, v in self.parameters)
        buf.write(f"# probe={self.probe_name}" + (f" {params}" if params else "") + "\n")
        buf.write(",".join(self.header()) + "\n")
        for row in self.rows:
            cells = []
            for (_, kind), v in zip(self.columns, row):
                if kind == COMPLEX:
                    z = complex(v)
                    cells.extend([fmt_real(z.real), fmt_real(z.imag)])
                elif kind == REAL:
                    cells.append(fmt_real(v))
                else:
                    cells.append(str(v))
            buf.write(",".join(cells) + "\n")
        if self.verdict is not None:
            buf.write(f"# verdict={self.verdict}\n")
        return buf.getvalue()
