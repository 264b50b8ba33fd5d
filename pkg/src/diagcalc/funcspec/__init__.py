"""Scalar functions on subsets of the complex plane."""
from .domain import FiniteSet, OpenDisk, RealInterval, WholePlane, parse_domain
from .expr import derivative, evaluate, parse, to_text
from .function import (
    HOLOMORPHIC,
    NON_SMOOTH,
    REAL_SMOOTH,
    TABLE,
    FunctionSpec,
    SampleTable,
    format_table,
    load_table,
    parse_table,
    tcdis_domain,
)

__all__ = [
    "FiniteSet", "OpenDisk", "RealInterval", "WholePlane", "parse_domain",
    "derivative", "evaluate", "parse", "to_text",
    "HOLOMORPHIC", "NON_SMOOTH", "REAL_SMOOTH", "TABLE",
    "FunctionSpec", "SampleTable", "format_table", "load_table", "parse_table", "tcdis_domain",
]
