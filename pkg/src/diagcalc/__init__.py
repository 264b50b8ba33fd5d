"""Functional calculus for diagonalizable and quasi-diagonalizable complex matrices."""
from .errors import CalcError
from .numkit import DEFAULT_TOL, ToleranceConfig

__version__ = "0.1.0"
