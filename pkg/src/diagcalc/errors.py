"""Exception hierarchy.

Every error carries a ``token`` that the CLI prints verbatim, so scripts can
grep for the failure case without parsing prose.
"""


class CalcError(Exception):
    """Base class for all domain and numerical errors raised by diagcalc."""

    token = "CalcError"

    def __str__(self):
        msg = super().__str__()
        return f"{self.token}: {msg}" if msg else self.token


class NoConvergence(CalcError):
    token = "NoConvergence"


class ExpressionSyntaxError(CalcError):
    token = "SyntaxError"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class FormatError(CalcError):
    token = "FormatError"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(CalcError):
    token = "DomainError"


class UndefinedValue(CalcError):
    token = "UndefinedValue"


class NotDifferentiable(CalcError):
    token = "NotDifferentiable"


class MultipleRootOutsideClusterSet(NotDifferentiable):
    """A repeated root of the minimal polynomial sits at an isolated point of the domain."""

    token = "MultipleRootOutsideClusterSet"


class RangeError(CalcError):
    token = "RangeError"


class DegenerateNodes(CalcError):
    token = "DegenerateNodes"


class AmbiguousClustering(CalcError):
    token = "AmbiguousClustering"


class NotDiagonalizable(CalcError):
    token = "NotDiagonalizable"


class SpectrumOutsideDomain(CalcError):
    token = "SpectrumOutsideDomain"

    def __init__(self, eigenvalue, message=None):
        self.eigenvalue = eigenvalue
        super().__init__(message or f"eigenvalue {eigenvalue!r} lies outside the domain")


class IllConditioned(CalcError):
    token = "IllConditioned"


class DefectiveSpectrum(CalcError):
    token = "DefectiveSpectrum"


class InZk(CalcError):
    token = "InZk"


class DomainTooSparse(CalcError):
    token = "DomainTooSparse"


# Errors that signal bad user input rather than a mathematical failure.
USAGE_ERRORS = (ExpressionSyntaxError, FormatError)
