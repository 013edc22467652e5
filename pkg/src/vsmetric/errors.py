"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: input faults (bad files,
bad expressions, bad evaluations) exit 2, inversion faults exit 3.
"""

from __future__ import annotations


class VsmetricError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(VsmetricError):
    """Operands of a vector operation have different dimensions."""


class ExprSyntaxError(VsmetricError):
    """Expression text failed to parse.  ``offset`` is 1-based."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvaluationFault(VsmetricError):
    """Map evaluation produced a non-finite value or divided by zero.

    ``coordinate`` is the index of the output coordinate being evaluated
    when the fault occurred, or None when not attributable.
    """

    def __init__(self, message: str, coordinate: int | None = None):
        if coordinate is not None:
            message = f"{message} (output coordinate {coordinate})"
        super().__init__(message)
        self.coordinate = coordinate


class InversionError(VsmetricError):
    """No acceptable preimage under K could be produced.

    ``witness`` carries the point whose image could not be inverted, i.e.
    a concrete violation of the range-containment hypothesis.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ProblemError(VsmetricError):
    """A problem definition is malformed or internally inconsistent."""
