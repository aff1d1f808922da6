"""
Exception hierarchy for the scattering solver.

Each error carries a ``details`` dict that the command-line front end writes
into its JSON error body, and an ``exit_code`` used as the process status.
"""

from typing import Any, Dict, Optional


class ScatteringError(Exception):
    """Base class for every error raised by the solver."""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': self.message,
            'details': self.details,
        }


# Instance errors (exit 1)

class InstanceError(ScatteringError):
    exit_code = 1


class MalformedInput(InstanceError):
    pass


class RankDeficient(InstanceError):
    pass


class NotEssential(InstanceError):
    pass


class GroundSetTooLarge(InstanceError):
    pass


class BadM(InstanceError):
    pass


class OnArrangement(InstanceError):
    pass


class InconsistentPoint(InstanceError):
    pass


class DegenerateScale(InstanceError):
    pass


# Numerical failures (exit 2)

class NumericalError(ScatteringError):
    exit_code = 2


class StartDegenerate(NumericalError):
    pass


class SingularSelection(NumericalError):
    pass


class DegreeCollapse(NumericalError):
    pass


class MatrixTooLarge(NumericalError):
    pass


class GenericityFailure(NumericalError):
    pass


class SubsystemViolation(NumericalError):
    pass


class InternalInconsistency(NumericalError):
    pass


class RegularityContradiction(NumericalError):
    pass


# Count mismatches (exit 3)

class CountError(ScatteringError):
    exit_code = 3


class CountMismatch(CountError):
    pass


class RealityViolation(CountError):
    pass


class ChamberViolation(CountError):
    pass


class CensusMismatch(CountError):
    pass


class UnmatchedCluster(CountError):
    pass
