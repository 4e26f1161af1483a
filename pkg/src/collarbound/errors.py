"""Exception hierarchy."""

from __future__ import annotations


class CollarBoundError(Exception):
    """Base class for all errors raised by collarbound."""


class ParameterError(CollarBoundError, ValueError):
    """A parameter lies outside its documented range."""


class DepthOutOfRange(ParameterError):
    pass


class UnsupportedBase(CollarBoundError):
    pass


class UnsupportedOperation(CollarBoundError):
    """The space kind does not carry the structure the operation needs."""


class CurvatureAuditError(CollarBoundError):
    def __init__(self, message, audit=None):
        super().__init__(message)
        self.audit = audit


class PointOutsideSpace(CollarBoundError, ValueError):
    pass


class ProjectionDivergence(CollarBoundError):
    pass


class MultipleFootpoints(CollarBoundError):
    """Raised at medial-axis points; ``footpoints`` holds every converged minimizer."""

    def __init__(self, message, footpoints=()):
        super().__init__(message)
        self.footpoints = list(footpoints)


class RejectionStarvation(CollarBoundError):
    pass


class AtSoul(CollarBoundError):
    pass


class StepCollapse(CollarBoundError):
    pass


class NonMonotone(CollarBoundError):
    pass


class MeshFailure(CollarBoundError):
    pass


class PoolTooSmall(CollarBoundError):
    pass


class ChordSolverFailure(CollarBoundError):
    pass


class ResolutionFloor(CollarBoundError):
    pass


class DomainError(CollarBoundError, ValueError):
    pass


class ConfigError(CollarBoundError):
    pass


class StepError(CollarBoundError):
    pass


class MissingSeries(CollarBoundError):
    pass
