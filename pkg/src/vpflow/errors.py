"""Exception types shared across the package."""


class VpflowError(Exception):
    """Base class for all package errors."""


class EmptyRegion(VpflowError):
    """Region has no cells; signed distance undefined in one direction."""


class FullRegion(VpflowError):
    """Region covers the whole domain; signed distance undefined outside."""


class BoundaryClipped(VpflowError):
    """A level set exits the computational domain (open contour chains)."""


class TooFewVertices(VpflowError):
    """Contour too short for curvature estimation."""


class NotStarShaped(VpflowError):
    """A ray from the center meets the contour other than exactly once."""


class NonFinite(VpflowError):
    """Solver produced non-finite values (step-size contract violated)."""


class DualInfeasible(VpflowError):
    """Dual variable violates the unit-ball constraint."""


class Vanished(VpflowError):
    """Evolving region area fell below the 9-cell floor."""


class ResolutionViolation(VpflowError):
    """Time step below the grid resolution contract h >= (2*spacing)^2."""


class CylinderOutsideDomain(VpflowError):
    """Measurement cylinder is not contained in the grid domain."""


class EmptyFiber(VpflowError):
    """Some fiber of the cylinder does not meet the boundary."""


class ScaleBelowParabolicCutoff(VpflowError):
    """Requested probe scale is below the parabolic cutoff C0*sqrt(h)."""


class MeasureOutOfRange(VpflowError):
    """Input set measure outside the required open interval (0, 1)."""


class EmptyContactSet(VpflowError):
    """No parabola contact found; measure ratio undefined."""


class ShapeOutOfDomain(VpflowError):
    """Initial shape does not fit in the domain with the required margin."""


class ConfigError(VpflowError):
    """Scenario configuration file is invalid."""
