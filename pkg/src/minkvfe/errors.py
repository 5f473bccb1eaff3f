"""Exception hierarchy.

Every error carries a module-qualified ``code`` and the CLI ``exit_code``
it maps to (2 configuration, 3 numerical degeneracy).
"""


class VFEError(Exception):
    code = "minkvfe.error"
    exit_code = 3


class CausalDegeneracy(VFEError):
    """A vector that must be spacelike or timelike is (numerically) lightlike."""
    code = "lorentz.causal_degeneracy"


class MixedCausality(VFEError):
    """The causal character of a curve or of its normal changes along it."""
    code = "curve.mixed_causality"


class FrenetUndefined(VFEError):
    """The Frenet frame is needed at a sample where the curvature vanishes."""
    code = "frames.frenet_undefined"


class HyperbolicRangeError(VFEError):
    """A hyperbolic frame angle left the well-conditioned range."""
    code = "frames.hyperbolic_range"


class ArcLengthDrift(VFEError):
    """Unit-speed parametrization lost during time stepping."""
    code = "flow.arclength_drift"


class CaseMismatch(VFEError):
    code = "pde.case_mismatch"
    exit_code = 2


class GridTooSmall(VFEError):
    code = "pde.grid_too_small"
    exit_code = 2


class ConstraintViolation(VFEError):
    """Generator parameters violate the unit-speed relation of their case."""
    code = "cli.constraint_violation"
    exit_code = 2


class RunDirectoryError(VFEError):
    code = "cli.run_directory"
    exit_code = 2
