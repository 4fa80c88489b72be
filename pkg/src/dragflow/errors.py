"""Exception types shared across the solver."""


class DragflowError(Exception):
    """Base class for all solver errors."""


class PositivityError(DragflowError):
    """A density field is nonpositive where strict positivity is required."""

    def __init__(self, field, cell, t=None, value=None):
        self.field = field
        self.cell = tuple(int(c) for c in cell)
        self.t = t
        self.value = value
        loc = f"{field} at cell {self.cell}"
        if value is not None:
            loc += f" (value {value:.6g})"
        if t is not None:
            loc += f", t={t:.9g}"
        super().__init__(f"nonpositive density: {loc}")


class DegenerateDensity(DragflowError):
    """min(n) fell below the floor guarding the n**-12 stiff source."""

    def __init__(self, min_n, floor, t=None):
        self.min_n = min_n
        self.floor = floor
        self.t = t
        msg = f"min(n)={min_n:.6g} below floor {floor:.6g}"
        if t is not None:
            msg += f" at t={t:.9g}"
        super().__init__(msg)


class NumericalBlowup(DragflowError):
    """Non-finite values appeared in the state or its time derivative."""


class PositivityLost(DragflowError):
    """A time step drove a density below the configured floor."""


class ConstraintViolation(DragflowError):
    """A construction-time bound (e.g. on the mollifier) failed on this grid."""


class VacuumMismatch(DragflowError):
    """Momentum is nonzero on a vacuum region of the matching density."""


class ZeroMass(DragflowError):
    """A phase has zero total mass; equilibrium constants are undefined."""


class ConfigError(DragflowError):
    """The experiment configuration is malformed or violates a constraint."""
