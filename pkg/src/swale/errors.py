"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all simulation-aborting errors."""


class MeshTangled(SimulationError):
    """A node update produced a triangle with non-positive signed area.

    Carries the offending triangle index and its signed area; the step
    counter is attached by the driver when available.
    """

    def __init__(self, triangle: int, area: float, step: int | None = None):
        self.triangle = int(triangle)
        self.area = float(area)
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"mesh tangled{where}: triangle {self.triangle} has signed area {self.area:.3e}"
        )


class FixedPointDiverged(SimulationError):
    """The continuity/momentum fixed-point loop hit its iteration cap."""

    def __init__(self, iterations: int, change: float, step: int | None = None):
        self.iterations = int(iterations)
        self.change = float(change)
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"fixed point diverged{where}: {self.iterations} iterations, "
            f"last relative change {self.change:.3e}"
        )


class BoundaryCollision(SimulationError):
    """Two non-adjacent boundary segments cross.

    The discrete model cannot represent a change of connectedness, so the
    run stops cleanly instead of corrupting state.
    """

    def __init__(self, seg_a: int, seg_b: int, step: int | None = None):
        self.seg_a = int(seg_a)
        self.seg_b = int(seg_b)
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"boundary self-intersection{where}: segments {self.seg_a} and {self.seg_b} cross"
        )


class SolverError(SimulationError):
    """A linear solve failed to meet its residual contract."""

    def __init__(self, residual: float, tol: float, context: str = ""):
        self.residual = float(residual)
        self.tol = float(tol)
        ctx = f" ({context})" if context else ""
        super().__init__(
            f"linear solve{ctx} residual {self.residual:.3e} exceeds tolerance {self.tol:.3e}"
        )


class ConfigError(ValueError):
    """A run configuration file or flag set is invalid."""
