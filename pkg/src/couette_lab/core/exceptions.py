from typing import List, Optional


class CouetteLabError(Exception):
    """Base class for all couette-lab errors."""

    pass


class ConfigError(CouetteLabError):
    """Raised when a run configuration fails validation.

    Carries every violated field, not just the first one.
    """

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        joined = "\n  - ".join(self.errors)
        super().__init__(f"Invalid configuration ({len(self.errors)} error(s)):\n  - {joined}")


class GridError(CouetteLabError):
    """Raised for malformed grids or arrays that do not match the grid."""

    pass


class WavenumberError(CouetteLabError):
    """Raised when k = 0 is passed where a nonzero wavenumber is required."""

    pass


class ShearProfileError(CouetteLabError):
    """Raised for invalid shear profiles (boundary trace, bad file, negative dt)."""

    pass


class CflViolationError(CouetteLabError):
    """Raised when a fixed time step exceeds the advective stability limit."""

    def __init__(self, dt: float, dt_max: float, context: Optional[str] = None):
        self.dt = dt
        self.dt_max = dt_max
        where = f" ({context})" if context else ""
        super().__init__(f"CFL violation{where}: dt={dt:.6g} exceeds dt_max={dt_max:.6g}")


class SamplingError(CouetteLabError):
    """Raised for time series that are too short, non-uniform or nonpositive."""

    pass


class OperatorCacheMiss(CouetteLabError):
    """Raised when an energy evaluation needs an SIO that was not supplied."""

    pass


class DivergenceError(CouetteLabError):
    """Raised when a trajectory produces NaN or blows past the divergence threshold."""

    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(message)


class CheckpointError(CouetteLabError):
    """Raised when a checkpoint file is truncated or does not match its header."""

    pass
