"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 1, InfeasibleDesignError
-> 2, SimulationDivergedError / CalibrationError -> 3.
"""


class FlapkitError(Exception):
    pass


class DimensionError(FlapkitError):
    """Arithmetic or comparison between mismatched dimensions."""


class UnitError(FlapkitError):
    """Unknown or wrong-dimension display unit."""


class ConfigError(FlapkitError):
    """Invalid project configuration (bad key, bad unit, bad value)."""


class InfeasibleDesignError(FlapkitError):
    """Inverse design target outside the achievable range.

    Carries the nearest achievable value so callers can report it.
    """

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class CalibrationError(FlapkitError):
    """Torque-constant calibration failed to converge."""


class BracketError(FlapkitError):
    """Resonance search bracket does not contain an interior maximum."""


class SimulationDivergedError(FlapkitError):
    """Integration produced NaN or left the physical guard band."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
