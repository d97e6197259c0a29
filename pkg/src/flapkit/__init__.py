"""flapkit: design and simulation toolkit for a sub-milligram
electromagnetic flapping-wing vehicle.

Covers actuator sizing (magnet/coil mass, resistance, Joule loss), resonant
torsion-spring design, passive-pitch flexure sizing, quasi-steady
blade-element aerodynamics, the coupled stroke/pitch simulation with hard
pitch stops, and the full mass/power/efficiency budget, all chained against
the as-built values of the reference device.
"""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    CalibrationError,
    ConfigError,
    DimensionError,
    FlapkitError,
    InfeasibleDesignError,
    SimulationDivergedError,
    UnitError,
)
from .quantity import Quantity, approx_eq, convert, parse_quantity, qty

__all__ = [
    "__version__",
    "Quantity", "qty", "convert", "approx_eq", "parse_quantity",
    "FlapkitError", "DimensionError", "UnitError", "ConfigError",
    "InfeasibleDesignError", "CalibrationError", "BracketError",
    "SimulationDivergedError",
]
