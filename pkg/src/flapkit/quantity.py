"""Dimensioned scalar quantities for the flapper toolkit.

All values are stored in SI base units; customary units (mg, mm, uNm, uW,
mV, ...) exist only at I/O boundaries. This is deliberately not a general
units library: only the dimensions this toolkit actually uses are
registered, and any arithmetic that would leave that closed set raises
DimensionError. Angle is carried as an explicit pseudo-base so that
torsional stiffness (N*m/rad) and torque (N*m) stay distinct.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DimensionError, UnitError

# Exponents over the base tuple (kg, m, s, A, rad).
_BASE = ("kg", "m", "s", "A", "rad")

DIMENSIONS: dict[str, tuple[int, int, int, int, int]] = {
    "dimensionless": (0, 0, 0, 0, 0),
    "mass": (1, 0, 0, 0, 0),
    "length": (0, 1, 0, 0, 0),
    "area": (0, 2, 0, 0, 0),
    "frequency": (0, 0, -1, 0, 0),
    "angle": (0, 0, 0, 0, 1),
    "angular_rate": (0, 0, -1, 0, 1),
    "force": (1, 1, -2, 0, 0),
    "torque": (1, 2, -2, 0, 0),
    "stiffness": (1, 2, -2, 0, -1),  # torsional, N*m/rad
    "inertia": (1, 2, 0, 0, 0),      # rotational, kg*m^2
    "power": (1, 2, -3, 0, 0),
    "voltage": (1, 2, -3, -1, 0),
    "voltage_squared": (2, 4, -6, -2, 0),
    "resistance": (1, 2, -3, -2, 0),
    "current": (0, 0, 0, 1, 0),
    "torque_per_current": (1, 2, -2, -1, 0),
    "density": (1, -3, 0, 0, 0),
    "pressure": (1, -1, -2, 0, 0),
    "resistivity": (1, 3, -3, -2, 0),
    "angular_damping": (1, 2, -1, 0, -1),  # N*m*s/rad
}

_SIG_TO_DIM = {sig: name for name, sig in DIMENSIONS.items()}

# unit string -> (dimension, scale to SI). Scales are exact powers of ten
# except for angle degrees; g-force units are handled in the budget module.
UNITS: dict[str, tuple[str, float]] = {
    # mass
    "kg": ("mass", 1.0),
    "g": ("mass", 1e-3),
    "mg": ("mass", 1e-6),
    "ug": ("mass", 1e-9),
    # length
    "m": ("length", 1.0),
    "cm": ("length", 1e-2),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "nm": ("length", 1e-9),
    # area
    "m2": ("area", 1.0),
    "mm2": ("area", 1e-6),
    # frequency
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    # angle
    "rad": ("angle", 1.0),
    "mrad": ("angle", 1e-3),
    "deg": ("angle", math.pi / 180.0),
    # force
    "N": ("force", 1.0),
    "mN": ("force", 1e-3),
    "uN": ("force", 1e-6),
    # torque
    "Nm": ("torque", 1.0),
    "mNm": ("torque", 1e-3),
    "uNm": ("torque", 1e-6),
    "nNm": ("torque", 1e-9),
    # torsional stiffness shares the written unit names with torque; the
    # (dimension, unit) pair disambiguates
    "Nm/rad": ("stiffness", 1.0),
    "uNm/rad": ("stiffness", 1e-6),
    "nNm/rad": ("stiffness", 1e-9),
    # inertia
    "kgm2": ("inertia", 1.0),
    "mgmm2": ("inertia", 1e-12),
    # power
    "W": ("power", 1.0),
    "mW": ("power", 1e-3),
    "uW": ("power", 1e-6),
    "nW": ("power", 1e-9),
    # voltage
    "V": ("voltage", 1.0),
    "mV": ("voltage", 1e-3),
    "uV": ("voltage", 1e-6),
    # resistance
    "Ohm": ("resistance", 1.0),
    "ohm": ("resistance", 1.0),
    "mOhm": ("resistance", 1e-3),
    # current
    "A": ("current", 1.0),
    "mA": ("current", 1e-3),
    # torque constant
    "Nm/A": ("torque_per_current", 1.0),
    "uNm/A": ("torque_per_current", 1e-6),
    # density
    "kg/m3": ("density", 1.0),
    "g/cm3": ("density", 1e3),
    # pressure / elastic modulus
    "Pa": ("pressure", 1.0),
    "MPa": ("pressure", 1e6),
    "GPa": ("pressure", 1e9),
    # resistivity
    "Ohmm": ("resistivity", 1.0),
    # rotational viscous damping
    "Nms/rad": ("angular_damping", 1.0),
}

# Stiffness values are routinely written with bare torque units in the
# source material ("spring stiffness ... 0.8uNm"); when a stiffness is
# expected we accept the torque-spelled unit too.
_TORQUE_AS_STIFFNESS = {"Nm": 1.0, "mNm": 1e-3, "uNm": 1e-6, "nNm": 1e-9}

ABS_ZERO_TOL = 1e-18  # SI; absolute fallback for near-zero comparisons


def _dim_sig(dim: str) -> tuple[int, ...]:
    try:
        return DIMENSIONS[dim]
    except KeyError:
        raise DimensionError(f"unknown dimension {dim!r}") from None


@dataclass(frozen=True)
class Quantity:
    """A scalar in SI base units tagged with one of the registered dimensions."""

    value: float
    dim: str

    def __post_init__(self):
        _dim_sig(self.dim)
        object.__setattr__(self, "value", float(self.value))

    # -- arithmetic ------------------------------------------------------
    def _require_same(self, other: "Quantity", op: str) -> None:
        if not isinstance(other, Quantity):
            raise DimensionError(f"cannot {op} Quantity and {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"cannot {op} {self.dim} and {other.dim}")

    def __add__(self, other):
        self._require_same(other, "add")
        return Quantity(self.value + other.value, self.dim)

    def __sub__(self, other):
        self._require_same(other, "subtract")
        return Quantity(self.value - other.value, self.dim)

    def __neg__(self):
        return Quantity(-self.value, self.dim)

    def __abs__(self):
        return Quantity(abs(self.value), self.dim)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quantity(self.value * other, self.dim)
        if isinstance(other, Quantity):
            sig = tuple(a + b for a, b in zip(_dim_sig(self.dim), _dim_sig(other.dim)))
            return self._from_sig(self.value * other.value, sig, f"{self.dim} * {other.dim}")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quantity(self.value / other, self.dim)
        if isinstance(other, Quantity):
            sig = tuple(a - b for a, b in zip(_dim_sig(self.dim), _dim_sig(other.dim)))
            return self._from_sig(self.value / other.value, sig, f"{self.dim} / {other.dim}")
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            raise DimensionError("quantity powers must be integers")
        sig = tuple(a * n for a in _dim_sig(self.dim))
        return self._from_sig(self.value**n, sig, f"{self.dim} ** {n}")

    @staticmethod
    def _from_sig(value: float, sig: tuple[int, ...], what: str) -> "Quantity":
        dim = _SIG_TO_DIM.get(sig)
        if dim is None:
            raise DimensionError(f"{what} leaves the registered dimension set")
        return Quantity(value, dim)

    # -- comparisons (same dimension only) -------------------------------
    def __lt__(self, other):
        self._require_same(other, "compare")
        return self.value < other.value

    def __le__(self, other):
        self._require_same(other, "compare")
        return self.value <= other.value

    def __gt__(self, other):
        self._require_same(other, "compare")
        return self.value > other.value

    def __ge__(self, other):
        self._require_same(other, "compare")
        return self.value >= other.value

    # -- display ----------------------------------------------------------
    def to(self, unit: str) -> float:
        return convert(self, unit)

    def __repr__(self):
        return f"Quantity({self.value!r}, {self.dim!r})"


def qty(value: float, unit: str) -> Quantity:
    """Build a Quantity from a value expressed in the given display unit."""
    dim, scale = _lookup_unit(unit)
    return Quantity(value * scale, dim)


def _lookup_unit(unit: str, expect_dim: str | None = None) -> tuple[str, float]:
    u = unit.replace("µ", "u").replace("μ", "u").replace("Ω", "Ohm")
    if expect_dim == "stiffness" and u in _TORQUE_AS_STIFFNESS:
        return "stiffness", _TORQUE_AS_STIFFNESS[u]
    if u not in UNITS:
        raise UnitError(f"unknown unit {unit!r}")
    dim, scale = UNITS[u]
    if expect_dim is not None and dim != expect_dim:
        raise UnitError(f"unit {unit!r} is {dim}, expected {expect_dim}")
    return dim, scale


def convert(q: Quantity, unit: str) -> float:
    """Express a quantity in a display unit of its own dimension."""
    dim, scale = _lookup_unit(unit, expect_dim=q.dim)
    return q.value / scale


_QTY_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-zµμΩ/0-9]+)\s*$")


def parse_quantity(text: str, expect_dim: str | None = None) -> Quantity:
    """Parse a unit-suffixed string like "0.3mm" or "70 mV".

    A dimension may be required; stiffness additionally accepts the
    torque-spelled units (uNm etc.) since the paper writes it that way.
    """
    if not isinstance(text, str):
        raise UnitError(f"expected a unit-suffixed string, got {text!r}")
    m = _QTY_RE.match(text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r} (expected e.g. '0.3mm')")
    value = float(m.group(1))
    dim, scale = _lookup_unit(m.group(2), expect_dim=expect_dim)
    return Quantity(value * scale, dim)


def approx_eq(a: Quantity, b: Quantity, rel_tol: float) -> bool:
    """Tolerance-aware equality: |a-b| <= rel_tol*max(|a|,|b|), with an
    absolute fallback of 1e-18 SI near zero."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot compare {a.dim} and {b.dim}")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be > 0")
    scale = max(abs(a.value), abs(b.value))
    return abs(a.value - b.value) <= max(rel_tol * scale, ABS_ZERO_TOL)
