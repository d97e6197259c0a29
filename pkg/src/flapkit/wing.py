"""Wing planform, inertia model, and passive-pitch flexure sizing.

The pitch hinge is a thin polyester flexure along the leading edge, sized
so the wing reaches its intended maximum deflection under the peak
aerodynamic torque; an X-frame then hard-limits the pitch excursion.
Aspect ratio follows the single-wing convention length / mean-chord, which
puts the fixed center of pressure (0.4 mm from the hinge) forward of
mid-chord as quasi-steady theory expects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleDesignError
from .materials import MaterialSpec
from .quantity import Quantity


@dataclass(frozen=True)
class WingSpec:
    length: float  # m, root to tip
    aspect_ratio: float  # length / mean chord, single wing
    mass: float  # kg
    n_veins: int = 5
    vein_width: float = 30e-6  # m
    membrane_thickness: float = 1.5e-6  # m
    adhesive_thickness: float = 18e-6  # m
    cop_distance: float = 0.4e-3  # m, chordwise from leading edge
    # fraction of wing mass lumped on the leading edge (veins + adhesive
    # concentrate there); 0 = uniform plate
    le_mass_fraction: float = 0.0

    def __post_init__(self):
        if self.length <= 0 or self.aspect_ratio <= 0 or self.mass <= 0:
            raise ValueError("wing length, aspect ratio and mass must be > 0")
        if not 0.0 <= self.le_mass_fraction < 1.0:
            raise ValueError("le_mass_fraction must be in [0, 1)")
        if self.cop_distance >= self.mean_chord:
            raise ValueError("center of pressure must sit within the mean chord")

    @property
    def mean_chord(self) -> float:
        return self.length / self.aspect_ratio

    @property
    def area(self) -> float:
        return self.length * self.mean_chord


@dataclass(frozen=True)
class FlexureSpec:
    total_width: float  # m, summed over parts
    length: float  # m
    thickness: float  # m
    n_parts: int
    material: MaterialSpec

    def __post_init__(self):
        if min(self.total_width, self.length, self.thickness) <= 0:
            raise ValueError("flexure dimensions must be > 0")
        if self.n_parts < 1:
            raise ValueError("n_parts must be >= 1")

    @property
    def part_width(self) -> float:
        """Equal split; parts bend in parallel so the split does not change
        total stiffness (it kills off-axis twisting)."""
        return self.total_width / self.n_parts


@dataclass(frozen=True)
class PitchStopSpec:
    positive_limit: float  # rad
    negative_limit: float  # rad, stored positive (stop at -negative_limit)
    restitution: float = 0.0

    def __post_init__(self):
        for lim in (self.positive_limit, self.negative_limit):
            if not 0.0 < lim < math.pi / 2:
                raise ValueError("pitch stops must lie within (0, 90) deg")
        if not 0.0 <= self.restitution <= 1.0:
            raise ValueError("restitution must be in [0, 1]")


def flexure_stiffness(spec: FlexureSpec) -> Quantity:
    """Bending stiffness (E/12) * t^3 * (w/l); independent of how the total
    width is split into parts."""
    k = (spec.material.elastic_modulus / 12.0) * spec.thickness**3 * (spec.total_width / spec.length)
    return Quantity(k, "stiffness")


def max_aero_torque(normal_force: float, cop_distance: float) -> Quantity:
    """Peak pitch torque: normal force times center-of-pressure arm."""
    if normal_force < 0 or cop_distance < 0:
        raise ValueError("inputs must be >= 0")
    return Quantity(normal_force * cop_distance, "torque")


def design_flexure(max_torque: float, max_deflection: float, thickness: float,
                   material: MaterialSpec, length: float,
                   n_parts: int = 3, max_total_width: float | None = None) -> FlexureSpec:
    """Size the flexure width so max_torque deflects it by max_deflection:
    w = 12*l*tau / (theta*E*t^3), split into equal parts (3 by default)."""
    if min(max_torque, max_deflection, thickness, length) <= 0:
        raise ValueError("inputs must be > 0")
    width = 12.0 * length * max_torque / (max_deflection * material.elastic_modulus * thickness**3)
    if max_total_width is not None and width > max_total_width:
        need = length * max_total_width / width
        raise InfeasibleDesignError(
            f"flexure width {width * 1e6:.0f} um exceeds the available leading edge "
            f"({max_total_width * 1e6:.0f} um); shorten the flexure to {need * 1e6:.0f} um "
            "or relax the deflection target",
            nearest=Quantity(max_total_width, "length"),
        )
    return FlexureSpec(width, length, thickness, n_parts, material)


def wing_planform(length: float, aspect_ratio: float) -> dict:
    """Mean chord and area under the length/mean-chord convention."""
    if length <= 0 or aspect_ratio <= 0:
        raise ValueError("inputs must be > 0")
    mean_chord = length / aspect_ratio
    return {
        "mean_chord": Quantity(mean_chord, "length"),
        "area": Quantity(length * mean_chord, "area"),
    }


def wing_pitch_inertia(spec: WingSpec) -> Quantity:
    """Rotational inertia about the leading-edge pitch axis.

    The wing mass is split into a uniform surface density over the planform
    plus a line density along the leading edge (which contributes nothing,
    sitting on the axis). With the default le_mass_fraction = 0 this is the
    uniform-plate value integral(c(r)^3/3 * sigma) dr = m*c^2/3 for the
    rectangular mean-chord planform.
    """
    sheet_mass = spec.mass * (1.0 - spec.le_mass_fraction)
    return Quantity(sheet_mass * spec.mean_chord**2 / 3.0, "inertia")


def pitch_resonance_frequency(wing: WingSpec, flexure: FlexureSpec) -> Quantity:
    """Passive-pitch natural frequency sqrt(k_flex/I_pitch)/2pi. Quasi-static
    pitch behaviour needs this well above the stroke frequency."""
    i_pitch = wing_pitch_inertia(wing).value
    k = flexure_stiffness(flexure).value
    return Quantity(math.sqrt(k / i_pitch) / (2.0 * math.pi), "frequency")
