"""Torsion-spring sizing and stroke-resonance bookkeeping.

The stroke oscillator is a magnet of mass m on an arc of radius r
restrained by a planar bank of bending beams. Stiffness targeting follows
m*r^2*(2*pi*f)^2; the beam bank itself is an analytic series-bending model
with an explicit topology factor standing in for the original FEA-tuned
geometry (default 1.0; ~3.9 reproduces the as-built 0.8 uNm from the
published beam dimensions). Reports disclose which factor is in use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleDesignError
from .materials import MaterialSpec
from .quantity import Quantity

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpringSpec:
    n_beams: int
    beam_length: float  # m
    beam_width: float  # m
    beam_thickness: float  # m
    material: MaterialSpec
    topology_factor: float = 1.0

    def __post_init__(self):
        if self.n_beams < 1:
            raise ValueError("n_beams must be >= 1")
        if min(self.beam_length, self.beam_width, self.beam_thickness) <= 0:
            raise ValueError("beam dimensions must be > 0")
        if self.topology_factor <= 0:
            raise ValueError("topology_factor must be > 0")

    @property
    def footprint(self) -> float:
        """n * w * l, the tie-break metric for inverse design."""
        return self.n_beams * self.beam_width * self.beam_length

    def mass(self) -> Quantity:
        volume = self.n_beams * self.beam_length * self.beam_width * self.beam_thickness
        return Quantity(volume * self.material.density, "mass")


@dataclass(frozen=True)
class OscillatorSpec:
    stiffness: float  # N*m/rad
    inertia: float  # kg*m^2
    arc_radius: float  # m
    point_mass: float  # kg
    damping: float = 0.0  # N*m*s/rad, structural; 0 unless modelling losses

    def __post_init__(self):
        if self.stiffness <= 0 or self.inertia <= 0:
            raise ValueError("stiffness and inertia must be > 0")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")
        if self.point_mass > 0 and self.arc_radius > 0:
            if self.inertia < self.point_mass * self.arc_radius**2 * (1.0 - 1e-9):
                raise ValueError("inertia below the bare point-mass value")

    @classmethod
    def from_point_mass(cls, point_mass: float, arc_radius: float, stiffness: float,
                        extra_inertia: float = 0.0, damping: float = 0.0) -> "OscillatorSpec":
        """Magnet-on-arc inertia plus an additive term for glue and frames."""
        inertia = point_mass * arc_radius**2 + extra_inertia
        return cls(stiffness, inertia, arc_radius, point_mass, damping)


def required_stiffness(point_mass: float, arc_radius: float, target_freq: float) -> Quantity:
    """Torsional stiffness that resonates a point mass on an arc at the
    target frequency: m * r^2 * (2*pi*f)^2."""
    if min(point_mass, arc_radius, target_freq) < 0:
        raise ValueError("inputs must be >= 0")
    k = point_mass * arc_radius**2 * (2.0 * math.pi * target_freq) ** 2
    return Quantity(k, "stiffness")


def resonance_frequency(osc: OscillatorSpec) -> Quantity:
    """(1/2pi) * sqrt(k/I)."""
    return Quantity(math.sqrt(osc.stiffness / osc.inertia) / (2.0 * math.pi), "frequency")


def effective_inertia_from_resonance(stiffness: float, observed_freq: float) -> Quantity:
    """Invert an observed resonance to the lumped inertia k/(2*pi*f)^2.

    Exposes how much inertia glue, frames and wing added beyond the bare
    magnet; the inverse of required_stiffness.
    """
    if stiffness <= 0 or observed_freq <= 0:
        raise ValueError("stiffness and frequency must be > 0")
    return Quantity(stiffness / (2.0 * math.pi * observed_freq) ** 2, "inertia")


def beam_bank_stiffness(spec: SpringSpec) -> Quantity:
    """Analytic torsional stiffness of the beam bank.

    Out-of-plane bending, beams in rotational series:
    topology_factor * E * I_b / (n * l) with I_b = w*t^3/12.
    """
    i_b = spec.beam_width * spec.beam_thickness**3 / 12.0
    k = spec.topology_factor * spec.material.elastic_modulus * i_b / (spec.n_beams * spec.beam_length)
    return Quantity(k, "stiffness")


@dataclass(frozen=True)
class SpringDesignConstraints:
    thickness: float  # m, fixed by sheet stock
    width_bounds: tuple[float, float]  # m
    length_bounds: tuple[float, float]  # m
    n_beams_bounds: tuple[int, int]
    topology_factor: float = 1.0

    def __post_init__(self):
        for lo, hi in (self.width_bounds, self.length_bounds, self.n_beams_bounds):
            if lo <= 0 or hi < lo:
                raise ValueError("constraint bounds must be positive with lo <= hi")
        if self.thickness <= 0:
            raise ValueError("thickness must be > 0")


def _golden_section_length(target_k: float, n: int, width: float,
                           constraints: SpringDesignConstraints,
                           material: MaterialSpec, tol: float = 1e-12) -> float:
    """Refine beam length to match target stiffness; k is monotone in l so
    we minimise the log-ratio error over the length bounds."""

    def err(length: float) -> float:
        k = beam_bank_stiffness(SpringSpec(n, length, width, constraints.thickness,
                                           material, constraints.topology_factor)).value
        return abs(math.log(k / target_k))

    a, b = constraints.length_bounds
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = err(c), err(d)
    while b - a > tol * max(b, 1.0):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = err(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = err(d)
    return 0.5 * (a + b)


def design_spring(target_k: float, material: MaterialSpec,
                  constraints: SpringDesignConstraints,
                  rel_tol: float = 0.02, n_width_samples: int = 33) -> SpringSpec:
    """Inverse spring design: grid over integer beam counts, golden-section
    refinement on beam length, smallest footprint wins (then fewest beams).

    Raises InfeasibleDesignError carrying the nearest achievable stiffness
    when the constraint box cannot reach the target within rel_tol.
    """
    if target_k <= 0:
        raise ValueError("target stiffness must be > 0")
    w_lo, w_hi = constraints.width_bounds
    n_lo, n_hi = constraints.n_beams_bounds
    if w_hi > w_lo:
        widths = [w_lo + (w_hi - w_lo) * i / (n_width_samples - 1) for i in range(n_width_samples)]
    else:
        widths = [w_lo]

    best: SpringSpec | None = None
    nearest_k = None
    nearest_gap = math.inf
    # ascending n, so on footprint ties the fewest-beams candidate is kept
    for n in range(n_lo, n_hi + 1):
        for width in widths:
            length = _golden_section_length(target_k, n, width, constraints, material)
            spec = SpringSpec(n, length, width, constraints.thickness,
                              material, constraints.topology_factor)
            k = beam_bank_stiffness(spec).value
            gap = abs(k - target_k) / target_k
            if gap < nearest_gap:
                nearest_gap, nearest_k = gap, k
            if gap <= rel_tol:
                # footprint ties within the refinement residual keep the
                # earlier (fewest-beams) candidate
                if best is None or spec.footprint < best.footprint * (1.0 - 1e-6):
                    best = spec
    if best is None:
        raise InfeasibleDesignError(
            f"target stiffness {target_k:.3e} N*m/rad unreachable within the constraint box; "
            f"nearest achievable is {nearest_k:.3e} ({nearest_gap:.1%} off)",
            nearest=Quantity(nearest_k, "stiffness"),
        )
    return best
