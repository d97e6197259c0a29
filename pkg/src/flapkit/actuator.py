"""Electromagnetic actuator model.

Magnet and coil geometry down to mass, winding resistance, drive torque and
Joule loss. The magnet-coil force coupling is not solved from field maps;
it is a single calibrated torque constant (N*m per ampere), found by
matching the simulated steady-state stroke amplitude to a target.
Inductance and back-EMF are neglected, so coil current is V/R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CalibrationError, DimensionError, SimulationDivergedError
from .materials import MaterialSpec
from .quantity import Quantity


@dataclass(frozen=True)
class MagnetSpec:
    height: float  # m
    diameter: float  # m
    material: MaterialSpec

    def __post_init__(self):
        if self.height <= 0 or self.diameter <= 0:
            raise ValueError("magnet height and diameter must be > 0")


@dataclass(frozen=True)
class CoilSpec:
    wire_diameter: float  # m
    layers: int
    turns_per_layer: int
    inner_diameter: float  # m
    height: float  # m
    material: MaterialSpec

    def __post_init__(self):
        if min(self.wire_diameter, self.inner_diameter, self.height) <= 0:
            raise ValueError("coil dimensions must be > 0")
        if self.layers < 1 or self.turns_per_layer < 1:
            raise ValueError("coil needs at least one layer and one turn")
        if self.height < self.turns_per_layer * self.wire_diameter:
            raise ValueError("coil height cannot fit the turns per layer")

    @property
    def total_windings(self) -> int:
        return self.layers * self.turns_per_layer


@dataclass(frozen=True)
class DriveSignal:
    waveform: str  # "square" | "sine"
    amplitude: float  # V
    frequency: float  # Hz

    def __post_init__(self):
        if self.waveform not in ("square", "sine"):
            raise ValueError(f"waveform must be 'square' or 'sine', got {self.waveform!r}")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")

    def voltage_at(self, t: float) -> float:
        """Instantaneous voltage; the square wave is +A on the first half
        period, -A on the second."""
        if self.waveform == "square":
            frac = (t * self.frequency) % 1.0
            return self.amplitude if frac < 0.5 else -self.amplitude
        return self.amplitude * math.sin(2.0 * math.pi * self.frequency * t)

    @property
    def v_rms(self) -> float:
        if self.waveform == "square":
            return self.amplitude
        return self.amplitude / math.sqrt(2.0)


@dataclass(frozen=True)
class TorqueConstant:
    """Drive coupling in N*m per A.

    Angle-independent by default; angle_weight = (w2, w4) applies an even
    polynomial 1 + w2*phi^2 + w4*phi^4 over the stroke angle for studies
    where the magnet leaves the uniform-field region. Calibration absorbs
    the average coupling either way.
    """

    k_t: float
    angle_weight: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.k_t <= 0:
            raise ValueError("torque constant must be > 0")
        if len(self.angle_weight) != 2:
            raise ValueError("angle_weight is a (w2, w4) pair")

    def weight_at(self, angle: float) -> float:
        w2, w4 = self.angle_weight
        return 1.0 + w2 * angle**2 + w4 * angle**4


def magnet_mass(spec: MagnetSpec) -> Quantity:
    """Cylinder volume times density."""
    volume = math.pi * (spec.diameter / 2.0) ** 2 * spec.height
    return Quantity(volume * spec.material.density, "mass")


def coil_wire_length(spec: CoilSpec) -> Quantity:
    """Total wound wire length.

    Layer i (0-based) sits at mean diameter inner + (2i+1)*wire_diameter;
    each turn contributes one mean circumference.
    """
    total = 0.0
    for i in range(spec.layers):
        mean_dia = spec.inner_diameter + (2 * i + 1) * spec.wire_diameter
        total += spec.turns_per_layer * math.pi * mean_dia
    return Quantity(total, "length")


def coil_resistance(spec: CoilSpec) -> Quantity:
    """DC resistance of the winding: rho_e * L / A_wire."""
    if spec.material.resistivity is None:
        raise DimensionError(f"material {spec.material.name!r} has no resistivity")
    length = coil_wire_length(spec).value
    area = math.pi * (spec.wire_diameter / 2.0) ** 2
    return Quantity(spec.material.resistivity * length / area, "resistance")


def coil_mass(spec: CoilSpec) -> Quantity:
    """Bare conductor mass. Insulation and solder are not modelled, so this
    undershoots a weighed coil; reports flag the gap as a warning."""
    length = coil_wire_length(spec).value
    area = math.pi * (spec.wire_diameter / 2.0) ** 2
    return Quantity(length * area * spec.material.density, "mass")


def magnet_coil_clearance(magnet: MagnetSpec, coil: CoilSpec) -> Quantity:
    """Radial gap between magnet surface and coil bore. Reported only; the
    source states the clearance requirement qualitatively."""
    return Quantity((coil.inner_diameter - magnet.diameter) / 2.0, "length")


def joule_power(signal: DriveSignal, resistance: Quantity) -> Quantity:
    """Resistive loss V_rms^2 / R. For a +/-V square wave V_rms = V."""
    if resistance.dim != "resistance":
        raise DimensionError(f"expected resistance, got {resistance.dim}")
    if resistance.value <= 0:
        raise ValueError("resistance must be > 0")
    return Quantity(signal.v_rms**2 / resistance.value, "power")


def drive_torque(signal: DriveSignal, k_t: TorqueConstant, resistance: Quantity,
                 t: float, stroke_angle: float = 0.0) -> Quantity:
    """Instantaneous drive torque k_t * V(t) / R (inductance neglected)."""
    if resistance.value <= 0:
        raise ValueError("resistance must be > 0")
    coupling = k_t.k_t * k_t.weight_at(stroke_angle)
    return Quantity(coupling * signal.voltage_at(t) / resistance.value, "torque")


def calibrate_torque_constant(
    target_stroke_amplitude: float,
    sim_config,
    rel_tol: float = 0.01,
    max_iter: int = 80,
) -> TorqueConstant:
    """Find k_t so the simulated steady-state stroke amplitude at the drive
    frequency matches the target (rad) within rel_tol.

    Steady amplitude is monotone in k_t, so an exponential bracket plus
    bisection is enough. A run that hits the +/-90 deg stroke guard counts
    as 'amplitude above target'.
    """
    from . import dynamics  # deferred: dynamics imports actuator types

    if target_stroke_amplitude <= 0:
        raise ValueError("target stroke amplitude must be > 0")

    def amplitude_for(k_t_value: float) -> float:
        cfg = sim_config.with_torque_constant(TorqueConstant(k_t_value))
        try:
            amp, settled, _ = dynamics.steady_state_amplitude(cfg)
        except SimulationDivergedError:
            return math.inf
        if not settled:
            raise CalibrationError(
                f"simulation did not settle at k_t={k_t_value:.3e} N*m/A"
            )
        return amp

    evals = 0
    k_lo, a_lo = 0.0, 0.0
    k_hi = 1e-7
    a_hi = amplitude_for(k_hi)
    evals += 1
    while a_hi < target_stroke_amplitude:
        k_lo, a_lo = k_hi, a_hi
        k_hi *= 4.0
        a_hi = amplitude_for(k_hi)
        evals += 1
        if evals > max_iter or k_hi > 1.0:
            raise CalibrationError(
                f"could not bracket target amplitude {target_stroke_amplitude:.4f} rad "
                f"(reached k_t={k_hi:.3e}, amplitude={a_hi:.4f} rad)"
            )
    while k_hi / max(k_lo, 1e-30) > 16.0:
        # shrink an unbounded-from-below bracket before bisecting
        k_mid = k_hi / 4.0
        a_mid = amplitude_for(k_mid)
        evals += 1
        if a_mid >= target_stroke_amplitude:
            k_hi, a_hi = k_mid, a_mid
        else:
            k_lo, a_lo = k_mid, a_mid
            break
        if evals > max_iter:
            raise CalibrationError("bracket shrink exceeded iteration budget")

    best_k, best_err = k_hi, abs(a_hi - target_stroke_amplitude)
    while evals < max_iter:
        k_mid = 0.5 * (k_lo + k_hi)
        a_mid = amplitude_for(k_mid)
        evals += 1
        err = abs(a_mid - target_stroke_amplitude)
        if err < best_err:
            best_k, best_err = k_mid, err
        if err <= rel_tol * target_stroke_amplitude:
            return TorqueConstant(k_mid)
        if a_mid < target_stroke_amplitude:
            k_lo = k_mid
        else:
            k_hi = k_mid
    raise CalibrationError(
        f"calibration did not converge in {max_iter} evaluations: best k_t={best_k:.3e} "
        f"missed target by {best_err / target_stroke_amplitude:.2%}"
    )
