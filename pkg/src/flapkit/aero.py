"""Quasi-steady blade-element aerodynamics for the flapping wing.

Translational terms only: instantaneous lift and drag from the element
velocity (stroke_rate * r) and the angle of attack, with the empirical
flat-plate coefficient fits
    CL(a) = 0.225 + 1.58*sin(2.13*a - 7.2 deg)
    CD(a) = 1.92 - 1.55*cos(2.04*a - 9.82 deg)
(a in degrees). Rotational lift and added mass are excluded; a rotational
drag term about the pitch hinge is available separately because the
passive-pitch equation needs its dissipation.

Angle conventions (fixed here, tested):
  - pitch psi > 0 is the rotation produced when the stroke rate is
    positive (trailing edge lags the motion);
  - angle of attack is the angle between the wing chord plane and the
    stroke velocity, alpha = 90 deg - sign(stroke_rate)*psi;
  - coefficients fold alpha into [0, 90] deg with CL odd and CD even,
    and lift flips sign when the wing is pitched into the motion
    (alpha beyond 90 deg before folding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .wing import WingSpec

DEFAULT_CL_COEFFS = (0.225, 1.58, 2.13, -7.2)
DEFAULT_CD_COEFFS = (1.92, -1.55, 2.04, -9.82)


@dataclass(frozen=True)
class AeroConfig:
    air_density: float = 1.225  # kg/m^3
    cl_coeffs: tuple = DEFAULT_CL_COEFFS  # (a0, a1, a2, a3): a0 + a1*sin(a2*adeg + a3)
    cd_coeffs: tuple = DEFAULT_CD_COEFFS  # (b0, b1, b2, b3): b0 + b1*cos(b2*adeg + b3)
    n_blade_elements: int = 20
    # quadratic rotational drag about the pitch hinge; 5.0 is the standard
    # flat-plate value, 0 disables
    rotational_drag_coeff: float = 5.0

    def __post_init__(self):
        if self.air_density <= 0:
            raise ValueError("air density must be > 0")
        if self.n_blade_elements < 1:
            raise ValueError("need at least one blade element")
        if len(self.cl_coeffs) != 4 or len(self.cd_coeffs) != 4:
            raise ValueError("coefficient sets are 4-tuples")
        if self.rotational_drag_coeff < 0:
            raise ValueError("rotational drag coefficient must be >= 0")
        cl0, _ = _eval_coeffs(0.0, self.cl_coeffs, self.cd_coeffs)
        if cl0 < 0:
            raise ValueError("CL(0) must be >= 0")
        for adeg in range(0, 91, 5):
            _, cd = _eval_coeffs(math.radians(adeg), self.cl_coeffs, self.cd_coeffs)
            if cd <= 0:
                raise ValueError(f"CD({adeg} deg) must be > 0")


@dataclass(frozen=True)
class AeroState:
    stroke_angle: float  # rad
    stroke_rate: float  # rad/s
    pitch_angle: float  # rad
    pitch_rate: float  # rad/s

    def __post_init__(self):
        for v in (self.stroke_angle, self.stroke_rate, self.pitch_angle, self.pitch_rate):
            if not math.isfinite(v):
                raise ValueError("aero state must be finite")


@dataclass(frozen=True)
class AeroLoads:
    lift: float  # N, vertical, + up
    drag: float  # N, horizontal, signed along the stroke direction
    stroke_torque: float  # N*m about the stroke axis (opposes motion)
    pitch_torque: float  # N*m about the leading-edge hinge


def _eval_coeffs(alpha: float, cl_coeffs, cd_coeffs) -> tuple[float, float]:
    """Raw fits at alpha (rad, arbitrary sign); degree-based like the source fits."""
    adeg = math.degrees(alpha)
    a0, a1, a2, a3 = cl_coeffs
    b0, b1, b2, b3 = cd_coeffs
    cl = a0 + a1 * math.sin(math.radians(a2 * adeg + a3))
    cd = b0 + b1 * math.cos(math.radians(b2 * adeg + b3))
    return cl, cd


def fold_alpha(alpha: float) -> tuple[float, float]:
    """Reduce any angle of attack to [0, 90] deg.

    Returns (alpha_eff, lift_sign): the plate at 180-alpha is the same plate
    with the lift direction mirrored; negative alpha mirrors lift directly.
    """
    a = math.remainder(alpha, 2.0 * math.pi)  # (-pi, pi]
    sign = 1.0
    if a < 0.0:
        a, sign = -a, -1.0
    if a > 0.5 * math.pi:
        a = math.pi - a
        sign = -sign
    return a, sign


def force_coefficients(alpha: float, cfg: AeroConfig) -> dict:
    """CL and CD at an angle of attack (rad). CL is odd and CD even about
    alpha = 0 after folding."""
    a_eff, sign = fold_alpha(alpha)
    cl, cd = _eval_coeffs(a_eff, cfg.cl_coeffs, cfg.cd_coeffs)
    return {"CL": sign * cl, "CD": cd}


def blade_moments(wing: WingSpec, n_elements: int) -> tuple[float, float, float]:
    """Midpoint-rule blade-element moments of the rectangular mean-chord
    planform: S2 = int c r^2 dr, S3 = int c r^3 dr, M4 = int c^4 dr."""
    r = (np.arange(n_elements) + 0.5) * (wing.length / n_elements)
    dr = wing.length / n_elements
    c = wing.mean_chord
    s2 = float(np.sum(c * r**2) * dr)
    s3 = float(np.sum(c * r**3) * dr)
    m4 = float(n_elements * c**4 * dr)
    return s2, s3, m4


def blade_element_loads(state: AeroState, wing: WingSpec, cfg: AeroConfig) -> AeroLoads:
    """Instantaneous quasi-steady loads.

    All of these vanish at zero stroke rate and scale with stroke_rate^2.
    The pitch torque is the plate normal force times the center-of-pressure
    arm, always pushing the trailing edge downstream.
    """
    if state.stroke_rate == 0.0:
        return AeroLoads(0.0, 0.0, 0.0, 0.0)
    s2, s3, _ = blade_moments(wing, cfg.n_blade_elements)
    s = 1.0 if state.stroke_rate > 0.0 else -1.0
    alpha = 0.5 * math.pi - s * state.pitch_angle
    a_eff, lift_sign = fold_alpha(alpha)
    cl, cd = _eval_coeffs(a_eff, cfg.cl_coeffs, cfg.cd_coeffs)
    q2 = 0.5 * cfg.air_density * state.stroke_rate**2
    lift = lift_sign * cl * q2 * s2
    drag = -s * cd * q2 * s2
    stroke_torque = -s * cd * q2 * s3
    normal = (abs(cl) * math.cos(a_eff) + cd * math.sin(a_eff)) * q2 * s2
    pitch_torque = s * normal * wing.cop_distance
    return AeroLoads(lift, drag, stroke_torque, pitch_torque)


def rotational_pitch_drag(pitch_rate: float, wing: WingSpec, cfg: AeroConfig) -> float:
    """Quadratic damping torque about the pitch hinge,
    -(rho*C_rd/8) * |psi_dot|*psi_dot * int c^4 dr. Kept out of
    blade_element_loads so the translational loads stay strictly
    stroke-rate driven."""
    if cfg.rotational_drag_coeff == 0.0:
        return 0.0
    _, _, m4 = blade_moments(wing, cfg.n_blade_elements)
    coeff = cfg.air_density * cfg.rotational_drag_coeff * m4 / 8.0
    return -coeff * abs(pitch_rate) * pitch_rate


def cycle_average(times: np.ndarray, lifts: np.ndarray, stroke_torques: np.ndarray,
                  stroke_rates: np.ndarray, period: float) -> dict:
    """Time averages over a whole number of drive periods.

    mean_aero_power is the cycle-mean of |stroke torque * stroke rate|,
    i.e. the mechanical power the stroke feeds the air.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need a time series of at least two samples")
    span = times[-1] - times[0]
    n_cycles = span / period
    if abs(n_cycles - round(n_cycles)) > 1e-6 * max(n_cycles, 1.0) or round(n_cycles) < 1:
        raise ValueError(
            f"series spans {n_cycles:.4f} periods; cycle averages need a whole number"
        )
    mean_lift = float(np.trapezoid(lifts, times) / span)
    aero_power = float(np.trapezoid(np.abs(stroke_torques * stroke_rates), times) / span)
    return {"mean_lift": mean_lift, "mean_aero_power": aero_power}
