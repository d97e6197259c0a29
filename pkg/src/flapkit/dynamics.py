"""Coupled two-degree-of-freedom flapper simulation.

Stroke: a driven torsional oscillator,
    I_s * phi'' = tau_drive - k_spring*phi - c*phi' + tau_aero_stroke
Pitch: passive rotation against the flexure with hard stops,
    I_p * psi'' = -k_flex*(psi - bias) + tau_aero_pitch + tau_rot_drag
                  + I_c*cos(psi)*phi''

The last pitch term is the span-chord inertial coupling (product of
inertia I_c = integral r*y dm of the sheet mass): stroke deceleration
slings the hanging wing plane forward, which is what times the passive
pitch reversal to the stroke extremes. It is applied one-way; the
back-reaction on the stroke is below half a percent of the spring torque
at this scale. Set inertial_pitch_coupling=False to drop it.

Fixed-step RK4; stop contact is resolved after each step by projecting the
pitch back to the limit and reflecting its rate scaled by the restitution
(0 = inelastic, matching a glue-joint collision with no visible rebound).
The integration kernel is numba-compiled and GIL-free so frequency sweeps
can fan points out over threads; identical configs give bit-identical
series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .actuator import DriveSignal, TorqueConstant
from .aero import AeroConfig, blade_moments
from .errors import BracketError, SimulationDivergedError
from .quantity import Quantity
from .spring import OscillatorSpec
from .wing import FlexureSpec, PitchStopSpec, WingSpec, flexure_stiffness, wing_pitch_inertia

STROKE_GUARD = 0.5 * math.pi  # rad; beyond this the model is meaningless
PITCH_PENETRATION_TOL = math.radians(0.1)

# parameter-vector layout for the compiled kernel
_P_I_STROKE = 0
_P_K_SPRING = 1
_P_C_STROKE = 2
_P_I_PITCH = 3
_P_K_FLEX = 4
_P_PSI_BIAS = 5
_P_STOPS_ON = 6
_P_STOP_POS = 7
_P_STOP_NEG = 8
_P_RESTITUTION = 9
_P_AERO_ON = 10
_P_RHO = 11
_P_S2 = 12
_P_S3 = 13
_P_RD_COEFF = 14
_P_D_COP = 15
_P_K_T = 16
_P_R_COIL = 17
_P_V_AMP = 18
_P_FREQ = 19
_P_WAVE = 20
_P_CL = 21  # 4 slots
_P_CD = 25  # 4 slots
_P_I_COUPLE = 29
_P_KT_W2 = 30
_P_KT_W4 = 31
_N_PARAMS = 32

# recorded columns
COLUMNS = ("t", "stroke_angle", "stroke_rate", "pitch_angle", "pitch_rate",
           "lift", "drag", "tau_drive", "P_elec", "P_aero")
_C_STOP_LOSS = 10  # internal extra column: cumulative stop losses
_N_COLS = 11

STATUS_OK = 0
STATUS_NAN = 1
STATUS_GUARD = 2


@dataclass(frozen=True)
class SimState:
    time: float
    stroke_angle: float
    stroke_rate: float
    pitch_angle: float
    pitch_rate: float


@dataclass(frozen=True)
class SimConfig:
    oscillator: OscillatorSpec
    wing: WingSpec
    flexure: FlexureSpec
    drive: DriveSignal
    k_t: TorqueConstant
    coil_resistance: float  # ohm
    dt: float  # s
    stops: PitchStopSpec | None = None
    aero: AeroConfig | None = None
    pitch_bias: float = 0.0  # rad, wing-plane misalignment
    pitch_inertia: float | None = None  # kg*m^2; derived from wing if None
    inertial_pitch_coupling: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.dt > 1.0 / (1000.0 * self.drive.frequency) * (1.0 + 1e-9):
            raise ValueError("dt must satisfy dt <= 1/(1000*drive.frequency)")
        if self.coil_resistance <= 0:
            raise ValueError("coil resistance must be > 0")

    @classmethod
    def from_steps_per_cycle(cls, steps_per_cycle: int = 1000, **kwargs) -> "SimConfig":
        drive = kwargs["drive"]
        if steps_per_cycle < 1000:
            raise ValueError("need at least 1000 steps per drive cycle")
        return cls(dt=1.0 / (drive.frequency * steps_per_cycle), **kwargs)

    @property
    def steps_per_cycle(self) -> int:
        return max(1, round(1.0 / (self.dt * self.drive.frequency)))

    @property
    def effective_pitch_inertia(self) -> float:
        if self.pitch_inertia is not None:
            return self.pitch_inertia
        return wing_pitch_inertia(self.wing).value

    @property
    def pitch_coupling_inertia(self) -> float:
        """Product of inertia int r*y dm of the sheet-distributed mass over
        the rectangular planform: m_sheet * R * c / 4."""
        if not self.inertial_pitch_coupling:
            return 0.0
        sheet_mass = self.wing.mass * (1.0 - self.wing.le_mass_fraction)
        return sheet_mass * self.wing.length * self.wing.mean_chord / 4.0

    def with_torque_constant(self, k_t: TorqueConstant) -> "SimConfig":
        return replace(self, k_t=k_t)

    def with_drive_frequency(self, frequency: float) -> "SimConfig":
        drive = DriveSignal(self.drive.waveform, self.drive.amplitude, frequency)
        return replace(self, drive=drive, dt=1.0 / (frequency * self.steps_per_cycle))

    def params(self) -> np.ndarray:
        p = np.zeros(_N_PARAMS)
        p[_P_I_STROKE] = self.oscillator.inertia
        p[_P_K_SPRING] = self.oscillator.stiffness
        p[_P_C_STROKE] = self.oscillator.damping
        p[_P_I_PITCH] = self.effective_pitch_inertia
        p[_P_K_FLEX] = flexure_stiffness(self.flexure).value
        p[_P_PSI_BIAS] = self.pitch_bias
        if self.stops is not None:
            p[_P_STOPS_ON] = 1.0
            p[_P_STOP_POS] = self.stops.positive_limit
            p[_P_STOP_NEG] = self.stops.negative_limit
            p[_P_RESTITUTION] = self.stops.restitution
        if self.aero is not None:
            s2, s3, m4 = blade_moments(self.wing, self.aero.n_blade_elements)
            p[_P_AERO_ON] = 1.0
            p[_P_RHO] = self.aero.air_density
            p[_P_S2] = s2
            p[_P_S3] = s3
            p[_P_RD_COEFF] = self.aero.air_density * self.aero.rotational_drag_coeff * m4 / 8.0
            p[_P_D_COP] = self.wing.cop_distance
            p[_P_CL:_P_CL + 4] = self.aero.cl_coeffs
            p[_P_CD:_P_CD + 4] = self.aero.cd_coeffs
        p[_P_K_T] = self.k_t.k_t
        p[_P_R_COIL] = self.coil_resistance
        p[_P_V_AMP] = self.drive.amplitude
        p[_P_FREQ] = self.drive.frequency
        p[_P_WAVE] = 0.0 if self.drive.waveform == "square" else 1.0
        p[_P_I_COUPLE] = self.pitch_coupling_inertia
        p[_P_KT_W2], p[_P_KT_W4] = self.k_t.angle_weight
        return p


@njit(cache=True, nogil=True)
def _voltage(t, p):
    if p[_P_WAVE] == 0.0:
        frac = (t * p[_P_FREQ]) % 1.0
        return p[_P_V_AMP] if frac < 0.5 else -p[_P_V_AMP]
    return p[_P_V_AMP] * math.sin(2.0 * math.pi * p[_P_FREQ] * t)


@njit(cache=True, nogil=True)
def _aero_terms(dphi, psi, p):
    """Translational quasi-steady loads: (lift, drag, tau_stroke, tau_pitch)."""
    if p[_P_AERO_ON] == 0.0 or dphi == 0.0:
        return 0.0, 0.0, 0.0, 0.0
    s = 1.0 if dphi > 0.0 else -1.0
    alpha = 0.5 * math.pi - s * psi
    # fold into [0, pi/2] tracking the lift mirror
    while alpha > math.pi:
        alpha -= 2.0 * math.pi
    while alpha <= -math.pi:
        alpha += 2.0 * math.pi
    sign = 1.0
    if alpha < 0.0:
        alpha = -alpha
        sign = -1.0
    if alpha > 0.5 * math.pi:
        alpha = math.pi - alpha
        sign = -sign
    adeg = math.degrees(alpha)
    cl = p[_P_CL] + p[_P_CL + 1] * math.sin(math.radians(p[_P_CL + 2] * adeg + p[_P_CL + 3]))
    cd = p[_P_CD] + p[_P_CD + 1] * math.cos(math.radians(p[_P_CD + 2] * adeg + p[_P_CD + 3]))
    q2 = 0.5 * p[_P_RHO] * dphi * dphi
    lift = sign * cl * q2 * p[_P_S2]
    drag = -s * cd * q2 * p[_P_S2]
    tau_stroke = -s * cd * q2 * p[_P_S3]
    normal = (abs(cl) * math.cos(alpha) + cd * math.sin(alpha)) * q2 * p[_P_S2]
    tau_pitch = s * normal * p[_P_D_COP]
    return lift, drag, tau_stroke, tau_pitch


@njit(cache=True, nogil=True)
def _drive_torque(t, phi, p):
    weight = 1.0 + p[_P_KT_W2] * phi * phi + p[_P_KT_W4] * phi**4
    return p[_P_K_T] * weight * _voltage(t, p) / p[_P_R_COIL]


@njit(cache=True, nogil=True)
def _accels(t, phi, dphi, psi, dpsi, p):
    tau_drive = _drive_torque(t, phi, p)
    lift, drag, tau_stroke, tau_pitch = _aero_terms(dphi, psi, p)
    ddphi = (tau_drive - p[_P_K_SPRING] * phi - p[_P_C_STROKE] * dphi + tau_stroke) / p[_P_I_STROKE]
    tau_rd = -p[_P_RD_COEFF] * abs(dpsi) * dpsi
    tau_couple = p[_P_I_COUPLE] * math.cos(psi) * ddphi
    ddpsi = (-p[_P_K_FLEX] * (psi - p[_P_PSI_BIAS]) + tau_pitch + tau_rd + tau_couple) / p[_P_I_PITCH]
    return ddphi, ddpsi


@njit(cache=True, nogil=True)
def _run(y, t0, n_steps, dt, p, out):
    """Integrate n_steps from state y=(phi,dphi,psi,dpsi) at absolute time
    t0, recording state and loads each step into out (n_steps+1 rows).

    Returns (status, rows_written): rows_written counts valid rows even on
    abort so callers can dump the last state.
    """
    phi, dphi, psi, dpsi = y[0], y[1], y[2], y[3]
    stop_loss = 0.0
    for i in range(n_steps + 1):
        t = t0 + i * dt
        lift, drag, tau_stroke, _ = _aero_terms(dphi, psi, p)
        v = _voltage(t, p)
        tau_drive = p[_P_K_T] * v / p[_P_R_COIL]
        out[i, 0] = t
        out[i, 1] = phi
        out[i, 2] = dphi
        out[i, 3] = psi
        out[i, 4] = dpsi
        out[i, 5] = lift
        out[i, 6] = drag
        out[i, 7] = tau_drive
        out[i, 8] = v * v / p[_P_R_COIL] + tau_drive * dphi
        out[i, 9] = abs(tau_stroke * dphi)
        out[i, 10] = stop_loss
        if i == n_steps:
            break

        k1p, k1q = _accels(t, phi, dphi, psi, dpsi, p)
        h = 0.5 * dt
        k2p, k2q = _accels(t + h, phi + h * dphi, dphi + h * k1p,
                           psi + h * dpsi, dpsi + h * k1q, p)
        k3p, k3q = _accels(t + h, phi + h * (dphi + h * k1p), dphi + h * k2p,
                           psi + h * (dpsi + h * k1q), dpsi + h * k2q, p)
        k4p, k4q = _accels(t + dt, phi + dt * (dphi + h * k2p), dphi + dt * k3p,
                           psi + dt * (dpsi + h * k2q), dpsi + dt * k3q, p)
        phi_new = phi + dt * (dphi + (dt / 6.0) * (k1p + k2p + k3p))
        dphi_new = dphi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        psi_new = psi + dt * (dpsi + (dt / 6.0) * (k1q + k2q + k3q))
        dpsi_new = dpsi + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)

        if p[_P_STOPS_ON] != 0.0:
            rest = p[_P_RESTITUTION]
            if psi_new > p[_P_STOP_POS]:
                psi_new = p[_P_STOP_POS]
                if dpsi_new > 0.0:
                    stop_loss += 0.5 * p[_P_I_PITCH] * dpsi_new * dpsi_new * (1.0 - rest * rest)
                    dpsi_new = -rest * dpsi_new
            elif psi_new < -p[_P_STOP_NEG]:
                psi_new = -p[_P_STOP_NEG]
                if dpsi_new < 0.0:
                    stop_loss += 0.5 * p[_P_I_PITCH] * dpsi_new * dpsi_new * (1.0 - rest * rest)
                    dpsi_new = -rest * dpsi_new

        if not (math.isfinite(phi_new) and math.isfinite(dphi_new)
                and math.isfinite(psi_new) and math.isfinite(dpsi_new)):
            return STATUS_NAN, i + 1
        if abs(phi_new) > STROKE_GUARD:
            return STATUS_GUARD, i + 1
        phi, dphi, psi, dpsi = phi_new, dphi_new, psi_new, dpsi_new

    y[0], y[1], y[2], y[3] = phi, dphi, psi, dpsi
    return STATUS_OK, n_steps + 1


def _run_chunk(cfg: SimConfig, y: np.ndarray, t0: float, n_steps: int) -> np.ndarray:
    out = np.empty((n_steps + 1, _N_COLS))
    status, rows = _run(y, t0, n_steps, cfg.dt, cfg.params(), out)
    if status != STATUS_OK:
        last = out[max(rows - 1, 0)]
        state = SimState(last[0], last[1], last[2], last[3], last[4])
        reason = "NaN in state" if status == STATUS_NAN else "stroke exceeded +/-90 deg guard"
        raise SimulationDivergedError(
            f"simulation diverged at t={last[0]:.6e} s ({reason})", last_state=state
        )
    return out


@dataclass
class SimResult:
    config: SimConfig
    data: np.ndarray  # rows x _N_COLS, columns per COLUMNS (+ stop loss)
    summary: dict

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    @property
    def stop_losses(self) -> np.ndarray:
        return self.data[:, _C_STOP_LOSS]


def step(state: SimState, cfg: SimConfig) -> SimState:
    """Advance one RK4 step (with stop projection) from an explicit state."""
    y = np.array([state.stroke_angle, state.stroke_rate,
                  state.pitch_angle, state.pitch_rate])
    _run_chunk(cfg, y, state.time, 1)
    return SimState(state.time + cfg.dt, y[0], y[1], y[2], y[3])


def _cycle_amplitudes(chunk: np.ndarray, steps_per_cycle: int) -> np.ndarray:
    n_cycles = (chunk.shape[0] - 1) // steps_per_cycle
    phi = chunk[: n_cycles * steps_per_cycle, 1]
    return np.abs(phi.reshape(n_cycles, steps_per_cycle)).max(axis=1)


def simulate(cfg: SimConfig, n_cycles: int, initial: SimState | None = None) -> SimResult:
    """Run n_cycles of the coupled model and summarise the steady state."""
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    spc = cfg.steps_per_cycle
    y = np.zeros(4)
    t0 = 0.0
    if initial is not None:
        y[:] = (initial.stroke_angle, initial.stroke_rate,
                initial.pitch_angle, initial.pitch_rate)
        t0 = initial.time
    data = _run_chunk(cfg, y, t0, n_cycles * spc)
    return SimResult(cfg, data, _summarise(cfg, data))


def _summarise(cfg: SimConfig, data: np.ndarray) -> dict:
    spc = cfg.steps_per_cycle
    amps = _cycle_amplitudes(data, spc)
    n_cycles = amps.size
    window = 10
    settled = False
    settle_cycle = None
    for n in range(window, n_cycles):
        if amps[n] > 0 and abs(amps[n] - amps[n - window]) < 0.005 * amps[n]:
            settled = True
            settle_cycle = n
            break
    period = 1.0 / cfg.drive.frequency
    last = data[-(spc + 1):]
    t, phi, dphi = last[:, 0], last[:, 1], last[:, 2]
    psi = last[:, 3]
    amplitude = float(amps[-1]) if n_cycles else float(np.max(np.abs(data[:, 1])))

    # pitch behaviour over the last cycle
    i_max, i_min = int(np.argmax(psi)), int(np.argmin(psi))
    stroke_extreme_idx = [int(np.argmax(phi)), int(np.argmin(phi))]
    pitch_at_extremes = float(max(abs(psi[i]) for i in stroke_extreme_idx))

    # energy audit over the last full cycle
    e_elec = float(np.trapezoid(last[:, 8], t))
    e_joule = float(np.trapezoid(_voltage_array(cfg, t) ** 2 / cfg.coil_resistance, t))
    e_aero = float(np.trapezoid(last[:, 9], t))
    e_visc = float(np.trapezoid(cfg.oscillator.damping * dphi**2, t))
    e_stop = float(last[-1, _C_STOP_LOSS] - last[0, _C_STOP_LOSS])
    residual = e_elec - (e_joule + e_aero + e_visc + e_stop)

    f0 = math.sqrt(cfg.oscillator.stiffness / cfg.oscillator.inertia) / (2.0 * math.pi)
    mgf = 9.80665e-6  # N per mg-force
    mean_lift = float(np.trapezoid(last[:, 5], t) / period)
    return {
        "cycles": int(n_cycles),
        "settled": bool(settled),
        "settle_cycle": settle_cycle,
        "stroke_amplitude_rad": amplitude,
        "stroke_amplitude_deg": math.degrees(amplitude),
        "pitch_max_deg": math.degrees(float(psi[i_max])),
        "pitch_min_deg": math.degrees(float(psi[i_min])),
        "pitch_at_stroke_extremes_deg": math.degrees(pitch_at_extremes),
        "stroke_angle_at_pitch_max_deg": math.degrees(float(phi[i_max])),
        "stroke_angle_at_pitch_min_deg": math.degrees(float(phi[i_min])),
        "drive_frequency_hz": cfg.drive.frequency,
        "linear_resonance_hz": f0,
        "detuning": cfg.drive.frequency / f0,
        "mean_lift_N": mean_lift,
        "mean_lift_mgf": mean_lift / mgf,
        "mean_aero_power_W": float(np.trapezoid(last[:, 9], t) / period),
        "mean_electrical_power_W": float(np.trapezoid(last[:, 8], t) / period),
        "joule_power_W": cfg.drive.v_rms**2 / cfg.coil_resistance,
        "energy_audit": {
            "electrical_in_J": e_elec,
            "joule_J": e_joule,
            "aero_work_J": e_aero,
            "viscous_J": e_visc,
            "stop_losses_J": e_stop,
            "relative_residual": residual / e_elec if e_elec else 0.0,
        },
    }


def _voltage_array(cfg: SimConfig, t: np.ndarray) -> np.ndarray:
    if cfg.drive.waveform == "square":
        frac = (t * cfg.drive.frequency) % 1.0
        return np.where(frac < 0.5, cfg.drive.amplitude, -cfg.drive.amplitude)
    return cfg.drive.amplitude * np.sin(2.0 * math.pi * cfg.drive.frequency * t)


def steady_state_amplitude(cfg: SimConfig, settle_tol: float = 0.005,
                           settle_window: int = 10, max_cycles: int = 400,
                           chunk_cycles: int = 20) -> tuple[float, bool, SimState]:
    """Run until the per-cycle stroke amplitude drifts less than settle_tol
    over settle_window cycles; returns (amplitude, settled, final state)."""
    spc = cfg.steps_per_cycle
    y = np.zeros(4)
    t0 = 0.0
    amps: list[float] = []
    while len(amps) < max_cycles:
        chunk = _run_chunk(cfg, y, t0, chunk_cycles * spc)
        t0 = float(chunk[-1, 0])
        amps.extend(_cycle_amplitudes(chunk, spc).tolist())
        if len(amps) > settle_window:
            a_now = amps[-1]
            a_then = amps[-1 - settle_window]
            if a_now > 0 and abs(a_now - a_then) < settle_tol * a_now:
                state = SimState(t0, y[0], y[1], y[2], y[3])
                tail = amps[-min(5, settle_window):]
                return float(np.mean(tail)), True, state
            if a_now == 0.0 and a_then == 0.0:
                return 0.0, True, SimState(t0, y[0], y[1], y[2], y[3])
    state = SimState(t0, y[0], y[1], y[2], y[3])
    return float(amps[-1]), False, state


def frequency_sweep(cfg: SimConfig, f_min: float, f_max: float, n_points: int,
                    settle_tol: float = 0.005, max_cycles: int = 400,
                    max_workers: int | None = None) -> list[dict]:
    """Steady-state stroke amplitude, mean lift and powers across a
    frequency grid. Points are independent cold-start runs, so parallel and
    serial execution produce identical output (ordered by frequency)."""
    if not (f_min < f_max) or n_points < 2:
        raise ValueError("need f_min < f_max and at least two points")
    freqs = np.linspace(f_min, f_max, n_points)

    def run_point(f: float) -> dict:
        point_cfg = cfg.with_drive_frequency(float(f))
        out = {"frequency_hz": float(f), "amplitude_rad": math.nan,
               "amplitude_deg": math.nan, "mean_lift_N": math.nan,
               "mean_lift_mgf": math.nan, "mean_electrical_power_W": math.nan,
               "mean_aero_power_W": math.nan, "settled": False, "error": ""}
        try:
            amp, settled, state = steady_state_amplitude(
                point_cfg, settle_tol=settle_tol, max_cycles=max_cycles)
            measured = simulate(point_cfg, 2, initial=state)
            out.update({
                "amplitude_rad": amp,
                "amplitude_deg": math.degrees(amp),
                "mean_lift_N": measured.summary["mean_lift_N"],
                "mean_lift_mgf": measured.summary["mean_lift_mgf"],
                "mean_electrical_power_W": measured.summary["mean_electrical_power_W"],
                "mean_aero_power_W": measured.summary["mean_aero_power_W"],
                "settled": settled,
            })
            if not settled:
                out["error"] = "did not settle"
        except SimulationDivergedError as exc:
            out["error"] = str(exc)
        return out

    if max_workers is None or max_workers <= 1:
        return [run_point(f) for f in freqs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run_point, freqs))


def find_resonance(cfg: SimConfig, bracket: tuple[float, float],
                   tol_hz: float = 0.1, settle_tol: float = 1e-3,
                   coarse_points: int = 7, max_cycles: int = 600) -> Quantity:
    """Locate the steady-amplitude peak inside the bracket.

    A coarse scan verifies the maximum is interior, then golden-section
    refinement narrows it to tol_hz.
    """
    f_lo, f_hi = bracket
    if not f_lo < f_hi:
        raise ValueError("bracket must satisfy f_lo < f_hi")

    cache: dict[float, float] = {}

    def amp(f: float) -> float:
        if f not in cache:
            a, _, _ = steady_state_amplitude(
                cfg.with_drive_frequency(f), settle_tol=settle_tol,
                max_cycles=max_cycles)
            cache[f] = a
        return cache[f]

    grid = np.linspace(f_lo, f_hi, coarse_points)
    values = [amp(float(f)) for f in grid]
    k = int(np.argmax(values))
    if k == 0 or k == coarse_points - 1:
        raise BracketError(
            f"no interior amplitude maximum in [{f_lo:g}, {f_hi:g}] Hz "
            f"(peak at {grid[k]:g} Hz)"
        )
    a, b = float(grid[k - 1]), float(grid[k + 1])
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = amp(c), amp(d)
    while b - a > tol_hz:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = amp(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = amp(d)
    return Quantity(0.5 * (a + b), "frequency")
