"""Mass, power, lift and efficiency bookkeeping.

Chains every computed figure against the as-built values of the reference
device (component masses, coil resistance, Joule loss, specific power,
derated lift/power expectation, electromechanical efficiency) and flags
known modelling gaps as warnings rather than silently correcting either
side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import __version__
from .actuator import CoilSpec, DriveSignal, MagnetSpec, coil_mass, coil_resistance, coil_wire_length, joule_power, magnet_mass
from .errors import FlapkitError
from .quantity import Quantity
from .spring import SpringSpec, beam_bank_stiffness, effective_inertia_from_resonance, required_stiffness, resonance_frequency
from .wing import FlexureSpec, WingSpec, flexure_stiffness

G_N_PER_KGF = 9.80665  # N per kilogram-force
MG_FORCE_N = G_N_PER_KGF * 1e-6  # N per mg-force

FRUIT_FLY_SPECIFIC_POWER_W_PER_KG = 29.0
FRUIT_FLY_MUSCLE_EFFICIENCY = 0.17

# as-built values of the reference device
REFERENCE_MASSES_MG = {
    "coil": 0.25,
    "magnet": 0.26,
    "spring": 0.15,
    "d-frame": 0.05,
    "wing": 0.02,
}
REFERENCE_NET_PRINTED_MG = 0.7
REFERENCE_RESONANCE_HZ = 132.3
REFERENCE_COIL_RESISTANCE_OHM = 1.5
REFERENCE_JOULE_LOSS_W = 3.3e-3
REFERENCE_STROKE_AMPLITUDE_DEG = 45.0
REFERENCE_PITCH_LIMITS_DEG = (30.0, -50.0)
REFERENCE_MECH_POWER_W = 23e-6
REFERENCE_LIFT_EXPECTED_MG = 0.3
REFERENCE_DESIGN_STIFFNESS_NM = 0.8e-6
REFERENCE_TARGET_STIFFNESS_NM = 0.34e-6
REFERENCE_FLEXURE_TARGET_NM = 2.8e-9
MASS_BUDGET_ROUNDING_TOL_KG = 1e-9  # 1 ug


@dataclass(frozen=True)
class MassBudget:
    entries: tuple  # of (name, mass_kg)
    net: float = None  # kg; defaults to the exact sum

    def __post_init__(self):
        total = sum(m for _, m in self.entries)
        if self.net is None:
            object.__setattr__(self, "net", total)
        elif abs(self.net - total) > MASS_BUDGET_ROUNDING_TOL_KG:
            raise FlapkitError(
                f"mass budget net {self.net * 1e6:.3f} mg differs from the component sum "
                f"{total * 1e6:.3f} mg by more than 1 ug"
            )

    def as_mg(self) -> dict:
        out = {name: m * 1e6 for name, m in self.entries}
        out["net"] = self.net * 1e6
        return out


@dataclass(frozen=True)
class DeratingFactors:
    lift_factor: float = 0.6
    power_factor: float = 1.6

    def __post_init__(self):
        for f in (self.lift_factor, self.power_factor):
            if not 0.0 < f <= 2.0:
                raise ValueError("derating factors must lie in (0, 2]")


@dataclass(frozen=True)
class PowerBudget:
    electrical_in: float  # W
    joule_loss: float  # W
    mech_out: float  # W
    lift_estimate: float  # kg-force (mass equivalent)
    derating: DeratingFactors = field(default_factory=DeratingFactors)

    def __post_init__(self):
        if self.electrical_in <= 0:
            raise ValueError("electrical input must be > 0")
        if self.mech_out > self.electrical_in:
            raise FlapkitError("invalid budget: mechanical output exceeds electrical input")

    @property
    def efficiency(self) -> float:
        return self.mech_out / self.electrical_in


def specific_power_requirement(vehicle_mass: float,
                               specific_power: float = FRUIT_FLY_SPECIFIC_POWER_W_PER_KG) -> Quantity:
    """Mechanical hover power at the fruit-fly body-mass-specific rate."""
    if vehicle_mass < 0:
        raise ValueError("mass must be >= 0")
    return Quantity(specific_power * vehicle_mass, "power")


def derated_expectation(designed_lift: float, designed_power: float,
                        derating: DeratingFactors = DeratingFactors()) -> dict:
    """Un-optimised wing shape and trajectory cost: lift comes out at 60%
    of design while mechanical power runs 1.6x."""
    return {
        "expected_lift": designed_lift * derating.lift_factor,
        "expected_power": designed_power * derating.power_factor,
    }


def efficiency(mech_out: float, electrical_in: float) -> float:
    """Electromechanical efficiency mech/electrical."""
    if electrical_in <= 0:
        raise ValueError("electrical input must be > 0")
    if mech_out < 0:
        raise ValueError("mechanical output must be >= 0")
    if mech_out > electrical_in:
        raise FlapkitError("invalid budget: mechanical output exceeds electrical input")
    return mech_out / electrical_in


def _delta(computed: float, reference: float) -> dict:
    rel = (computed - reference) / reference if reference else math.inf
    return {"computed": computed, "reference": reference, "relative_delta": rel}


def build_mass_budget(magnet: MagnetSpec, coil: CoilSpec, spring: SpringSpec,
                      wing: WingSpec, d_frame_mass: float) -> MassBudget:
    """Component masses from geometry where a geometric model exists; the
    D-frame and wing carry their measured masses."""
    return MassBudget(entries=(
        ("coil", coil_mass(coil).value),
        ("magnet", magnet_mass(magnet).value),
        ("spring", spring.mass().value),
        ("d-frame", d_frame_mass),
        ("wing", wing.mass),
    ))


def build_report(magnet: MagnetSpec, coil: CoilSpec, spring: SpringSpec,
                 wing: WingSpec, flexure: FlexureSpec, drive: DriveSignal,
                 d_frame_mass: float, oscillator_point_mass: float,
                 arc_radius: float, design_stiffness: float,
                 sim_summary: dict | None = None,
                 config_hash: str = "", target_freq: float = 130.0) -> dict:
    """Aggregate the whole design chain into one deterministic report
    document: mass budget, stiffness, resonance, flexure, power, and (when
    a simulation summary is supplied) the kinematics and lift comparison."""
    warnings: list[str] = []

    budget = build_mass_budget(magnet, coil, spring, wing, d_frame_mass)
    budget_mg = budget.as_mg()
    mass_rows = {}
    for name, ref_mg in REFERENCE_MASSES_MG.items():
        mass_rows[name] = _delta(budget_mg[name], ref_mg)
    ref_sum = sum(REFERENCE_MASSES_MG.values())
    if abs(ref_sum - REFERENCE_NET_PRINTED_MG) > 1e-12:
        warnings.append(
            f"reference mass table rounds: components sum to {ref_sum:.2f} mg but the "
            f"printed net is {REFERENCE_NET_PRINTED_MG:.1f} mg; both are reported"
        )
    coil_gap = mass_rows["coil"]["relative_delta"]
    if coil_gap < -0.05:
        warnings.append(
            f"coil mass model covers bare conductor only ({budget_mg['coil']:.3f} mg vs "
            f"{REFERENCE_MASSES_MG['coil']:.2f} mg measured); insulation and solder are unmodelled"
        )

    k_target = required_stiffness(oscillator_point_mass, arc_radius, target_freq).value
    k_beam = beam_bank_stiffness(spring).value
    stiffness_chain = {
        "target_stiffness_Nm_per_rad": _delta(k_target, REFERENCE_TARGET_STIFFNESS_NM),
        "design_stiffness_Nm_per_rad": design_stiffness,
        "analytic_beam_bank_Nm_per_rad": k_beam,
        "beam_bank_topology_factor": spring.topology_factor,
        "beam_bank_to_design_ratio": k_beam / design_stiffness,
    }
    if abs(k_beam / design_stiffness - 1.0) > 0.25:
        warnings.append(
            f"analytic beam-bank stiffness ({k_beam * 1e6:.3f} uNm) differs from the design "
            f"value ({design_stiffness * 1e6:.3f} uNm); the analytic series-bending model with "
            f"topology_factor={spring.topology_factor:g} stands in for the original "
            "FEA-optimised geometry"
        )

    bare_inertia = oscillator_point_mass * arc_radius**2
    eff_inertia = effective_inertia_from_resonance(design_stiffness, REFERENCE_RESONANCE_HZ).value
    resonance_chain = {
        "observed_resonance_hz": REFERENCE_RESONANCE_HZ,
        "bare_magnet_inertia_kgm2": bare_inertia,
        "effective_inertia_kgm2": eff_inertia,
        "added_inertia_ratio": eff_inertia / bare_inertia,
        "design_resonance_at_target_k_hz": math.sqrt(k_target / bare_inertia) / (2 * math.pi),
        "design_resonance_at_design_k_hz": math.sqrt(design_stiffness / bare_inertia) / (2 * math.pi),
    }

    k_flex = flexure_stiffness(flexure).value
    flexure_chain = {
        "stiffness_Nm_per_rad": _delta(k_flex, REFERENCE_FLEXURE_TARGET_NM),
        "total_width_um": flexure.total_width * 1e6,
        "n_parts": flexure.n_parts,
        "deflection_at_reference_torque_rad": REFERENCE_FLEXURE_TARGET_NM / k_flex,
    }

    r_coil = coil_resistance(coil).value
    p_joule = joule_power(drive, Quantity(r_coil, "resistance")).value
    designed_lift_kg = 0.5e-6  # per-wing share of the ~1 mg vehicle
    designed_power = specific_power_requirement(designed_lift_kg).value
    expect = derated_expectation(designed_lift_kg, designed_power)
    eff = efficiency(expect["expected_power"], p_joule)
    power_chain = {
        "coil_resistance_ohm": _delta(r_coil, REFERENCE_COIL_RESISTANCE_OHM),
        "coil_wire_length_mm": coil_wire_length(coil).value * 1e3,
        "joule_loss_W": _delta(p_joule, REFERENCE_JOULE_LOSS_W),
        "specific_power_W_per_kg": FRUIT_FLY_SPECIFIC_POWER_W_PER_KG,
        "designed_lift_mgf": designed_lift_kg * 1e6,
        "designed_mech_power_W": designed_power,
        "expected_lift_mgf": _delta(expect["expected_lift"] * 1e6, REFERENCE_LIFT_EXPECTED_MG),
        "expected_mech_power_W": _delta(expect["expected_power"], REFERENCE_MECH_POWER_W),
        "electromechanical_efficiency": eff,
        "fruit_fly_muscle_efficiency": FRUIT_FLY_MUSCLE_EFFICIENCY,
        "efficiency_gap_x": FRUIT_FLY_MUSCLE_EFFICIENCY / eff,
    }

    report = {
        "tool": {"name": "flapkit", "version": __version__},
        "config_hash": config_hash,
        "mass_budget_mg": budget_mg,
        "mass_budget_vs_reference": mass_rows,
        "reference_net_printed_mg": REFERENCE_NET_PRINTED_MG,
        "reference_component_sum_mg": ref_sum,
        "stiffness_chain": stiffness_chain,
        "resonance_chain": resonance_chain,
        "flexure_chain": flexure_chain,
        "power_chain": power_chain,
        "warnings": warnings,
    }

    if sim_summary:
        lift_mgf = sim_summary.get("mean_lift_mgf")
        sim_section = {
            "stroke_amplitude_deg": _delta(
                sim_summary["stroke_amplitude_deg"], REFERENCE_STROKE_AMPLITUDE_DEG),
            "pitch_max_deg": _delta(sim_summary["pitch_max_deg"], REFERENCE_PITCH_LIMITS_DEG[0]),
            "pitch_min_deg": _delta(sim_summary["pitch_min_deg"], REFERENCE_PITCH_LIMITS_DEG[1]),
            "drive_frequency_hz": sim_summary["drive_frequency_hz"],
            "detuning_vs_linear_resonance": sim_summary["detuning"],
            "settled": sim_summary["settled"],
            "mean_electrical_power_W": sim_summary["mean_electrical_power_W"],
            "mean_aero_power_W": sim_summary["mean_aero_power_W"],
            "mean_aero_power_vs_expected": _delta(
                sim_summary["mean_aero_power_W"], REFERENCE_MECH_POWER_W),
            "mean_lift_N": sim_summary["mean_lift_N"],
            "mean_lift_mgf": lift_mgf,
            "lift_band_mgf": [0.1, 1.2],
            "lift_within_band": bool(0.1 <= lift_mgf <= 1.2) if lift_mgf is not None else None,
            "lift_vs_expected_mgf": _delta(lift_mgf, REFERENCE_LIFT_EXPECTED_MG),
            "lift_vs_design_input_mN": _delta(
                sim_summary["mean_lift_N"] * 1e3, 0.01),
            "energy_audit": sim_summary["energy_audit"],
            "simulated_efficiency": sim_summary["mean_aero_power_W"]
            / sim_summary["mean_electrical_power_W"],
        }
        report["simulation"] = sim_section
        if not sim_summary["settled"]:
            warnings.append("simulation summary was taken before the stroke amplitude settled")
    return report


def render_report_text(report: dict) -> str:
    """Human-readable report: one line per tracked figure with the computed
    value, the reference, the delta and a verdict."""
    lines = [
        f"flapkit design report (config {report['config_hash'][:12] or 'n/a'})",
        "",
        "mass budget [mg]                 computed   reference      delta",
    ]

    def row(label, d, unit_scale=1.0, unit="", tol=None):
        delta = d["relative_delta"]
        verdict = ""
        if tol is not None:
            verdict = "  ok" if abs(delta) <= tol else "  CHECK"
        return (f"  {label:<28s} {d['computed'] * unit_scale:>10.4g} "
                f"{d['reference'] * unit_scale:>11.4g} {delta:>+9.1%}{verdict}{unit}")

    for name, d in report["mass_budget_vs_reference"].items():
        lines.append(row(name, d, tol=0.30))
    lines.append(f"  {'net (computed sum)':<28s} {report['mass_budget_mg']['net']:>10.4g}")
    lines.append(f"  {'net (reference, printed)':<28s} {'':>10s} {report['reference_net_printed_mg']:>11.4g}")
    lines.append("")
    lines.append("stiffness chain")
    lines.append(row("target k [uNm/rad]",
                     _scale(report["stiffness_chain"]["target_stiffness_Nm_per_rad"], 1e6), tol=0.015))
    lines.append(f"  {'design k [uNm/rad]':<28s} {report['stiffness_chain']['design_stiffness_Nm_per_rad'] * 1e6:>10.4g}")
    lines.append(f"  {'analytic beam bank [uNm/rad]':<28s} {report['stiffness_chain']['analytic_beam_bank_Nm_per_rad'] * 1e6:>10.4g}"
                 f"   (topology factor {report['stiffness_chain']['beam_bank_topology_factor']:g})")
    lines.append("")
    lines.append("resonance chain")
    rc = report["resonance_chain"]
    lines.append(f"  {'observed resonance [Hz]':<28s} {rc['observed_resonance_hz']:>10.4g}")
    lines.append(f"  {'effective inertia [kg m^2]':<28s} {rc['effective_inertia_kgm2']:>10.4g}"
                 f"   ({rc['added_inertia_ratio']:.2f}x bare magnet)")
    lines.append(f"  {'f at target k, bare I [Hz]':<28s} {rc['design_resonance_at_target_k_hz']:>10.4g}")
    lines.append("")
    lines.append("flexure chain")
    lines.append(row("k_flex [nNm/rad]", _scale(report["flexure_chain"]["stiffness_Nm_per_rad"], 1e9), tol=0.03))
    lines.append(f"  {'total width [um]':<28s} {report['flexure_chain']['total_width_um']:>10.4g}")
    lines.append("")
    lines.append("power chain")
    pc = report["power_chain"]
    lines.append(row("coil resistance [ohm]", pc["coil_resistance_ohm"], tol=0.15))
    lines.append(row("joule loss [mW]", _scale(pc["joule_loss_W"], 1e3), tol=0.02))
    lines.append(row("expected lift [mg]", pc["expected_lift_mgf"], tol=0.01))
    lines.append(row("expected mech power [uW]", _scale(pc["expected_mech_power_W"], 1e6), tol=0.02))
    lines.append(f"  {'efficiency':<28s} {pc['electromechanical_efficiency']:>10.2%}"
                 f"   (insect muscle {pc['fruit_fly_muscle_efficiency']:.0%}, "
                 f"{pc['efficiency_gap_x']:.0f}x gap)")
    if "simulation" in report:
        lines.append("")
        lines.append("simulation")
        sm = report["simulation"]
        lines.append(row("stroke amplitude [deg]", sm["stroke_amplitude_deg"], tol=0.025))
        lines.append(row("pitch max [deg]", sm["pitch_max_deg"], tol=0.05))
        lines.append(row("pitch min [deg]", sm["pitch_min_deg"], tol=0.05))
        band = sm["lift_band_mgf"]
        lines.append(f"  {'cycle-mean lift [mgf]':<28s} {sm['mean_lift_mgf']:>10.4g}"
                     f"   band [{band[0]:g}, {band[1]:g}]: "
                     f"{'inside' if sm['lift_within_band'] else 'OUTSIDE'}")
        lines.append(f"  {'vs expected 0.3 mg':<28s} {sm['lift_vs_expected_mgf']['relative_delta']:>+10.1%}")
        lines.append(f"  {'vs design input 0.01 mN':<28s} {sm['lift_vs_design_input_mN']['relative_delta']:>+10.1%}")
        lines.append(f"  {'mean aero power [uW]':<28s} {sm['mean_aero_power_W'] * 1e6:>10.4g}")
        lines.append(f"  {'energy audit residual':<28s} {sm['energy_audit']['relative_residual']:>+10.2%}")
    if report["warnings"]:
        lines.append("")
        lines.append("warnings")
        for w in report["warnings"]:
            lines.append(f"  - {w}")
    lines.append("")
    return "\n".join(lines)


def _scale(delta_row: dict, factor: float) -> dict:
    return {
        "computed": delta_row["computed"] * factor,
        "reference": delta_row["reference"] * factor,
        "relative_delta": delta_row["relative_delta"],
    }


def report_to_json(report: dict) -> str:
    """Canonical serialisation; byte-identical for identical inputs."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
