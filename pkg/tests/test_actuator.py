import math

import pytest

from flapkit import dynamics
from flapkit.actuator import (
    CoilSpec,
    DriveSignal,
    MagnetSpec,
    TorqueConstant,
    calibrate_torque_constant,
    coil_mass,
    coil_resistance,
    coil_wire_length,
    drive_torque,
    joule_power,
    magnet_coil_clearance,
    magnet_mass,
)
from flapkit.errors import DimensionError
from flapkit.materials import get_material
from flapkit.quantity import Quantity
from flapkit.spring import OscillatorSpec
from flapkit.wing import FlexureSpec, WingSpec

COPPER = get_material("copper")
N52 = get_material("ndfeb-n52")


def paper_magnet():
    return MagnetSpec(height=0.5e-3, diameter=0.3e-3, material=N52)


def paper_coil():
    return CoilSpec(wire_diameter=25e-6, layers=2, turns_per_layer=14,
                    inner_diameter=0.45e-3, height=0.45e-3, material=COPPER)


class TestMagnetMass:
    def test_against_cylinder_oracle(self):
        # pi * (0.15 mm)^2 * 0.5 mm * 7500 kg/m^3, evaluated by hand
        assert magnet_mass(paper_magnet()).value == pytest.approx(2.650718801466388e-07, rel=1e-12)

    def test_matches_measured_mass_within_three_percent(self):
        computed_mg = magnet_mass(paper_magnet()).value * 1e6
        assert abs(computed_mg - 0.26) / 0.26 < 0.03

    def test_degenerate_diameter(self):
        tiny = MagnetSpec(height=0.5e-3, diameter=1e-9, material=N52)
        assert magnet_mass(tiny).value < 1e-17

    def test_linear_in_density(self):
        heavy = MagnetSpec(0.5e-3, 0.3e-3, get_material(
            "ndfeb-n52", {"ndfeb-n52": {"density": 15000.0}}))
        assert magnet_mass(heavy).value == pytest.approx(2 * magnet_mass(paper_magnet()).value)

    def test_monotone_in_geometry(self):
        base = magnet_mass(paper_magnet()).value
        assert magnet_mass(MagnetSpec(0.6e-3, 0.3e-3, N52)).value > base
        assert magnet_mass(MagnetSpec(0.5e-3, 0.4e-3, N52)).value > base


class TestCoilWireLength:
    def test_against_per_turn_oracle(self):
        spec = paper_coil()
        total = 0.0
        for layer in range(spec.layers):
            mean_dia = spec.inner_diameter + (2 * layer + 1) * spec.wire_diameter
            for _ in range(spec.turns_per_layer):
                total += math.pi * mean_dia
        assert coil_wire_length(spec).value == pytest.approx(total, rel=1e-12)

    def test_paper_coil_is_about_44_mm(self):
        assert coil_wire_length(paper_coil()).value == pytest.approx(44e-3, rel=0.01)

    def test_single_turn_thin_wire(self):
        spec = CoilSpec(1e-9, 1, 1, 1e-3, 1e-3, COPPER)
        assert coil_wire_length(spec).value == pytest.approx(math.pi * 1e-3, rel=1e-6)

    def test_doubling_turns_doubles_length(self):
        tall = CoilSpec(25e-6, 2, 28, 0.45e-3, 0.9e-3, COPPER)
        assert coil_wire_length(tall).value == pytest.approx(
            2 * coil_wire_length(paper_coil()).value)


class TestCoilResistance:
    def test_lands_near_measured(self):
        r = coil_resistance(paper_coil()).value
        assert 1.3 <= r <= 1.7
        assert r == pytest.approx(1.50528, rel=1e-6)

    def test_algebraically_consistent_with_wire_length(self):
        spec = paper_coil()
        r = coil_resistance(spec).value
        area = math.pi * (spec.wire_diameter / 2) ** 2
        back = r * area / spec.material.resistivity
        assert back == pytest.approx(coil_wire_length(spec).value, rel=1e-12)

    def test_resistance_per_length_quadruples_at_half_diameter(self):
        fat, thin = paper_coil(), CoilSpec(12.5e-6, 2, 14, 0.45e-3, 0.45e-3, COPPER)
        per_len_fat = coil_resistance(fat).value / coil_wire_length(fat).value
        per_len_thin = coil_resistance(thin).value / coil_wire_length(thin).value
        assert per_len_thin == pytest.approx(4 * per_len_fat, rel=1e-12)

    def test_requires_conductor(self):
        insulator = CoilSpec(25e-6, 2, 14, 0.45e-3, 0.45e-3, get_material("polyester"))
        with pytest.raises(DimensionError):
            coil_resistance(insulator)


class TestCoilMass:
    def test_undershoots_measured_mass(self):
        # bare conductor only: 0.193 mg vs 0.25 mg weighed
        m_mg = coil_mass(paper_coil()).value * 1e6
        assert m_mg == pytest.approx(0.19344424626135148, rel=1e-9)
        assert m_mg < 0.25

    def test_scales_linearly_with_turns(self):
        tall = CoilSpec(25e-6, 2, 28, 0.45e-3, 0.9e-3, COPPER)
        assert coil_mass(tall).value == pytest.approx(2 * coil_mass(paper_coil()).value)


def test_magnet_coil_clearance_positive():
    gap = magnet_coil_clearance(paper_magnet(), paper_coil())
    assert gap.value == pytest.approx((0.45e-3 - 0.3e-3) / 2)
    assert gap.value > 0


class TestJoulePower:
    def test_square_wave_reference_point(self):
        p = joule_power(DriveSignal("square", 0.07, 132.3), Quantity(1.5, "resistance"))
        assert p.value == pytest.approx(0.0032666666666666673, rel=1e-12)
        # within 2% of the 3.3 mW figure
        assert abs(p.value - 3.3e-3) / 3.3e-3 < 0.02

    def test_zero_drive(self):
        assert joule_power(DriveSignal("square", 0.0, 100.0), Quantity(2.0, "resistance")).value == 0.0

    def test_quadratic_in_voltage(self):
        p1 = joule_power(DriveSignal("square", 0.07, 100.0), Quantity(1.5, "resistance")).value
        p2 = joule_power(DriveSignal("square", 0.14, 100.0), Quantity(1.5, "resistance")).value
        assert p2 == pytest.approx(4 * p1, rel=1e-12)

    def test_sine_rms(self):
        p = joule_power(DriveSignal("sine", 0.07, 100.0), Quantity(1.5, "resistance"))
        assert p.value == pytest.approx(0.07**2 / 2 / 1.5, rel=1e-12)


class TestDriveTorque:
    def test_reference_point(self):
        tau = drive_torque(DriveSignal("square", 0.07, 100.0), TorqueConstant(1e-5),
                           Quantity(1.5, "resistance"), t=0.001)
        assert tau.value == pytest.approx(1e-5 * 0.07 / 1.5, rel=1e-12)

    def test_zero_voltage(self):
        tau = drive_torque(DriveSignal("sine", 0.07, 100.0), TorqueConstant(1e-5),
                           Quantity(1.5, "resistance"), t=0.0)
        assert tau.value == 0.0

    def test_sign_follows_waveform(self):
        sig = DriveSignal("square", 0.07, 100.0)
        r = Quantity(1.5, "resistance")
        early = drive_torque(sig, TorqueConstant(1e-5), r, t=0.001).value
        late = drive_torque(sig, TorqueConstant(1e-5), r, t=0.006).value
        assert early > 0 > late
        assert late == pytest.approx(-early, rel=1e-12)


def _linear_test_config():
    """No aero, light viscous damping, off-resonance sine drive: the steady
    amplitude is exactly linear in the torque constant."""
    k, inertia = 0.8e-6, 1.1577387296026948e-12
    c = 0.05 * 2 * math.sqrt(k * inertia)
    osc = OscillatorSpec(stiffness=k, inertia=inertia, arc_radius=1.4e-3,
                         point_mass=0.26e-6, damping=c)
    f0 = math.sqrt(k / inertia) / (2 * math.pi)
    drive = DriveSignal("sine", 0.07, 0.6 * f0)
    wing = WingSpec(3.5e-3, 3.0, 0.02e-6)
    flexure = FlexureSpec(390e-6, 100e-6, 1.5e-6, 3, get_material("polyester"))
    return dynamics.SimConfig(oscillator=osc, wing=wing, flexure=flexure, drive=drive,
                              k_t=TorqueConstant(1e-8), coil_resistance=1.5,
                              dt=1.0 / (1000 * drive.frequency), aero=None, stops=None)


class TestCalibration:
    def test_linear_regime_doubles_k_t_for_double_amplitude(self):
        cfg = _linear_test_config()
        k1 = calibrate_torque_constant(math.radians(1.0), cfg, rel_tol=0.002)
        k2 = calibrate_torque_constant(math.radians(2.0), cfg, rel_tol=0.002)
        assert k2.k_t == pytest.approx(2 * k1.k_t, rel=0.02)

    def test_self_consistency(self, calibrated_cfg):
        amp, settled, _ = dynamics.steady_state_amplitude(calibrated_cfg)
        assert settled
        assert amp == pytest.approx(math.radians(45.0), rel=0.01)

    def test_zero_target_rejected(self):
        with pytest.raises(ValueError):
            calibrate_torque_constant(0.0, _linear_test_config())


def test_waveform_validation():
    with pytest.raises(ValueError):
        DriveSignal("triangle", 0.07, 100.0)
    with pytest.raises(ValueError):
        DriveSignal("square", -0.1, 100.0)
    with pytest.raises(ValueError):
        DriveSignal("square", 0.1, 0.0)


def test_coil_height_must_fit_turns():
    with pytest.raises(ValueError):
        CoilSpec(25e-6, 2, 14, 0.45e-3, 0.3e-3, COPPER)
