import math

import numpy as np
import pytest

from flapkit.aero import (
    AeroConfig,
    AeroState,
    blade_element_loads,
    blade_moments,
    cycle_average,
    fold_alpha,
    force_coefficients,
    rotational_pitch_drag,
)
from flapkit.wing import WingSpec

CFG = AeroConfig()
WING = WingSpec(length=3.5e-3, aspect_ratio=3.0, mass=0.02e-6)


class TestForceCoefficients:
    def test_forty_five_degrees(self):
        c = force_coefficients(math.radians(45), CFG)
        assert c["CL"] == pytest.approx(1.804561439744441, rel=1e-12)
        assert c["CD"] == pytest.approx(1.7037459200785054, rel=1e-12)

    def test_zero_angle_near_zero_lift(self):
        c = force_coefficients(0.0, CFG)
        assert c["CL"] == pytest.approx(0.026973490968399266, rel=1e-12)
        assert abs(c["CL"]) < 0.05

    def test_lift_odd_drag_even(self):
        plus = force_coefficients(math.radians(30), CFG)
        minus = force_coefficients(math.radians(-30), CFG)
        assert minus["CL"] == pytest.approx(-plus["CL"], rel=1e-12)
        assert minus["CD"] == pytest.approx(plus["CD"], rel=1e-12)

    def test_fold_beyond_ninety(self):
        # a plate at 135 deg is the 45 deg plate with lift mirrored
        c135 = force_coefficients(math.radians(135), CFG)
        c45 = force_coefficients(math.radians(45), CFG)
        assert c135["CL"] == pytest.approx(-c45["CL"], rel=1e-12)
        assert c135["CD"] == pytest.approx(c45["CD"], rel=1e-12)

    def test_fold_alpha_range(self):
        for deg in (-170, -95, -45, 0, 30, 90, 120, 250):
            a_eff, sign = fold_alpha(math.radians(deg))
            assert 0.0 <= a_eff <= math.pi / 2 + 1e-12
            assert sign in (1.0, -1.0)

    def test_coefficient_validation(self):
        with pytest.raises(ValueError):
            AeroConfig(air_density=0.0)
        with pytest.raises(ValueError):
            AeroConfig(cd_coeffs=(0.0, -3.0, 2.04, -9.82))  # CD would go negative


def _loads_oracle(state, wing, cfg):
    """Independent blade-element summation: explicit per-element loop."""
    n = cfg.n_blade_elements
    dr = wing.length / n
    chord = wing.mean_chord
    s = 1.0 if state.stroke_rate > 0 else -1.0
    alpha = math.pi / 2 - s * state.pitch_angle
    sign = 1.0
    if alpha > math.pi / 2:
        alpha = math.pi - alpha
        sign = -1.0
    adeg = math.degrees(alpha)
    cl = 0.225 + 1.58 * math.sin(math.radians(2.13 * adeg - 7.2))
    cd = 1.92 - 1.55 * math.cos(math.radians(2.04 * adeg - 9.82))
    lift = drag = tau_s = normal = 0.0
    for i in range(n):
        r = (i + 0.5) * dr
        q = 0.5 * cfg.air_density * (state.stroke_rate * r) ** 2 * chord * dr
        lift += sign * cl * q
        drag += -s * cd * q
        tau_s += -s * cd * q * r
        normal += (abs(cl) * math.cos(alpha) + cd * math.sin(alpha)) * q
    return lift, drag, tau_s, s * normal * wing.cop_distance


class TestBladeElementLoads:
    def test_zero_stroke_rate_zero_loads(self):
        loads = blade_element_loads(AeroState(0.3, 0.0, 0.2, 5.0), WING, CFG)
        assert loads.lift == loads.drag == loads.stroke_torque == loads.pitch_torque == 0.0

    @pytest.mark.parametrize("rate,pitch", [
        (650.0, math.radians(45)), (-650.0, math.radians(-45)),
        (300.0, math.radians(-10)), (-120.0, math.radians(60)),
    ])
    def test_against_elementwise_oracle(self, rate, pitch):
        state = AeroState(0.0, rate, pitch, 0.0)
        loads = blade_element_loads(state, WING, CFG)
        lift, drag, tau_s, tau_p = _loads_oracle(state, WING, CFG)
        assert loads.lift == pytest.approx(lift, rel=1e-9)
        assert loads.drag == pytest.approx(drag, rel=1e-9)
        assert loads.stroke_torque == pytest.approx(tau_s, rel=1e-9)
        assert loads.pitch_torque == pytest.approx(tau_p, rel=1e-9)

    def test_quadratic_in_stroke_rate(self):
        l1 = blade_element_loads(AeroState(0, 300.0, 0.5, 0), WING, CFG)
        l2 = blade_element_loads(AeroState(0, 600.0, 0.5, 0), WING, CFG)
        assert l2.lift == pytest.approx(4 * l1.lift, rel=1e-12)
        assert l2.stroke_torque == pytest.approx(4 * l1.stroke_torque, rel=1e-12)

    def test_reversal_with_mirrored_pitch(self):
        fwd = blade_element_loads(AeroState(0, 650.0, 0.5, 0), WING, CFG)
        rev = blade_element_loads(AeroState(0, -650.0, -0.5, 0), WING, CFG)
        assert rev.lift == pytest.approx(fwd.lift, rel=1e-12)          # lift invariant
        assert rev.drag == pytest.approx(-fwd.drag, rel=1e-12)         # drag flips
        assert rev.stroke_torque == pytest.approx(-fwd.stroke_torque, rel=1e-12)
        assert rev.pitch_torque == pytest.approx(-fwd.pitch_torque, rel=1e-12)

    def test_drag_opposes_motion(self):
        fwd = blade_element_loads(AeroState(0, 650.0, 0.5, 0), WING, CFG)
        assert fwd.drag < 0 and fwd.stroke_torque < 0

    def test_pitch_torque_pushes_trailing_edge_downstream(self):
        # moving forward, the pitch torque is positive regardless of pitch sign
        assert blade_element_loads(AeroState(0, 650.0, 0.3, 0), WING, CFG).pitch_torque > 0
        assert blade_element_loads(AeroState(0, 650.0, -0.3, 0), WING, CFG).pitch_torque > 0

    def test_moment_refinement_converges(self):
        s2_20, s3_20, _ = blade_moments(WING, 20)
        s2_200, s3_200, _ = blade_moments(WING, 200)
        assert abs(s2_200 - s2_20) / s2_200 < 0.01
        assert abs(s3_200 - s3_20) / s3_200 < 0.01


class TestRotationalDrag:
    def test_opposes_pitch_rate(self):
        assert rotational_pitch_drag(800.0, WING, CFG) < 0
        assert rotational_pitch_drag(-800.0, WING, CFG) > 0

    def test_quadratic(self):
        t1 = rotational_pitch_drag(400.0, WING, CFG)
        t2 = rotational_pitch_drag(800.0, WING, CFG)
        assert t2 == pytest.approx(4 * t1, rel=1e-12)

    def test_disabled(self):
        cfg = AeroConfig(rotational_drag_coeff=0.0)
        assert rotational_pitch_drag(800.0, WING, cfg) == 0.0


class TestCycleAverage:
    def test_zero_motion(self):
        t = np.linspace(0.0, 0.02, 2001)
        zeros = np.zeros_like(t)
        out = cycle_average(t, zeros, zeros, zeros, period=0.01)
        assert out["mean_lift"] == 0.0
        assert out["mean_aero_power"] == 0.0

    def test_symmetric_half_cycles_contribute_equal_lift(self):
        period = 0.01
        t = np.linspace(0.0, period, 2001)
        rate = np.cos(2 * np.pi * t / period)
        lift = rate**2  # quadratic law: both half-strokes lift equally
        torque = -np.sign(rate) * rate**2
        full = cycle_average(t, lift, torque, rate, period)["mean_lift"]
        first = np.trapezoid(lift[:1001], t[:1001]) / (period / 2)
        second = np.trapezoid(lift[1000:], t[1000:]) / (period / 2)
        assert first == pytest.approx(second, rel=1e-9)
        assert full == pytest.approx(first, rel=1e-9)

    def test_power_non_negative(self):
        rng = np.random.default_rng(7)
        t = np.linspace(0.0, 0.01, 1001)
        torque = rng.normal(size=t.size)
        rate = rng.normal(size=t.size)
        out = cycle_average(t, rng.normal(size=t.size), torque, rate, period=0.01)
        assert out["mean_aero_power"] >= 0.0

    def test_non_integer_window_rejected(self):
        t = np.linspace(0.0, 0.0153, 1001)
        z = np.zeros_like(t)
        with pytest.raises(ValueError):
            cycle_average(t, z, z, z, period=0.01)
