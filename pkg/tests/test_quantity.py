import math

import pytest
from hypothesis import given, strategies as st

from flapkit.errors import DimensionError, UnitError
from flapkit.quantity import Quantity, approx_eq, convert, parse_quantity, qty


class TestApproxEq:
    def test_identity(self):
        a = qty(0.34, "uNm")
        assert approx_eq(a, qty(0.34, "uNm"), 1e-6)

    def test_three_percent_gap_fails_one_percent_tol(self):
        assert not approx_eq(qty(0.34, "uNm"), qty(0.35, "uNm"), 0.01)

    def test_joule_loss_within_one_percent(self):
        # |3.27 - 3.3| / 3.3 = 0.9%
        assert approx_eq(qty(3.27, "mW"), qty(3.3, "mW"), 0.01)

    def test_near_zero_absolute_fallback(self):
        assert approx_eq(qty(0.0, "mW"), qty(1e-19, "mW"), 1e-9)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            approx_eq(qty(1, "mW"), qty(1, "mV"), 0.1)

    def test_nonpositive_tolerance_rejected(self):
        with pytest.raises(ValueError):
            approx_eq(qty(1, "mW"), qty(1, "mW"), 0.0)


class TestConvert:
    def test_aero_torque_to_micro_newton_metre(self):
        assert convert(Quantity(2.8e-9, "torque"), "uNm") == pytest.approx(0.0028, rel=1e-12)

    def test_zero_mass(self):
        assert convert(Quantity(0.0, "mass"), "mg") == 0.0

    def test_arc_radius_to_millimetre(self):
        assert convert(Quantity(1.4e-3, "length"), "mm") == pytest.approx(1.4, rel=1e-12)

    def test_wrong_dimension_unit(self):
        with pytest.raises(UnitError):
            convert(Quantity(1.0, "mass"), "mm")

    def test_unknown_unit(self):
        with pytest.raises(UnitError):
            convert(Quantity(1.0, "mass"), "stone")


class TestParse:
    @pytest.mark.parametrize("text,dim,si", [
        ("70mV", "voltage", 0.07),
        ("0.3mm", "length", 0.3e-3),
        ("132.3Hz", "frequency", 132.3),
        ("0.8uNm", "stiffness", 0.8e-6),  # stiffness accepts torque spelling
        ("0.02mg", "mass", 2e-8),
        ("45deg", "angle", math.radians(45)),
        ("1.68e-8Ohmm", "resistivity", 1.68e-8),
    ])
    def test_parses(self, text, dim, si):
        q = parse_quantity(text, expect_dim=dim)
        assert q.dim == dim
        assert q.value == pytest.approx(si, rel=1e-12)

    def test_micro_sign_alias(self):
        assert parse_quantity("25µm", expect_dim="length").value == pytest.approx(25e-6)

    def test_malformed_unit(self):
        with pytest.raises(UnitError):
            parse_quantity("130 Hzz")

    def test_bare_number_rejected(self):
        with pytest.raises(UnitError):
            parse_quantity("130")

    def test_wrong_dimension(self):
        with pytest.raises(UnitError):
            parse_quantity("130Hz", expect_dim="mass")


class TestDimensionAlgebra:
    def test_mass_times_length_squared_is_inertia(self):
        m = qty(0.26, "mg")
        r = qty(1.4, "mm")
        inertia = m * r**2
        assert inertia.dim == "inertia"
        assert inertia.value == pytest.approx(5.096e-13, rel=1e-12)

    def test_torque_over_angle_is_stiffness(self):
        k = Quantity(0.34e-6, "torque") / Quantity(1.0, "angle")
        assert k.dim == "stiffness"

    def test_voltage_squared_over_resistance_is_power(self):
        v = qty(70, "mV")
        p = v * v / Quantity(1.5, "resistance")
        assert p.dim == "power"
        assert p.value == pytest.approx(0.0032666666666666673, rel=1e-12)

    def test_force_times_length_is_torque(self):
        t = qty(0.00707, "mN") * qty(0.4, "mm")
        assert t.dim == "torque"

    def test_unregistered_combination_rejected(self):
        with pytest.raises(DimensionError):
            qty(1, "mg") * qty(1, "mV")

    def test_mismatched_addition_rejected(self):
        with pytest.raises(DimensionError):
            qty(1, "mg") + qty(1, "mm")

    def test_scalar_scaling(self):
        assert (2 * qty(1, "mm")).value == pytest.approx(2e-3)

    def test_comparisons_same_dimension_only(self):
        assert qty(1, "mm") < qty(2, "mm")
        with pytest.raises(DimensionError):
            _ = qty(1, "mm") < qty(2, "mg")


_UNIT_CASES = [("mg", "mass"), ("mm", "length"), ("uNm", "torque"),
               ("uW", "power"), ("mV", "voltage")]


@given(value=st.floats(min_value=1e-9, max_value=1e9,
                       allow_nan=False, allow_infinity=False),
       case=st.sampled_from(_UNIT_CASES))
def test_display_round_trip(value, case):
    unit, dim = case
    q = qty(value, unit)
    assert q.dim == dim
    assert convert(q, unit) == pytest.approx(value, rel=1e-12)
