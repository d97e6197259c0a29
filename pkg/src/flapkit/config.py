"""Project configuration: schema-validated JSON with mandatory unit
suffixes on every dimensioned value ("0.3mm", "70mV", "0.8uNm").

Unknown keys are rejected with the full dotted path; quantities are parsed
against the dimension each field expects, so a bare number where a unit is
required (or a wrong unit) is a config error, not a silent misread. The
resolved configuration (defaults filled, everything in SI) is hashed and
the hash is embedded in every output file for provenance.

The bundled reference configuration lives at data/paper.json and encodes
the as-built device; it is the canonical regression fixture.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import actuator, dynamics
from .actuator import CoilSpec, DriveSignal, MagnetSpec, TorqueConstant
from .aero import DEFAULT_CD_COEFFS, DEFAULT_CL_COEFFS, AeroConfig
from .errors import ConfigError
from .materials import get_material
from .quantity import parse_quantity
from .spring import OscillatorSpec, SpringDesignConstraints, SpringSpec, effective_inertia_from_resonance
from .wing import FlexureSpec, PitchStopSpec, WingSpec

REQUIRED = object()


def _qty(dim, default=REQUIRED):
    return ("qty", dim, default)


def _num(default=REQUIRED):
    return ("num", None, default)


def _int(default=REQUIRED):
    return ("int", None, default)


def _bool(default=REQUIRED):
    return ("bool", None, default)


def _str(default=REQUIRED):
    return ("str", None, default)


def _enum(options, default=REQUIRED):
    return ("enum", options, default)


def _numlist(n, default=REQUIRED):
    return ("numlist", n, default)


def _qtylist(dim, n, default=REQUIRED):
    return ("qtylist", (dim, n), default)


def _intlist(n, default=REQUIRED):
    return ("intlist", n, default)


SCHEMA = {
    "magnet": {
        "height": _qty("length"),
        "diameter": _qty("length"),
        "material": _str("ndfeb-n52"),
    },
    "coil": {
        "wire_diameter": _qty("length"),
        "layers": _int(),
        "turns_per_layer": _int(),
        "inner_diameter": _qty("length"),
        "height": _qty("length"),
        "material": _str("copper"),
    },
    "spring": {
        "n_beams": _int(),
        "beam_length": _qty("length"),
        "beam_width": _qty("length"),
        "beam_thickness": _qty("length"),
        "material": _str("stainless-steel"),
        "topology_factor": _num(1.0),
        "design_stiffness": _qty("stiffness"),
    },
    "spring_design": {
        "length_bounds": _qtylist("length", 2, (0.25e-3, 3e-3)),
        "width_bounds": _qtylist("length", 2, None),  # None: pin to spring.beam_width
        "n_beams_bounds": _intlist(2, (1, 32)),
    },
    "wing": {
        "length": _qty("length"),
        "aspect_ratio": _num(),
        "mass": _qty("mass"),
        "n_veins": _int(5),
        "vein_width": _qty("length", 30e-6),
        "membrane_thickness": _qty("length", 1.5e-6),
        "adhesive_thickness": _qty("length", 18e-6),
        "cop_distance": _qty("length", 0.4e-3),
        "le_mass_fraction": _num(0.0),
    },
    "flexure": {
        "total_width": _qty("length"),
        "length": _qty("length"),
        "thickness": _qty("length"),
        "n_parts": _int(3),
        "material": _str("polyester"),
    },
    "stops": {
        "enabled": _bool(True),
        "positive_limit": _qty("angle", math.radians(30.0)),
        "negative_limit": _qty("angle", math.radians(50.0)),
        "restitution": _num(0.0),
    },
    "aero": {
        "enabled": _bool(True),
        "air_density": _qty("density", 1.225),
        "cl_coeffs": _numlist(4, DEFAULT_CL_COEFFS),
        "cd_coeffs": _numlist(4, DEFAULT_CD_COEFFS),
        "n_blade_elements": _int(20),
        "rotational_drag_coeff": _num(0.5),
    },
    "drive": {
        "waveform": _enum(("square", "sine"), "square"),
        "amplitude": _qty("voltage"),
        "frequency": _qty("frequency"),
    },
    "oscillator": {
        "stiffness": _qty("stiffness"),
        "inertia_mode": _enum(("from_resonance", "point_mass"), "from_resonance"),
        "observed_resonance": _qty("frequency", None),
        "point_mass": _qty("mass"),
        "arc_radius": _qty("length"),
        "extra_inertia": _qty("inertia", 0.0),
        "damping": _qty("angular_damping", 0.0),
    },
    "torque_constant": {
        "mode": _enum(("calibrate", "fixed"), "calibrate"),
        "target_stroke_amplitude": _qty("angle", math.radians(45.0)),
        "value": _qty("torque_per_current", None),
    },
    "frame": {
        "d_frame_mass": _qty("mass", 0.05e-6),
    },
    "simulation": {
        "steps_per_cycle": _int(1000),
        "cycles": _int(200),
        "settle_tolerance": _num(0.005),
        "settle_window": _int(10),
        "max_cycles": _int(400),
        "inertial_pitch_coupling": _bool(True),
        "pitch_bias": _qty("angle", 0.0),
    },
    "output": {
        "directory": _str("out"),
    },
}

_OPTIONAL_SECTIONS = {"materials", "spring_design", "stops", "aero", "torque_constant",
                      "frame", "simulation", "output", "coil_resistance"}

_MATERIAL_FIELD_DIMS = {
    "elastic_modulus": "pressure",
    "density": "density",
    "resistivity": "resistivity",
}


def _parse_leaf(kind_spec, value, path: str):
    kind, arg, _default = kind_spec
    try:
        if kind == "qty":
            if not isinstance(value, str):
                raise ConfigError(
                    f"{path}: dimensioned values must be unit-suffixed strings (got {value!r})")
            return parse_quantity(value, expect_dim=arg).value
        if kind == "num":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{path}: expected a number, got {value!r}")
            return float(value)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}: expected an integer, got {value!r}")
            return value
        if kind == "bool":
            if not isinstance(value, bool):
                raise ConfigError(f"{path}: expected true/false, got {value!r}")
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise ConfigError(f"{path}: expected a string, got {value!r}")
            return value
        if kind == "enum":
            if value not in arg:
                raise ConfigError(f"{path}: must be one of {list(arg)}, got {value!r}")
            return value
        if kind == "numlist":
            if (not isinstance(value, list) or len(value) != arg
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
                raise ConfigError(f"{path}: expected a list of {arg} numbers")
            return tuple(float(v) for v in value)
        if kind == "intlist":
            if (not isinstance(value, list) or len(value) != arg
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
                raise ConfigError(f"{path}: expected a list of {arg} integers")
            return tuple(value)
        if kind == "qtylist":
            dim, n = arg
            if not isinstance(value, list) or len(value) != n:
                raise ConfigError(f"{path}: expected a list of {n} unit-suffixed strings")
            return tuple(parse_quantity(v, expect_dim=dim).value for v in value)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raise AssertionError(f"unhandled schema kind {kind}")


def _validate_section(schema: dict, data: dict, path: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(data) - set(schema)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{path}.{key}: unknown key")
    out = {}
    for key, kind_spec in schema.items():
        default = kind_spec[2]
        if key in data:
            out[key] = _parse_leaf(kind_spec, data[key], f"{path}.{key}")
        elif default is REQUIRED:
            raise ConfigError(f"{path}.{key}: required key missing")
        else:
            out[key] = default
    return out


def _validate_materials(data, path: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object of material overrides")
    out = {}
    for name, fields in data.items():
        if not isinstance(fields, dict):
            raise ConfigError(f"{path}.{name}: expected an object")
        unknown = set(fields) - set(_MATERIAL_FIELD_DIMS)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"{path}.{name}.{key}: unknown key")
        out[name] = {
            fname: parse_quantity(fval, expect_dim=_MATERIAL_FIELD_DIMS[fname]).value
            if isinstance(fval, str)
            else _fail_material(path, name, fname, fval)
            for fname, fval in fields.items()
        }
    return out


def _fail_material(path, name, fname, value):
    raise ConfigError(
        f"{path}.{name}.{fname}: dimensioned values must be unit-suffixed strings (got {value!r})")


def validate_config(raw: dict, source: str = "config") -> dict:
    """Validate and normalise a raw JSON document into SI floats with all
    defaults applied."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be an object")
    known = set(SCHEMA) | _OPTIONAL_SECTIONS
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{source}: unknown key {sorted(unknown)[0]!r}")

    normalized: dict = {}
    for section, schema in SCHEMA.items():
        if section in raw:
            normalized[section] = _validate_section(schema, raw[section], section)
        elif section in _OPTIONAL_SECTIONS:
            normalized[section] = _validate_section(schema, {}, section)
        else:
            raise ConfigError(f"{source}: required section {section!r} missing")

    normalized["materials"] = _validate_materials(raw.get("materials", {}), "materials")

    cr = raw.get("coil_resistance", "auto")
    if cr == "auto":
        normalized["coil_resistance"] = "auto"
    elif isinstance(cr, str):
        normalized["coil_resistance"] = parse_quantity(cr, expect_dim="resistance").value
    else:
        raise ConfigError(
            f"coil_resistance: expected 'auto' or a unit-suffixed string, got {cr!r}")

    if normalized["spring_design"]["width_bounds"] is None:
        w = normalized["spring"]["beam_width"]
        normalized["spring_design"]["width_bounds"] = (w, w)
    tc = normalized["torque_constant"]
    if tc["mode"] == "fixed" and tc["value"] is None:
        raise ConfigError("torque_constant.value: required when mode is 'fixed'")
    osc = normalized["oscillator"]
    if osc["inertia_mode"] == "from_resonance" and osc["observed_resonance"] is None:
        raise ConfigError("oscillator.observed_resonance: required when inertia_mode is 'from_resonance'")
    return normalized


def config_hash(normalized: dict) -> str:
    text = json.dumps(normalized, sort_keys=True, default=list)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class ProjectConfig:
    """Validated, resolved project configuration plus the specs built from it."""

    normalized: dict
    hash: str
    source: str

    @property
    def materials(self) -> dict:
        return self.normalized["materials"]

    def material(self, name: str):
        return get_material(name, self.materials)

    def magnet(self) -> MagnetSpec:
        m = self.normalized["magnet"]
        return MagnetSpec(m["height"], m["diameter"], self.material(m["material"]))

    def coil(self) -> CoilSpec:
        c = self.normalized["coil"]
        return CoilSpec(c["wire_diameter"], c["layers"], c["turns_per_layer"],
                        c["inner_diameter"], c["height"], self.material(c["material"]))

    def spring(self) -> SpringSpec:
        s = self.normalized["spring"]
        return SpringSpec(s["n_beams"], s["beam_length"], s["beam_width"],
                          s["beam_thickness"], self.material(s["material"]),
                          s["topology_factor"])

    def spring_design_constraints(self) -> SpringDesignConstraints:
        d = self.normalized["spring_design"]
        return SpringDesignConstraints(
            thickness=self.normalized["spring"]["beam_thickness"],
            width_bounds=tuple(d["width_bounds"]),
            length_bounds=tuple(d["length_bounds"]),
            n_beams_bounds=tuple(d["n_beams_bounds"]),
            topology_factor=self.normalized["spring"]["topology_factor"],
        )

    def wing(self) -> WingSpec:
        w = self.normalized["wing"]
        return WingSpec(w["length"], w["aspect_ratio"], w["mass"], w["n_veins"],
                        w["vein_width"], w["membrane_thickness"], w["adhesive_thickness"],
                        w["cop_distance"], w["le_mass_fraction"])

    def flexure(self) -> FlexureSpec:
        f = self.normalized["flexure"]
        return FlexureSpec(f["total_width"], f["length"], f["thickness"],
                           f["n_parts"], self.material(f["material"]))

    def stops(self) -> PitchStopSpec | None:
        s = self.normalized["stops"]
        if not s["enabled"]:
            return None
        return PitchStopSpec(s["positive_limit"], s["negative_limit"], s["restitution"])

    def aero(self) -> AeroConfig | None:
        a = self.normalized["aero"]
        if not a["enabled"]:
            return None
        return AeroConfig(a["air_density"], tuple(a["cl_coeffs"]), tuple(a["cd_coeffs"]),
                          a["n_blade_elements"], a["rotational_drag_coeff"])

    def drive(self) -> DriveSignal:
        d = self.normalized["drive"]
        return DriveSignal(d["waveform"], d["amplitude"], d["frequency"])

    def oscillator(self) -> OscillatorSpec:
        o = self.normalized["oscillator"]
        if o["inertia_mode"] == "from_resonance":
            inertia = effective_inertia_from_resonance(
                o["stiffness"], o["observed_resonance"]).value
        else:
            inertia = o["point_mass"] * o["arc_radius"] ** 2 + o["extra_inertia"]
        return OscillatorSpec(o["stiffness"], inertia, o["arc_radius"],
                              o["point_mass"], o["damping"])

    def resolved_coil_resistance(self) -> float:
        cr = self.normalized["coil_resistance"]
        if cr == "auto":
            return actuator.coil_resistance(self.coil()).value
        return cr

    def sim_config(self, k_t: TorqueConstant) -> dynamics.SimConfig:
        sim = self.normalized["simulation"]
        drive = self.drive()
        return dynamics.SimConfig(
            oscillator=self.oscillator(),
            wing=self.wing(),
            flexure=self.flexure(),
            drive=drive,
            k_t=k_t,
            coil_resistance=self.resolved_coil_resistance(),
            dt=1.0 / (drive.frequency * sim["steps_per_cycle"]),
            stops=self.stops(),
            aero=self.aero(),
            pitch_bias=sim["pitch_bias"],
            inertial_pitch_coupling=sim["inertial_pitch_coupling"],
        )

    def resolve_torque_constant(self) -> TorqueConstant:
        """Fixed value from the config, or calibrate the simulator so the
        steady stroke amplitude hits the configured target."""
        tc = self.normalized["torque_constant"]
        if tc["mode"] == "fixed":
            return TorqueConstant(tc["value"])
        probe = self.sim_config(TorqueConstant(1e-9))
        return actuator.calibrate_torque_constant(tc["target_stroke_amplitude"], probe)


def load_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    normalized = validate_config(raw, source=str(path))
    return ProjectConfig(normalized, config_hash(normalized), str(path))


def reference_config_path() -> Path:
    """Filesystem path of the bundled paper.json fixture."""
    return Path(str(resources.files("flapkit").joinpath("data/paper.json")))


def load_reference_config() -> ProjectConfig:
    """The bundled paper.json fixture."""
    raw = json.loads(resources.files("flapkit").joinpath("data/paper.json").read_text())
    normalized = validate_config(raw, source="paper.json")
    return ProjectConfig(normalized, config_hash(normalized), "paper.json")
