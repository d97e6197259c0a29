"""Material database.

The built-in set covers the five materials the device is made of. Values
the source fixes (polyester modulus) sit alongside standard handbook
values for the rest; all of them can be overridden from the project
config so every constant that feeds a derived number stays auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    elastic_modulus: float  # Pa
    density: float  # kg/m^3
    resistivity: float | None = None  # ohm*m, conductors only

    def __post_init__(self):
        if self.elastic_modulus <= 0:
            raise ValueError(f"{self.name}: elastic_modulus must be > 0")
        if self.density <= 0:
            raise ValueError(f"{self.name}: density must be > 0")
        if self.resistivity is not None and self.resistivity <= 0:
            raise ValueError(f"{self.name}: resistivity must be > 0")


BUILTIN_MATERIALS: dict[str, MaterialSpec] = {
    # 12.7 um stainless sheet stock; 193 GPa is the usual austenitic value
    "stainless-steel": MaterialSpec("stainless-steel", 193e9, 7900.0),
    "copper": MaterialSpec("copper", 117e9, 8960.0, resistivity=1.68e-8),
    # N52 sintered NdFeB
    "ndfeb-n52": MaterialSpec("ndfeb-n52", 160e9, 7500.0),
    # 1.5 um membrane / flexure film, E = 2.5 GPa
    "polyester": MaterialSpec("polyester", 2.5e9, 1380.0),
    # 30 um unidirectional CF sheet (veins, X-frame)
    "carbon-fiber": MaterialSpec("carbon-fiber", 135e9, 1600.0),
}

_FIELDS = ("elastic_modulus", "density", "resistivity")


def get_material(name: str, overrides: dict | None = None) -> MaterialSpec:
    """Look up a material, applying per-field overrides from the config."""
    base = BUILTIN_MATERIALS.get(name)
    over = (overrides or {}).get(name)
    if base is None and over is None:
        known = ", ".join(sorted(BUILTIN_MATERIALS))
        raise ConfigError(f"unknown material {name!r} (built-ins: {known})")
    if over is None:
        return base
    bad = set(over) - set(_FIELDS)
    if bad:
        raise ConfigError(f"material {name!r}: unknown fields {sorted(bad)}")
    if base is None:
        missing = [f for f in ("elastic_modulus", "density") if f not in over]
        if missing:
            raise ConfigError(f"new material {name!r} must define {missing}")
        return MaterialSpec(name, **over)
    return replace(base, **over)
