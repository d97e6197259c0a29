"""Figure rendering for the report, simulate and sweep outputs.

Everything is written to files (PNG via the Agg backend, no display); the
delimited outputs stay the primary artifacts and each figure embeds the
config hash in its PNG metadata so reruns are traceable.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .budget import REFERENCE_MASSES_MG

_DPI = 150


def _save(fig, path: Path, config_hash: str) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"flapkit-config-hash": config_hash})
    plt.close(fig)


def save_timeseries_figure(result, path: str | Path, cycles_shown: int = 3,
                           config_hash: str = "") -> Path:
    """Stroke/pitch angles and instantaneous loads over the last few cycles."""
    path = Path(path)
    spc = result.config.steps_per_cycle
    n = min(cycles_shown * spc + 1, result.data.shape[0])
    t = result.column("t")[-n:] * 1e3
    fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax = axes[0]
    ax.plot(t, np.degrees(result.column("stroke_angle")[-n:]), label="stroke")
    ax.plot(t, np.degrees(result.column("pitch_angle")[-n:]), label="pitch")
    ax.set_ylabel("angle [deg]")
    ax.legend(loc="upper right")
    ax.grid(True, alpha=0.3)
    ax = axes[1]
    ax.plot(t, result.column("lift")[-n:] * 1e6, label="lift [uN]")
    ax.plot(t, result.column("P_aero")[-n:] * 1e6, label="aero power [uW]")
    ax.set_xlabel("time [ms]")
    ax.legend(loc="upper right")
    ax.grid(True, alpha=0.3)
    amp = result.summary["stroke_amplitude_deg"]
    fig.suptitle(f"steady state at {result.config.drive.frequency:.1f} Hz, "
                 f"stroke amplitude {amp:.1f} deg")
    fig.tight_layout()
    _save(fig, path, config_hash)
    return path


def save_sweep_figure(points: list[dict], path: str | Path, config_hash: str = "") -> Path:
    """Amplitude-vs-frequency response with the peak marked."""
    path = Path(path)
    f = np.array([p["frequency_hz"] for p in points])
    a = np.array([p["amplitude_deg"] for p in points])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(f, a, "o-", ms=3)
    if np.isfinite(a).any():
        k = int(np.nanargmax(a))
        ax.axvline(f[k], color="tab:red", ls="--", lw=1,
                   label=f"peak {f[k]:.1f} Hz, {a[k]:.1f} deg")
        ax.legend()
    ax.set_xlabel("drive frequency [Hz]")
    ax.set_ylabel("steady stroke amplitude [deg]")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path, config_hash)
    return path


def save_mass_budget_figure(budget_mg: dict, path: str | Path, config_hash: str = "") -> Path:
    """Computed component masses next to the reference device's values."""
    path = Path(path)
    names = list(REFERENCE_MASSES_MG)
    computed = [budget_mg[n] for n in names]
    reference = [REFERENCE_MASSES_MG[n] for n in names]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(x - 0.2, computed, width=0.4, label="computed")
    ax.bar(x + 0.2, reference, width=0.4, label="reference")
    ax.set_xticks(x, names)
    ax.set_ylabel("mass [mg]")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    _save(fig, path, config_hash)
    return path
