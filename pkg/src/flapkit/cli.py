"""Command-line surface: design, simulate, sweep and report workflows.

Exit codes: 0 success, 1 config/usage error, 2 infeasible design,
3 numerical failure (divergence or calibration). Every output file embeds
the resolved config hash; identical invocations write identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, budget, dynamics, plots
from .config import ProjectConfig, load_config, load_reference_config, reference_config_path
from .dynamics import COLUMNS
from .errors import (
    BracketError,
    CalibrationError,
    ConfigError,
    FlapkitError,
    InfeasibleDesignError,
    SimulationDivergedError,
    UnitError,
)
from .quantity import parse_quantity
from .spring import beam_bank_stiffness, design_spring, required_stiffness


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage errors to exit code 1
        raise ConfigError(message)


def _add_common(sub):
    sub.add_argument("--config", default=None,
                     help="project config JSON (default: bundled reference configuration)")
    sub.add_argument("--out", default=None,
                     help="output directory (default: output.directory from the config)")


def _load(args) -> ProjectConfig:
    if args.config is None:
        return load_reference_config()
    return load_config(args.config)


def _outdir(args, project: ProjectConfig) -> Path:
    out = Path(args.out) if args.out else Path(project.normalized["output"]["directory"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=list) + "\n")


def _write_csv(path: Path, header: list[str], rows, config_hash: str) -> None:
    with path.open("w", newline="") as fh:
        fh.write(f"# config_hash={config_hash}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _resolve_k_t(project: ProjectConfig):
    tc = project.normalized["torque_constant"]
    if tc["mode"] == "calibrate":
        print(f"calibrating torque constant to {math.degrees(tc['target_stroke_amplitude']):.1f} deg "
              f"stroke at {project.normalized['drive']['frequency']:g} Hz ...", flush=True)
    k_t = project.resolve_torque_constant()
    print(f"torque constant: {k_t.k_t:.6e} N*m/A")
    return k_t


def cmd_design_spring(args) -> int:
    project = _load(args)
    if (args.target_freq is None) == (args.target_stiffness is None):
        raise ConfigError("give exactly one of --target-freq or --target-stiffness")
    osc = project.normalized["oscillator"]
    if args.target_freq is not None:
        freq = parse_quantity(args.target_freq, expect_dim="frequency").value
        target = required_stiffness(osc["point_mass"], osc["arc_radius"], freq).value
        print(f"target stiffness for {freq:g} Hz with {osc['point_mass'] * 1e6:g} mg at "
              f"{osc['arc_radius'] * 1e3:g} mm: {target * 1e6:.4g} uNm/rad")
    else:
        target = parse_quantity(args.target_stiffness, expect_dim="stiffness").value
        print(f"target stiffness: {target * 1e6:.4g} uNm/rad")

    constraints = project.spring_design_constraints()
    material = project.material(project.normalized["spring"]["material"])
    try:
        spec = design_spring(target, material, constraints)
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        raise
    achieved = beam_bank_stiffness(spec).value
    result = {
        "config_hash": project.hash,
        "target_stiffness_Nm_per_rad": target,
        "achieved_stiffness_Nm_per_rad": achieved,
        "relative_error": achieved / target - 1.0,
        "spring": {
            "n_beams": spec.n_beams,
            "beam_length_m": spec.beam_length,
            "beam_width_m": spec.beam_width,
            "beam_thickness_m": spec.beam_thickness,
            "material": material.name,
            "topology_factor": spec.topology_factor,
            "mass_kg": spec.mass().value,
        },
    }
    out = _outdir(args, project)
    _write_json(out / "spring_design.json", result)
    print(f"designed: {spec.n_beams} beams, length {spec.beam_length * 1e3:.4g} mm, "
          f"width {spec.beam_width * 1e3:.4g} mm -> {achieved * 1e6:.4g} uNm/rad "
          f"({result['relative_error']:+.2%} vs target)")
    print(f"wrote {out / 'spring_design.json'}")
    return 0


def cmd_simulate(args) -> int:
    project = _load(args)
    cycles = args.cycles if args.cycles is not None else project.normalized["simulation"]["cycles"]
    if cycles < 1:
        raise ConfigError("--cycles must be >= 1")
    out = _outdir(args, project)
    k_t = _resolve_k_t(project)
    cfg = project.sim_config(k_t)
    try:
        result = dynamics.simulate(cfg, cycles)
    except SimulationDivergedError as exc:
        if exc.last_state is not None:
            dump = {"time": exc.last_state.time,
                    "stroke_angle": exc.last_state.stroke_angle,
                    "stroke_rate": exc.last_state.stroke_rate,
                    "pitch_angle": exc.last_state.pitch_angle,
                    "pitch_rate": exc.last_state.pitch_rate}
            print(f"last valid state: {json.dumps(dump)}", file=sys.stderr)
            _write_json(out / "diverged_state.json", dump)
        raise

    rows = (tuple(row) for row in result.data[:, : len(COLUMNS)])
    _write_csv(out / "timeseries.csv", list(COLUMNS), rows, project.hash)
    summary = dict(result.summary)
    summary["config_hash"] = project.hash
    summary["torque_constant_Nm_per_A"] = k_t.k_t
    summary["cycles_requested"] = cycles
    _write_json(out / "summary.json", summary)
    plots.save_timeseries_figure(result, out / "fig_timeseries.png", config_hash=project.hash)
    print(f"stroke amplitude: {summary['stroke_amplitude_deg']:.2f} deg "
          f"(settled: {summary['settled']})")
    print(f"pitch extrema: {summary['pitch_max_deg']:+.1f} / {summary['pitch_min_deg']:+.1f} deg")
    print(f"detuning vs linear resonance: {summary['detuning']:.4f}")
    print(f"mean electrical power: {summary['mean_electrical_power_W'] * 1e3:.3f} mW, "
          f"mean aero power: {summary['mean_aero_power_W'] * 1e6:.2f} uW, "
          f"mean lift: {summary['mean_lift_mgf']:.3f} mgf")
    print(f"wrote {out / 'timeseries.csv'}, {out / 'summary.json'}, {out / 'fig_timeseries.png'}")
    return 0


def cmd_sweep(args) -> int:
    project = _load(args)
    f_lo = parse_quantity(getattr(args, "from"), expect_dim="frequency").value
    f_hi = parse_quantity(args.to, expect_dim="frequency").value
    if not f_lo < f_hi:
        raise ConfigError("--from must be below --to")
    if args.points < 2:
        raise ConfigError("--points must be >= 2")
    workers = args.parallel
    cap = os.environ.get("FLAPKIT_THREADS")
    if cap is not None:
        workers = min(workers, max(1, int(cap)))
    out = _outdir(args, project)
    k_t = _resolve_k_t(project)
    cfg = project.sim_config(k_t)
    points = dynamics.frequency_sweep(cfg, f_lo, f_hi, args.points, max_workers=workers)

    header = ["frequency_hz", "amplitude_deg", "mean_lift_N", "mean_lift_mgf",
              "mean_electrical_power_W", "mean_aero_power_W", "settled", "error"]
    rows = [(p["frequency_hz"], p["amplitude_deg"], p["mean_lift_N"], p["mean_lift_mgf"],
             p["mean_electrical_power_W"], p["mean_aero_power_W"], p["settled"], p["error"])
            for p in points]
    _write_csv(out / "sweep.csv", header, rows, project.hash)
    with (out / "sweep_plot.dat").open("w") as fh:
        fh.write(f"# config_hash={project.hash}\n")
        fh.write("# frequency_hz  amplitude_deg\n")
        for p in points:
            fh.write(f"{p['frequency_hz']!r} {p['amplitude_deg']!r}\n")
    plots.save_sweep_figure(points, out / "fig_sweep.png", config_hash=project.hash)

    ok = [p for p in points if p["settled"]]
    if ok:
        peak = max(ok, key=lambda p: p["amplitude_deg"])
        print(f"peak amplitude {peak['amplitude_deg']:.2f} deg at {peak['frequency_hz']:.2f} Hz")
    failed = [p for p in points if p["error"]]
    if failed:
        print(f"{len(failed)} of {len(points)} points flagged (see error column)")
    print(f"wrote {out / 'sweep.csv'}, {out / 'sweep_plot.dat'}, {out / 'fig_sweep.png'}")
    return 0


def cmd_report(args) -> int:
    project = _load(args)
    out = _outdir(args, project)
    sim_summary = None
    if args.sim_summary:
        path = Path(args.sim_summary)
        if path.exists():
            sim_summary = json.loads(path.read_text())
        else:
            print(f"warning: simulation summary {path} not found; "
                  "writing budget-only report", file=sys.stderr)
    osc = project.normalized["oscillator"]
    report = budget.build_report(
        magnet=project.magnet(), coil=project.coil(), spring=project.spring(),
        wing=project.wing(), flexure=project.flexure(), drive=project.drive(),
        d_frame_mass=project.normalized["frame"]["d_frame_mass"],
        oscillator_point_mass=osc["point_mass"], arc_radius=osc["arc_radius"],
        design_stiffness=project.normalized["spring"]["design_stiffness"],
        sim_summary=sim_summary, config_hash=project.hash)

    wrote = []
    if args.format in ("json", "both"):
        (out / "report.json").write_text(budget.report_to_json(report))
        wrote.append(out / "report.json")
    text = budget.render_report_text(report)
    if args.format in ("text", "both"):
        (out / "report.txt").write_text(text)
        wrote.append(out / "report.txt")
    plots.save_mass_budget_figure(report["mass_budget_mg"], out / "fig_mass_budget.png",
                                  config_hash=project.hash)
    wrote.append(out / "fig_mass_budget.png")
    print(text)
    print(f"wrote {', '.join(str(p) for p in wrote)}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="flapkit",
                     description="design and simulation toolkit for a sub-milligram "
                                 "electromagnetic flapping-wing vehicle")
    parser.add_argument("--version", action="version", version=f"flapkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-spring", help="size the torsion spring for a target")
    _add_common(p)
    p.add_argument("--target-freq", default=None, help="e.g. 130Hz")
    p.add_argument("--target-stiffness", default=None, help="e.g. 0.8uNm")
    p.set_defaults(func=cmd_design_spring)

    p = sub.add_parser("simulate", help="run the coupled stroke/pitch simulation")
    _add_common(p)
    p.add_argument("--cycles", type=int, default=None, help="drive cycles to simulate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="steady-state amplitude vs drive frequency")
    _add_common(p)
    p.add_argument("--from", required=True, help="start frequency, e.g. 100Hz")
    p.add_argument("--to", required=True, help="end frequency, e.g. 170Hz")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--parallel", type=int, default=1, help="worker threads "
                   "(capped by FLAPKIT_THREADS)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate the design-chain report")
    _add_common(p)
    p.add_argument("--sim-summary", default=None, help="summary.json from a simulate run")
    p.add_argument("--format", choices=("json", "text", "both"), default="both")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, UnitError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleDesignError as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        return 2
    except (SimulationDivergedError, CalibrationError, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except FlapkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
