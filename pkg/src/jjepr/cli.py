"""Batch command-line interface.

Subcommands: spectrum, sweep-zeta, ramp, teleport, wigner, calibrate.
Parameters come from built-in defaults, overridden by an optional JSON
config file (--config), overridden in turn by explicit flags.  Unknown
config keys fail fast.  Outputs are CSV/JSON files written atomically with
a metadata header embedding the fully resolved configuration, and identical
configs with identical seeds produce byte-identical files.

Exit codes: 0 success, 2 config error, 3 validation error, 4 numerical
failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import Any

import numpy as np

from . import __version__
from .discretization import Grid1D, Grid2D, collective_grid_for, washboard_grid
from .dynamics import RampSchedule, evolve_ramp
from .epr import SWEEP_COLUMNS, GridPolicy, ground_state_2d, zeta_sweep
from .errors import ConfigError, NumericalError, ValidationError
from .model import JunctionSystem, collective_masses, harmonic_reference
from .spectra import bo_levels_analytic, eigensolve, pendulum_asymptotic_energy, washboard_spectrum
from .teleport import (
    GaussianEPRResource,
    NoiseBudget,
    apply_channel,
    build_input_state,
    ensemble_shots,
    fidelity,
    trace_distance,
)
from .wigner import default_p_axis, wigner_of_density, wigner_of_state

WORKERS_ENV = "JJEPR_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jjepr-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, columns: tuple[str, ...], rows: list[tuple], meta: dict) -> None:
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: dict, meta: dict) -> None:
    doc = {"meta": meta, **payload}
    _atomic_write(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _meta(command: str, cfg: dict) -> dict:
    return {"tool": "jjepr", "version": __version__, "command": command, "config": cfg}


def parse_complex_list(text: str) -> list[complex]:
    """Comma-separated complex coefficients; both i and j notations accepted."""
    out = []
    for raw in text.split(","):
        token = raw.strip().replace(" ", "").replace("i", "j")
        if not token:
            continue
        if token in ("j", "+j"):
            token = "1j"
        elif token == "-j":
            token = "-1j"
        token = token.replace("+j", "+1j").replace("-j", "-1j") if token.endswith("j") and token[-2] in "+-" else token
        try:
            out.append(complex(token))
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex coefficient {raw!r}") from exc
    if not out:
        raise ConfigError("coefficient list is empty")
    return out


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse float list {text!r}") from exc


# --------------------------------------------------------------------------
# parameter tables (name -> (type constructor, default, help))

PARAMS: dict[str, dict[str, tuple]] = {
    "spectrum": {
        "problem": (str, "washboard", "washboard | fast-pendulum | collective-2d | lab-2d"),
        "e_j": (float, 100.0, "Josephson energy"),
        "e_c": (float, 1.0, "charging energy"),
        "j": (float, 0.0, "bias current (1D washboard)"),
        "j1": (float, 0.0, "bias of junction 1 (2D problems)"),
        "j2": (float, 0.0, "bias of junction 2 (2D problems)"),
        "zeta": (float, 0.0, "coupling (2D problems)"),
        "levels": (int, 8, "number of eigenpairs"),
        "grid_points": (int, 401, "points per axis"),
        "out": (str, "spectrum.csv", "output CSV"),
    },
    "sweep-zeta": {
        "e_j": (float, 100.0, "Josephson energy"),
        "e_c": (float, 1.0, "charging energy"),
        "zetas": (str, "0,0.3,0.6,0.9,0.95,0.976,0.99", "comma list of couplings"),
        "points_per_sigma": (float, 10.0, "grid resolution per mode width"),
        "span_sigmas": (float, 7.0, "half extent in mode widths"),
        "max_points_per_axis": (int, 512, "per-axis grid cap; beyond it rows fall back to the factorized state"),
        "workers": (int, 0, f"thread count (0 = ${WORKERS_ENV} or 1)"),
        "svg": (bool, False, "also write a line plot"),
        "out": (str, "sweep_zeta.csv", "output CSV"),
    },
    "ramp": {
        "e_j": (float, 100.0, "Josephson energy"),
        "e_c": (float, 1.0, "charging energy"),
        "zeta_start": (float, 0.0, "initial coupling"),
        "zeta_end": (float, 0.9, "final coupling"),
        "duration_slow_periods": (float, 200.0, "duration in units of 1/Omega_0 at zeta_end"),
        "duration": (float, 0.0, "absolute duration (overrides slow periods when > 0)"),
        "dt": (float, 0.0, "time step (0 = 0.05/omega0)"),
        "shape": (str, "smoothstep", "ramp shape: smoothstep | linear"),
        "trace_samples": (int, 21, "points recorded on the fidelity trace"),
        "grid_points": (int, 141, "points per axis"),
        "span_sigmas": (float, 7.0, "half extent in mode widths (sized at zeta_start)"),
        "out": (str, "ramp_trace.csv", "trace CSV"),
        "summary_out": (str, "ramp_summary.json", "summary JSON"),
    },
    "teleport": {
        "e_j": (float, 100.0, "input-junction Josephson energy"),
        "e_c": (float, 1.0, "input-junction charging energy"),
        "input_coeffs": (str, "0,1,0,-1i", "eigenbasis coefficients of the input state"),
        "levels": (int, 8, "eigenbasis size"),
        "grid_points": (int, 361, "input-junction grid points"),
        "var_theta_t": (float, 0.015, "total flux-noise variance (ignored if use_resource)"),
        "var_p_t": (float, 3.19, "total charge-noise variance (ignored if use_resource)"),
        "use_resource": (bool, False, "derive the budget from an EPR resource instead of totals"),
        "resource_e_j": (float, 8.8913, "EPR-pair Josephson energy"),
        "resource_e_c": (float, 1.0, "EPR-pair charging energy"),
        "resource_zeta": (float, 0.9995, "EPR-pair coupling"),
        "meas_var_theta": (float, 0.0, "measurement flux-noise variance"),
        "meas_var_p": (float, 0.0, "measurement charge-noise variance"),
        "shots": (int, 0, "Monte Carlo shots (0 = analytic channel only)"),
        "seed": (int, 1234, "RNG seed"),
        "wigner": (bool, False, "also write input/output Wigner CSVs"),
        "out": (str, "teleport.json", "result JSON"),
    },
    "wigner": {
        "e_j": (float, 100.0, "Josephson energy"),
        "e_c": (float, 1.0, "charging energy"),
        "input_coeffs": (str, "0,1,0,-1i", "eigenbasis coefficients"),
        "levels": (int, 8, "eigenbasis size"),
        "grid_points": (int, 361, "position grid points"),
        "p_points": (int, 257, "momentum axis points"),
        "p_span_sigmas": (float, 7.0, "momentum half extent in state widths"),
        "var_theta_t": (float, 0.0, "channel flux noise (with var_p_t > 0 also writes the output state)"),
        "var_p_t": (float, 0.0, "channel charge noise"),
        "svg": (bool, False, "also write an SVG heatmap"),
        "out": (str, "wigner_in.csv", "input-state Wigner CSV"),
        "out_channel": (str, "wigner_out.csv", "output-state Wigner CSV"),
    },
    "calibrate": {
        "ratios": (str, "25,35,50,71,100,141,200,283,400", "E_J/E_C ladder for the input junction"),
        "e_c": (float, 1.0, "charging energy"),
        "var_theta_t": (float, 0.015, "total flux-noise variance"),
        "var_p_t": (float, 3.19, "total charge-noise variance"),
        "grid_points": (int, 361, "grid points"),
        "levels": (int, 8, "eigenbasis size"),
        "out": (str, "calibrate.csv", "output CSV"),
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jjepr",
        description="Coupled-junction EPR entanglement and teleportation simulator.",
        epilog="Exit codes: 0 ok, 2 config error, 3 validation error, 4 numerical failure, 5 I/O failure.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, table in PARAMS.items():
        sp = sub.add_parser(name, help=f"run the {name} computation")
        sp.add_argument("--config", default=None, metavar="JSON", help="config file; flags override it")
        sp.add_argument("--out-dir", default=".", metavar="DIR", help="directory for output files")
        for key, (ctor, default, help_text) in table.items():
            flag = "--" + key.replace("_", "-")
            if ctor is bool:
                sp.add_argument(flag, action="store_const", const=True, default=None, help=help_text)
            else:
                sp.add_argument(flag, type=ctor, default=None, metavar=str(default), help=help_text)
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    table = PARAMS[command]
    cfg = {k: default for k, (_, default, _) in table.items()}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(loaded) - set(table)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        for k, v in loaded.items():
            ctor = table[k][0]
            try:
                cfg[k] = ctor(v) if not isinstance(v, bool) or ctor is bool else ctor(v)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config key {k}: cannot coerce {v!r}") from exc
    for k in table:
        flag_val = getattr(args, k, None)
        if flag_val is not None:
            cfg[k] = flag_val
    return cfg


def _resolve_workers(requested: int) -> int:
    if requested and requested > 0:
        return requested
    env = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _out(cfg_dir: str, name: str) -> str:
    return os.path.join(cfg_dir, name)


# --------------------------------------------------------------------------
# subcommand bodies


def run_spectrum(cfg: dict, out_dir: str) -> list[str]:
    problem = cfg["problem"]
    k = cfg["levels"]
    rows = []
    if problem == "washboard":
        grid = washboard_grid(cfg["j"], cfg["grid_points"])
        spec, _ = washboard_spectrum(cfg["e_c"], cfg["e_j"], cfg["j"], k, grid)
        mass = 1.0 / (8.0 * cfg["e_c"])
        omega = math.sqrt(cfg["e_j"] / mass)
        for n in range(k):
            asym = pendulum_asymptotic_energy(cfg["e_j"], mass, n) if cfg["j"] == 0.0 else float("nan")
            res = spec.eigenvalues[n] - asym
            rows.append(
                (n, spec.eigenvalues[n], bool(spec.bound_flags[n]), asym, res, abs(res) / omega)
            )
    elif problem == "fast-pendulum":
        sysj = JunctionSystem(cfg["e_c"], cfg["e_j"], zeta=cfg["zeta"])
        masses = collective_masses(sysj)
        sig = math.sqrt(harmonic_reference(sysj).var_theta_plus)
        grid = Grid1D(-max(8 * sig, math.pi), max(8 * sig, math.pi), cfg["grid_points"])
        from .discretization import build_h_1d

        h = build_h_1d(
            grid, masses.m_plus, lambda t: -2.0 * cfg["e_j"] * np.cos(t / math.sqrt(2.0)), description="fast-pendulum"
        )
        spec = eigensolve(h, k)
        omega = math.sqrt(cfg["e_j"] / masses.m_plus)
        for n in range(k):
            asym = bo_levels_analytic(sysj, n, 0).epsilon_n0
            res = spec.eigenvalues[n] - asym
            rows.append((n, spec.eigenvalues[n], bool(spec.bound_flags[n]), asym, res, abs(res) / omega))
    elif problem in ("collective-2d", "lab-2d"):
        sysj = JunctionSystem(cfg["e_c"], cfg["e_j"], cfg["j1"], cfg["j2"], cfg["zeta"])
        if problem == "collective-2d":
            grid2 = collective_grid_for(sysj, max_points_per_axis=cfg["grid_points"])
            from .discretization import build_h_2d_collective

            h2 = build_h_2d_collective(grid2, collective_masses(sysj), sysj)
        else:
            ref = harmonic_reference(sysj)
            sig1 = math.sqrt(0.5 * (ref.var_theta_plus + ref.var_theta_minus))
            axis = Grid1D(-7 * sig1, 7 * sig1, min(cfg["grid_points"], 181))
            from .discretization import build_h_2d_lab

            h2 = build_h_2d_lab(Grid2D(axis, axis), sysj)
        spec = eigensolve(h2, k)
        for n in range(k):
            rows.append((n, spec.eigenvalues[n], bool(spec.bound_flags[n]), float("nan"), float("nan"), float("nan")))
    else:
        raise ConfigError(f"unknown spectrum problem {problem!r}")
    path = _out(out_dir, cfg["out"])
    write_csv(
        path,
        ("n", "energy", "bound", "asymptotic_energy", "residual", "residual_over_spacing"),
        rows,
        _meta("spectrum", cfg),
    )
    return [path]


def run_sweep_zeta(cfg: dict, out_dir: str) -> list[str]:
    sysj = JunctionSystem(cfg["e_c"], cfg["e_j"])
    zetas = parse_float_list(cfg["zetas"])
    policy = GridPolicy(
        points_per_sigma=cfg["points_per_sigma"],
        span_sigmas=cfg["span_sigmas"],
        max_points_per_axis=cfg["max_points_per_axis"],
    )
    rows = zeta_sweep(sysj, zetas, policy, workers=_resolve_workers(cfg["workers"]))
    table = [
        (
            r.zeta,
            r.log10_inv_one_minus_zeta,
            r.s_numeric,
            r.s_harmonic,
            r.cross_theta_norm_numeric,
            r.cross_theta_norm_harmonic,
            r.cross_p,
            r.method_flag,
        )
        for r in rows
    ]
    path = _out(out_dir, cfg["out"])
    write_csv(path, SWEEP_COLUMNS, table, _meta("sweep-zeta", cfg))
    written = [path]
    if cfg["svg"]:
        from ._svg import svg_lines

        svg_path = path.rsplit(".", 1)[0] + ".svg"
        svg_lines(
            np.array([r.zeta for r in rows]),
            {
                "s_numeric": np.array([r.s_numeric for r in rows]),
                "s_harmonic": np.array([r.s_harmonic for r in rows]),
            },
            svg_path,
            title="squeezing factor vs coupling",
        )
        written.append(svg_path)
    return written


def run_ramp(cfg: dict, out_dir: str) -> list[str]:
    sysj = JunctionSystem(cfg["e_c"], cfg["e_j"], zeta=cfg["zeta_start"])
    schedule_end = JunctionSystem(cfg["e_c"], cfg["e_j"], zeta=cfg["zeta_end"])
    omega0 = harmonic_reference(sysj).omega0
    slow_omega = bo_levels_analytic(schedule_end, 0, 0).Omega_n
    duration = cfg["duration"] if cfg["duration"] > 0 else cfg["duration_slow_periods"] / slow_omega
    dt = cfg["dt"] if cfg["dt"] > 0 else 0.05 / omega0
    schedule = RampSchedule(cfg["zeta_start"], cfg["zeta_end"], duration, cfg["shape"])

    start_sys = sysj.with_zeta(cfg["zeta_start"])
    grid = collective_grid_for(
        start_sys, span_sigmas=cfg["span_sigmas"], max_points_per_axis=cfg["grid_points"]
    )
    from .discretization import build_h_2d_collective

    h0 = build_h_2d_collective(grid, collective_masses(start_sys), start_sys)
    psi0 = eigensolve(h0, 1).wavefunction(0).normalized()
    result = evolve_ramp(psi0, sysj, schedule, dt, trace_samples=cfg["trace_samples"])

    rows = list(zip(result.times, result.overlaps, result.norms, result.energies))
    path = _out(out_dir, cfg["out"])
    write_csv(path, ("t", "overlap", "norm", "energy"), rows, _meta("ramp", cfg))
    summary = {
        "duration": duration,
        "dt": dt,
        "steps": int(round(duration / dt)),
        "final_overlap": result.final_overlap,
        "final_norm": float(result.norms[-1]),
        "final_energy": float(result.energies[-1]),
        "omega0": omega0,
        "slow_mode_omega_end": slow_omega,
    }
    spath = _out(out_dir, cfg["summary_out"])
    write_json(spath, {"result": summary}, _meta("ramp", cfg))
    return [path, spath]


def _input_state_from_cfg(cfg: dict):
    grid = washboard_grid(0.0, cfg["grid_points"])
    spec, _ = washboard_spectrum(cfg["e_c"], cfg["e_j"], 0.0, cfg["levels"], grid)
    coeffs = parse_complex_list(cfg["input_coeffs"])
    return build_input_state(coeffs, spec)


def run_teleport(cfg: dict, out_dir: str) -> list[str]:
    state = _input_state_from_cfg(cfg)
    if cfg["use_resource"]:
        resource = GaussianEPRResource.from_system(
            JunctionSystem(cfg["resource_e_c"], cfg["resource_e_j"], zeta=cfg["resource_zeta"])
        )
        budget = resource.budget(cfg["meas_var_theta"], cfg["meas_var_p"])
    else:
        resource = None
        budget = NoiseBudget.from_totals(cfg["var_theta_t"], cfg["var_p_t"])

    rho = apply_channel(state, budget)
    rho.validate(trace_tol=1e-6, psd_tol=-1e-6)
    f_channel = fidelity(state, rho)

    payload: dict[str, Any] = {
        "input_coefficients": [[c.real, c.imag] for c in state.coefficients],
        "budget": {
            "var_theta_epr": budget.var_theta_epr,
            "var_p_epr": budget.var_p_epr,
            "var_theta_meas": budget.var_theta_meas,
            "var_p_meas": budget.var_p_meas,
            "var_theta_total": budget.var_theta_total,
            "var_p_total": budget.var_p_total,
        },
        "fidelity_channel": f_channel,
        "seed": cfg["seed"],
    }
    written = []
    if cfg["shots"] > 0:
        if resource is None:
            resource = GaussianEPRResource.from_system(
                JunctionSystem(cfg["resource_e_c"], cfg["resource_e_j"], zeta=cfg["resource_zeta"])
            )
            budget_mc = resource.budget(cfg["meas_var_theta"], cfg["meas_var_p"])
            rho_ref = apply_channel(state, budget_mc)
        else:
            rho_ref = rho
        ens = ensemble_shots(
            state,
            resource,
            cfg["shots"],
            cfg["seed"],
            meas_var_theta=cfg["meas_var_theta"],
            meas_var_p=cfg["meas_var_p"],
        )
        payload["fidelity_monte_carlo"] = fidelity(state, ens.rho)
        payload["trace_distance_mc_vs_channel"] = trace_distance(ens.rho, rho_ref)
        payload["shots"] = cfg["shots"]

    rho_path = _out(out_dir, "rho_out.csv")
    grid = rho.grid
    rho_rows = [
        (grid.points[i], grid.points[j], rho.matrix[i, j].real, rho.matrix[i, j].imag)
        for i in range(grid.n)
        for j in range(grid.n)
        if abs(rho.matrix[i, j]) > 1e-14
    ]
    write_csv(rho_path, ("theta", "theta_prime", "re", "im"), rho_rows, _meta("teleport", cfg))
    payload["rho_out_path"] = os.path.basename(rho_path)
    written.append(rho_path)

    if cfg["wigner"]:
        pax = default_p_axis(rho)
        w_in = wigner_of_state(state.wavefunction, pax)
        w_out = wigner_of_density(rho, pax)
        for name, w in (("wigner_in.csv", w_in), ("wigner_out.csv", w_out)):
            wpath = _out(out_dir, name)
            _write_wigner_csv(wpath, w, _meta("teleport", cfg))
            written.append(wpath)
        payload["wigner_paths"] = ["wigner_in.csv", "wigner_out.csv"]

    jpath = _out(out_dir, cfg["out"])
    write_json(jpath, {"result": payload}, _meta("teleport", cfg))
    return [jpath] + written


def _write_wigner_csv(path: str, w, meta: dict) -> None:
    rows = []
    for i, t in enumerate(w.theta_axis.points):
        for jdx, p in enumerate(w.p_axis.points):
            rows.append((t, p, w.values[i, jdx]))
    write_csv(path, ("theta", "p", "w"), rows, meta)


def run_wigner(cfg: dict, out_dir: str) -> list[str]:
    state = _input_state_from_cfg(cfg)
    from .teleport import DensityMatrix1D

    rho_in = DensityMatrix1D.pure(state.wavefunction)
    vt, vp = cfg["var_theta_t"], cfg["var_p_t"]
    if vt > 0 or vp > 0:
        rho_out = apply_channel(state, NoiseBudget.from_totals(vt, vp))
        pax = default_p_axis(rho_out, n=cfg["p_points"], span_sigmas=cfg["p_span_sigmas"])
    else:
        rho_out = None
        pax = default_p_axis(rho_in, n=cfg["p_points"], span_sigmas=cfg["p_span_sigmas"])
    w_in = wigner_of_density(rho_in, pax, pure_input=True)
    path = _out(out_dir, cfg["out"])
    _write_wigner_csv(path, w_in, _meta("wigner", cfg))
    written = [path]
    if rho_out is not None:
        w_out = wigner_of_density(rho_out, pax)
        opath = _out(out_dir, cfg["out_channel"])
        _write_wigner_csv(opath, w_out, _meta("wigner", cfg))
        written.append(opath)
    if cfg["svg"]:
        from ._svg import svg_heatmap

        svg_path = path.rsplit(".", 1)[0] + ".svg"
        vals = w_in.values.T
        stride = (max(1, vals.shape[0] // 128), max(1, vals.shape[1] // 128))
        svg_heatmap(vals[:: stride[0], :: stride[1]], svg_path, title="Wigner function")
        written.append(svg_path)
    return written


def run_calibrate(cfg: dict, out_dir: str) -> list[str]:
    ratios = parse_float_list(cfg["ratios"])
    budget = NoiseBudget.from_totals(cfg["var_theta_t"], cfg["var_p_t"])
    two = parse_complex_list("0,1,0,-1i")
    three = parse_complex_list("1,0,-1i,0,1i")
    rows = []
    for ratio in ratios:
        e_j = ratio * cfg["e_c"]
        grid = washboard_grid(0.0, cfg["grid_points"])
        spec, _ = washboard_spectrum(cfg["e_c"], e_j, 0.0, cfg["levels"], grid)
        entries: dict[str, float] = {}
        for label, coeffs in (("two_term", two), ("three_term", three), ("ground", [1.0 + 0.0j])):
            try:
                state = build_input_state(coeffs, spec)
                entries[label] = fidelity(state, apply_channel(state, budget))
            except (ValidationError, NumericalError):
                entries[label] = float("nan")
        rows.append((ratio, entries["two_term"], entries["three_term"], entries["ground"]))
    path = _out(out_dir, cfg["out"])
    write_csv(
        path,
        ("ratio", "fidelity_two_term", "fidelity_three_term", "fidelity_ground"),
        rows,
        _meta("calibrate", cfg),
    )
    return [path]


RUNNERS = {
    "spectrum": run_spectrum,
    "sweep-zeta": run_sweep_zeta,
    "ramp": run_ramp,
    "teleport": run_teleport,
    "wigner": run_wigner,
    "calibrate": run_calibrate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.command
    try:
        cfg = resolve_config(command, args)
        written = RUNNERS[command](cfg, args.out_dir)
    except ConfigError as exc:
        _emit_error(command, exc, EXIT_CONFIG)
        return EXIT_CONFIG
    except ValidationError as exc:
        _emit_error(command, exc, EXIT_VALIDATION)
        return EXIT_VALIDATION
    except NumericalError as exc:
        _emit_error(command, exc, EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    except OSError as exc:
        _emit_error(command, exc, EXIT_IO)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


def _emit_error(command: str, exc: Exception, code: int) -> None:
    record = {
        "error": {
            "command": command,
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
    }
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
