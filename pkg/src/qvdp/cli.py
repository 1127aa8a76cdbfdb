"""Command-line front end for reproducible simulation runs.

Three subcommands: `simulate` runs one scenario from a config file,
`sweep` maps out synchronization boundaries over a list of two-phonon
rates, and `ion-plan` converts laboratory parameters into effective
oscillator rates.  Configs are flat key=value files; all rates are in
units of kappa1 except in ion-plan, whose *_hz keys hold ordinary
frequencies (multiplied by 2*pi internally).

Outputs land under <out>/<scenario>/<label>/ as versioned CSV tables
with JSON mirrors plus a manifest; identical config and seed give
identical numbers.  Exit codes: 2 invalid config, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .classical import (
    LangevinParams,
    classical_phase_boundary,
    ensemble_wigner_histogram,
    integrate_vdp_ode,
    phase_difference_histogram,
    phase_histogram,
    radial_histogram,
    simulate_langevin,
)
from .fock import FockSpace
from .ions import IonParams, effective_rates, ion_mass, lamb_dicke_budget
from .liouvillian import (
    Coupling,
    DissipatorSpec,
    Drive,
    SteadyStateError,
    build_liouvillian,
    default_n_max,
    steady_state,
    top_level_population,
)
from .meanfield import hysteresis_scan, meanfield_space, phase_boundary
from .outputs import build_manifest, new_run_dir, write_manifest, write_table
from .wigner import (
    WignerGrid,
    phase_difference_distribution,
    phase_marginal,
    radial_marginal,
    wigner_grid,
)

EXIT_BAD_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Invalid or incomplete run configuration."""


def _parse_value(text: str):
    text = text.strip()
    if "," in text:
        return [float(part) for part in text.split(",") if part.strip()]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(path) -> dict:
    """Flat key=value lines; # starts a comment; later keys win."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = {}
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        cfg[key.strip()] = _parse_value(value)
    return cfg


def _num(cfg: dict, key: str, default=None, required: bool = False) -> float:
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = cfg[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _int(cfg: dict, key: str, default=None, required: bool = False):
    value = _num(cfg, key, default=default, required=required)
    if value is None:
        return None
    if value != int(value):
        raise ConfigError(f"{key} must be an integer")
    return int(value)


def _diss(cfg: dict) -> DissipatorSpec:
    kappa2 = _num(cfg, "kappa2", required=True)
    if kappa2 <= 0:
        raise ConfigError("kappa2 must be positive (units of kappa1)")
    return DissipatorSpec(1.0, kappa2)


# --- table writers for domain objects ----------------------------------------


def _write_wigner(run_dir: Path, name: str, grid: WignerGrid) -> str:
    write_table(
        run_dir / f"{name}.csv",
        "wigner",
        {
            "re_alpha": np.repeat(grid.re_axis, grid.im_axis.size),
            "im_alpha": np.tile(grid.im_axis, grid.re_axis.size),
            "w": grid.values.reshape(-1),
        },
    )
    return f"{name}.csv"


def _write_phase(run_dir: Path, name: str, dist) -> str:
    kind = "phase_diff" if name == "phase_diff" else "phase"
    write_table(run_dir / f"{name}.csv", kind, {"angle": dist.angles, "density": dist.density})
    return f"{name}.csv"


def _write_radial(run_dir: Path, dist) -> str:
    write_table(run_dir / "radial.csv", "radial", {"radius": dist.radii, "density": dist.density})
    return "radial.csv"


def _write_populations(run_dir: Path, rho) -> str:
    pops = rho.populations
    write_table(
        run_dir / "populations.csv",
        "populations",
        {"n": np.arange(pops.size), "p": pops},
    )
    return "populations.csv"


# --- scenario runners ---------------------------------------------------------


def _single_mode_run(cfg: dict, run_dir: Path, ham) -> tuple[list, dict]:
    diss = _diss(cfg)
    n_max = _int(cfg, "n_max", default=default_n_max(diss))
    space = FockSpace(n_max)
    rho = steady_state(build_liouvillian(space, diss, ham))
    extent = _num(cfg, "extent")
    resolution = _int(cfg, "resolution", default=101)
    grid = wigner_grid(rho, extent=extent, resolution=resolution)
    files = [
        _write_wigner(run_dir, "wigner", grid),
        _write_radial(run_dir, radial_marginal(rho, r_max=extent)),
        _write_phase(run_dir, "phase", phase_marginal(rho)),
        _write_populations(run_dir, rho),
    ]
    diagnostics = {
        "n_max": space.n_max,
        "top_level_population": top_level_population(rho),
        "wigner_mass": grid.mass(),
    }
    return files, diagnostics


def run_single(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    return _single_mode_run(cfg, run_dir, None)


def run_single_driven(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    ham = Drive(delta=_num(cfg, "delta", default=0.0), e=_num(cfg, "drive_e", required=True))
    return _single_mode_run(cfg, run_dir, ham)


def run_two_coupled(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    diss = _diss(cfg)
    v = _num(cfg, "v", required=True)
    n_max = _int(cfg, "n_max", default=default_n_max(diss))
    space = FockSpace(n_max, modes=2)
    rho = steady_state(build_liouvillian(space, diss, Coupling(v=v)))
    files = [_write_phase(run_dir, "phase_diff", phase_difference_distribution(rho))]
    diagnostics = {"n_max": n_max, "dim": space.dim}
    return files, diagnostics


def run_meanfield(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    diss = _diss(cfg)
    v_min = _num(cfg, "v_min", required=True)
    v_max = _num(cfg, "v_max", required=True)
    points = _int(cfg, "v_points", default=9)
    if points < 2 or v_max <= v_min:
        raise ConfigError("need v_max > v_min and v_points >= 2")
    t_final = _num(cfg, "t_final")
    space = meanfield_space(diss)
    scan = hysteresis_scan(diss, np.linspace(v_min, v_max, points), space=space, t_final=t_final)
    write_table(
        run_dir / "branches.csv",
        "branches",
        {
            "kappa2": [p.kappa2 for p in scan],
            "v": [p.v for p in scan],
            "branch": [p.branch for p in scan],
            "r": [p.r for p in scan],
            "converged": [p.converged for p in scan],
        },
    )
    unconverged = sum(not p.converged for p in scan)
    return ["branches.csv"], {"dim": space.dim, "unconverged_points": unconverged}


def run_classical_ensemble(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    diss = _diss(cfg)
    n_osc = _int(cfg, "n_osc", default=1)
    params = LangevinParams(
        diss,
        delta=_num(cfg, "delta", default=0.0),
        e=_num(cfg, "drive_e", default=0.0),
        v=_num(cfg, "v", default=0.0),
        n_osc=n_osc,
    )
    ens = simulate_langevin(
        params,
        t_final=_num(cfg, "t_final", default=200.0),
        seed=_int(cfg, "seed", required=True),
        realizations=_int(cfg, "realizations", default=100),
        burn_in=_num(cfg, "burn_in"),
        dt=_num(cfg, "dt"),
    )
    extent = _num(cfg, "extent")
    if extent is None:
        # ring radius plus four radial standard deviations
        sigma_r = math.sqrt(
            params.noise_variance / (4.0 * diss.kappa2 * params.drift_radius**2)
        )
        extent = params.drift_radius + 4.0 * sigma_r
    resolution = _int(cfg, "resolution", default=51)
    files = [
        _write_wigner(
            run_dir, "wigner", ensemble_wigner_histogram(ens.samples, extent, resolution)
        ),
        _write_radial(run_dir, radial_histogram(ens.samples, r_max=extent)),
        _write_phase(run_dir, "phase", phase_histogram(ens.samples)),
    ]
    if n_osc >= 2:
        files.append(_write_phase(run_dir, "phase_diff", phase_difference_histogram(ens)))
    r = ens.order_parameter()
    diagnostics = {
        "samples": int(ens.samples.size),
        "order_parameter_final": float(r[-1]),
        "extent": extent,
    }
    return files, diagnostics


def run_vdp_ode(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    times, states = integrate_vdp_ode(
        x0=_num(cfg, "x0", default=0.1),
        v0=_num(cfg, "v0", default=0.0),
        omega0=_num(cfg, "omega0", required=True),
        epsilon=_num(cfg, "epsilon", required=True),
        t_final=_num(cfg, "t_final", required=True),
        dt=_num(cfg, "dt"),
    )
    write_table(
        run_dir / "trajectory.csv",
        "ode",
        {"t": times, "x": states[:, 0], "dx_dt": states[:, 1]},
    )
    # orbit radius averaged over the final tenth; the instantaneous value
    # wobbles along the slightly non-circular cycle
    tail = states[times >= 0.9 * times[-1]]
    radius = float(np.hypot(tail[:, 0], tail[:, 1] / _num(cfg, "omega0")).mean())
    return ["trajectory.csv"], {"final_radius": radius}


SIMULATE_SCENARIOS = {
    "single": (run_single, {"kappa2", "n_max", "extent", "resolution"}, False),
    "single-driven": (
        run_single_driven,
        {"kappa2", "n_max", "extent", "resolution", "delta", "drive_e"},
        False,
    ),
    "two-coupled": (run_two_coupled, {"kappa2", "v", "n_max"}, False),
    "meanfield": (
        run_meanfield,
        {"kappa2", "v_min", "v_max", "v_points", "t_final"},
        False,
    ),
    "classical-ensemble": (
        run_classical_ensemble,
        {
            "kappa2",
            "n_osc",
            "v",
            "delta",
            "drive_e",
            "realizations",
            "seed",
            "t_final",
            "burn_in",
            "dt",
            "extent",
            "resolution",
        },
        True,
    ),
    "vdp-ode": (run_vdp_ode, {"x0", "v0", "omega0", "epsilon", "t_final", "dt"}, False),
}


# --- boundary sweep -----------------------------------------------------------


def _quantum_point(task):
    kappa2, v_min, v_max, rel_tol, t_final, v_cap_factor = task
    b = phase_boundary(
        [kappa2], (v_min, v_max), rel_tol=rel_tol, t_final=t_final, v_cap_factor=v_cap_factor
    )[0]
    return ("quantum", kappa2, b.v_critical, b.tolerance, b.censored)


def _classical_point(task):
    kappa2, v_hint, rel_tol, n_osc, seed = task
    b = classical_phase_boundary(
        DissipatorSpec(1.0, kappa2), n_osc=n_osc, seed=seed, v_hint=v_hint, rel_tol=rel_tol
    )
    return ("classical", kappa2, b.v_critical, b.tolerance, b.censored)


def run_sweep(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    kappa2_list = cfg.get("kappa2_list")
    if isinstance(kappa2_list, (int, float)):
        kappa2_list = [float(kappa2_list)]
    if not isinstance(kappa2_list, list) or not kappa2_list:
        raise ConfigError("kappa2_list must hold at least one value")
    model = cfg.get("model", "both")
    if model not in ("quantum", "classical", "both"):
        raise ConfigError("model must be quantum, classical, or both")
    v_min = _num(cfg, "v_min", required=True)
    v_max = _num(cfg, "v_max", required=True)
    rel_tol = _num(cfg, "rel_tol", default=0.05)
    t_final = _num(cfg, "t_final")
    n_osc = _int(cfg, "n_osc", default=3000)
    seed = _int(cfg, "seed", required=model in ("classical", "both"))

    v_cap_factor = _num(cfg, "v_cap_factor", default=64.0)
    tasks = []
    if model in ("quantum", "both"):
        tasks += [
            (_quantum_point, (k2, v_min, v_max, rel_tol, t_final, v_cap_factor))
            for k2 in kappa2_list
        ]
    if model in ("classical", "both"):
        tasks += [
            (_classical_point, (k2, 0.5 * (v_min + v_max), rel_tol, n_osc, seed))
            for k2 in kappa2_list
        ]

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, task) for fn, task in tasks]
            rows = [f.result() for f in futures]
    else:
        rows = [fn(task) for fn, task in tasks]

    rows.sort(key=lambda row: (row[0], row[1]))
    write_table(
        run_dir / "boundary.csv",
        "boundary",
        {
            "model": [row[0] for row in rows],
            "kappa2": [row[1] for row in rows],
            "v_critical": [row[2] for row in rows],
            "tolerance": [row[3] for row in rows],
            "censored": [row[4] for row in rows],
        },
    )
    return ["boundary.csv"], {"points": len(rows), "workers": workers}


SWEEP_KEYS = {
    "kappa2_list",
    "model",
    "v_min",
    "v_max",
    "rel_tol",
    "t_final",
    "n_osc",
    "seed",
    "v_cap_factor",
}


# --- ion planning ---------------------------------------------------------------


ION_KEYS = {
    "wavelength_nm",
    "trap_freq_hz",
    "theta_deg",
    "mass_number",
    "omega1_hz",
    "omega2_hz",
    "omega_c_hz",
    "delta_c_hz",
    "tolerance",
}


def run_ion_plan(cfg: dict, run_dir: Path, workers: int) -> tuple[list, dict]:
    two_pi = 2.0 * math.pi
    params = IonParams(
        wavelength=_num(cfg, "wavelength_nm", required=True) * 1e-9,
        trap_freq=two_pi * _num(cfg, "trap_freq_hz", required=True),
        theta=math.radians(_num(cfg, "theta_deg", required=True)),
        mass=ion_mass(_num(cfg, "mass_number", required=True)),
        omega1=two_pi * _num(cfg, "omega1_hz", required=True),
        omega2=two_pi * _num(cfg, "omega2_hz", required=True),
        omega_c=two_pi * _num(cfg, "omega_c_hz", required=True),
        delta_c=two_pi * _num(cfg, "delta_c_hz", required=True),
    )
    tolerance = _num(cfg, "tolerance", default=0.05)
    rates = effective_rates(params, tolerance=tolerance)
    if rates.kappa1 <= 0:
        raise ConfigError("effective kappa1 vanished; check theta")

    names = ("kappa1", "kappa2", "v")
    values = (rates.kappa1, rates.kappa2, rates.v)
    write_table(
        run_dir / "ion_rates.csv",
        "ion_rates",
        {
            "quantity": list(names),
            "value_hz": [x / two_pi for x in values],
            "value_kappa1": [x / rates.kappa1 for x in values],
        },
    )
    print(f"Lamb-Dicke parameter eta = {rates.eta:.5f}")
    print(f"Lamb-Dicke budget: n <= {rates.n_max_lamb_dicke} (eta^2 (2n+1) <= {tolerance})")
    print(f"{'rate':<8}{'ordinary Hz':>16}{'units of kappa1':>18}")
    for name, value in zip(names, values):
        print(f"{name:<8}{value / two_pi:>16.1f}{value / rates.kappa1:>18.3f}")
    diagnostics = {"eta": rates.eta, "n_max_lamb_dicke": rates.n_max_lamb_dicke}
    return ["ion_rates.csv"], diagnostics


# --- entry point ----------------------------------------------------------------


def _execute(command: str, args) -> int:
    cfg = parse_config(args.config)
    if command == "simulate":
        scenario = cfg.get("scenario")
        if scenario not in SIMULATE_SCENARIOS:
            raise ConfigError(
                f"scenario must be one of {sorted(SIMULATE_SCENARIOS)}, got {scenario!r}"
            )
        runner, allowed, needs_seed = SIMULATE_SCENARIOS[scenario]
        extra = {"scenario"}
        if needs_seed and "seed" not in cfg:
            raise ConfigError(f"seed is required for the stochastic scenario {scenario}")
    elif command == "sweep":
        scenario, runner, allowed, extra = "sweep", run_sweep, SWEEP_KEYS, set()
    else:
        scenario, runner, allowed, extra = "ion-plan", run_ion_plan, ION_KEYS, set()

    unknown = set(cfg) - allowed - extra
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    run_dir = new_run_dir(args.out, scenario, args.label)
    start = time.perf_counter()
    files, diagnostics = runner(cfg, run_dir, args.workers)
    manifest = build_manifest(
        scenario, cfg, files, time.perf_counter() - start, diagnostics
    )
    write_manifest(run_dir, manifest)
    print(f"wrote {', '.join(sorted(files))} and manifest.json to {run_dir}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qvdp",
        description="Quantum and classical self-sustained oscillator simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one scenario from a key=value config file"),
        ("sweep", "map synchronization boundaries over kappa2 values"),
        ("ion-plan", "convert trapped-ion parameters to oscillator rates"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="flat key=value config file")
        p.add_argument("--out", default="out", help="output root (default: out)")
        p.add_argument("--label", default=None, help="run label (default: timestamp)")
        p.add_argument(
            "--workers",
            type=int,
            default=1,
            help="parallel sweep points (default: 1; simulate runs are single-process)",
        )
    args = parser.parse_args(argv)

    try:
        return _execute(args.command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (SteadyStateError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
