"""Experiment orchestration: one validated config in, one self-describing
artifact directory out.

Artifact layout:

    config.ini          canonical copy of the config (rerunnable)
    ground_state.ini    variational report for the configured b
    diagnostics.csv     fixed-schema time series (see CSV_* below)
    checkpoints/        binary field snapshots at checkpoint samples
    scattering.ini      finite-horizon verdict and its inputs
    morawetz.ini        space-time average vs dispersive bound per horizon
    run.ini             status / verdict / exit-code summary
    plots/              two-column .dat files + one .svg per standard figure
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plots
from .checkpoint import write_checkpoint
from .config import RunConfig
from .core import ComplexField, gaussian_datum, integrate, make_grid
from .diagnostics import (
    CauchyIncrementObserver,
    MorawetzReport,
    ScatteringReport,
    StrichartzWindowObserver,
    auto_morawetz_radius,
    base_observer,
    build_virial_weight,
    local_mass_observer,
    morawetz_observer,
    morawetz_report,
    pure_virial_weight,
    scattering_report,
    virial_identity_residual,
    virial_observer,
)
from .evolve import STATUS_COMPLETED, Schedule, Trajectory, evolve, make_state
from .ground_state import (
    GroundStateReport,
    lift_profile,
    save_report,
    solve_cached,
    validate_ground_state,
)

__all__ = [
    "RunArtifacts",
    "run_experiment",
    "csv_columns",
    "write_diagnostics_csv",
    "ground_state_cache_dir",
    "resolve_ground_state",
    "EXIT_CLEAN",
    "EXIT_VALIDATION",
    "EXIT_NUMERICAL",
    "EXIT_CONTAMINATED",
    "GROUND_STATE_N_R",
    "GROUND_STATE_R_MAX",
]

EXIT_CLEAN = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CONTAMINATED = 4

GROUND_STATE_N_R = 32768
GROUND_STATE_R_MAX = 30.0
CACHE_ENV_VAR = "INLS_LAB_CACHE"

CSV_HEAD = (
    "t",
    "M",
    "K",
    "P",
    "E",
    "threshold_energy_margin",
    "threshold_kinetic_margin",
    "A_a",
    "virial_rhs",
    "virial_residual",
)
CSV_TAIL = ("boundary_mass", "cauchy_increment", "strichartz_window")


def csv_columns(local_radii) -> tuple[str, ...]:
    locals_ = tuple(f"local_mass_R{r:g}" for r in local_radii)
    return CSV_HEAD + locals_ + CSV_TAIL


@dataclass
class RunArtifacts:
    directory: Path
    config: RunConfig
    status: str
    status_detail: str
    verdict: str
    contaminated: bool
    exit_code: int
    ground_state: GroundStateReport
    scattering: ScatteringReport
    morawetz: tuple[MorawetzReport, ...]
    trajectory: Trajectory
    csv_path: Path


# ---------------------------------------------------------------------------
# Ground-state resolution (b-keyed disk cache shared across runs)
# ---------------------------------------------------------------------------


def ground_state_cache_dir() -> Path:
    import os

    env = os.environ.get(CACHE_ENV_VAR, "").strip()
    if env:
        return Path(env)
    return Path.home() / ".cache" / "inls-lab"


def resolve_ground_state(params, r_max: float = GROUND_STATE_R_MAX):
    """Profile + validated report for the requested b, built on demand and
    cached on disk keyed by (b, resolution)."""
    profile = solve_cached(
        params,
        ground_state_cache_dir(),
        n_r=GROUND_STATE_N_R,
        r_max=r_max,
        tol=1e-10,
    )
    return profile, validate_ground_state(profile, params)


def _build_datum(cfg: RunConfig, grid, params) -> ComplexField:
    d = cfg.datum
    if d.family == "gaussian":
        return gaussian_datum(
            grid,
            amplitude=d.amplitude,
            width=d.sigma,
            center=d.center,
            velocity=d.velocity,
        )
    # ground_state_scaled: the lift must cover the box corners seen from x0
    need = math.sqrt(3.0) / 2.0 * grid.length + math.sqrt(sum(c * c for c in d.center))
    r_max = max(GROUND_STATE_R_MAX, float(math.ceil(need)) + 2.0)
    profile, _ = resolve_ground_state(params, r_max=r_max)
    return lift_profile(
        profile, grid, amplitude=d.amplitude, center=d.center, velocity=d.velocity
    )


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{float(v):.17g}"


def write_diagnostics_csv(path: Path, traj: Trajectory, local_radii) -> Path:
    cols = csv_columns(local_radii)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(traj.times):
            row = [_fmt(t)]
            for key in cols[1:]:
                col = traj.columns.get(key)
                row.append(_fmt(col[i]) if col is not None else "")
            fh.write(",".join(row) + "\n")
    return path


def _attach_virial_residual(traj: Trajectory) -> None:
    """Post-hoc centered-difference residual column (interior samples only)."""
    t_a, action = traj.series("A_a")
    _, rhs = traj.series("virial_rhs")
    col = [None] * len(traj.times)
    if len(t_a) >= 3:
        _, _, rel = virial_identity_residual(t_a, action, rhs)
        # A_a is dense (emitted at every sample), so interior index i in the
        # series maps to row i of the trajectory.
        for j, value in enumerate(rel):
            col[j + 1] = float(value)
    traj.columns["virial_residual"] = col


# ---------------------------------------------------------------------------
# INI-style report emission (same scalar formatting as the config layer)
# ---------------------------------------------------------------------------


def _write_ini(path: Path, section: str, items: dict) -> Path:
    lines = [f"[{section}]"]
    for key, value in items.items():
        if isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_morawetz_ini(path: Path, reports) -> Path:
    lines = []
    for i, rep in enumerate(reports, start=1):
        lines.append(f"[horizon_{i}]")
        lines.append(f"T = {rep.horizon!r}")
        lines.append(f"R = {rep.radius!r}")
        lines.append(f"average = {rep.average!r}")
        lines.append(f"bound_value = {rep.bound_value!r}")
        lines.append(f"fitted_constant = {rep.fitted_constant!r}")
        lines.append("")
    path.write_text("\n".join(lines))
    return path


def _write_scattering_ini(path: Path, rep: ScatteringReport) -> Path:
    return _write_ini(
        path,
        "scattering",
        {
            "verdict": rep.verdict,
            "evacuated": rep.evacuated,
            "increments_monotone": rep.increments_monotone,
            "final_increment": float(rep.final_increment),
            "evacuation_radius": float(rep.evacuation_radius),
            "evacuation_fraction": float(rep.evacuation_fraction),
            "n_increments": int(rep.cauchy_increments.size),
        },
    )


# ---------------------------------------------------------------------------
# The experiment driver
# ---------------------------------------------------------------------------


def _morawetz_horizons(t_final: float) -> tuple[float, ...]:
    """Default nested horizons T/4 < T/2 < T (deduplicated)."""
    hs = sorted({t_final / 4.0, t_final / 2.0, t_final})
    return tuple(h for h in hs if h > 0.0)


def run_experiment(cfg: RunConfig, render_plots: bool = True) -> RunArtifacts:
    cfg.validate()
    grid = cfg.grid()
    params = cfg.params()
    schedule = cfg.schedule()
    diag = cfg.diagnostics

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "checkpoints").mkdir(exist_ok=True)
    (outdir / "config.ini").write_text(cfg.to_text())

    _, gs_report = resolve_ground_state(params)
    save_report(gs_report, outdir / "ground_state.ini")

    u0 = _build_datum(cfg, grid, params)
    state = make_state(u0, params)

    local_radii = tuple(sorted(set(diag.local_mass_radii) | {diag.evacuation_radius}))
    if diag.virial_weight_radius is None:
        vweight = pure_virial_weight(grid)
    else:
        vweight = build_virial_weight(grid, diag.virial_weight_radius)

    horizons = _morawetz_horizons(cfg.t_final)
    if diag.morawetz_auto:
        mor_radii = tuple(auto_morawetz_radius(h, params.b) for h in horizons)
    else:
        mor_radii = tuple(diag.morawetz_radius for _ in horizons)

    observers = [
        base_observer(gs_report),
        virial_observer(vweight, params),
        local_mass_observer(local_radii),
        morawetz_observer(sorted(set(mor_radii)), params),
        CauchyIncrementObserver(),
        StrichartzWindowObserver(params.b),
    ]

    ck_index = [0]

    def checkpoint_sink(u: ComplexField, t: float):
        path = outdir / "checkpoints" / f"state_{ck_index[0]:05d}.bin"
        write_checkpoint(u, t, params.b, path)
        ck_index[0] += 1

    traj = evolve(state, schedule, observers=observers, checkpoint_sink=checkpoint_sink)

    _attach_virial_residual(traj)
    csv_path = write_diagnostics_csv(outdir / "diagnostics.csv", traj, local_radii)

    # --- reports -----------------------------------------------------------
    mor_reports = []
    for horizon, radius in zip(horizons, mor_radii):
        times, series = traj.series(f"morawetz_ball_R{radius:g}")
        if times.size >= 2 and times[-1] >= horizon - 1e-12:
            mor_reports.append(
                morawetz_report(times, series, radius, horizon, params.b)
            )
    _write_morawetz_ini(outdir / "morawetz.ini", mor_reports)

    ct, cv = traj.series("cauchy_increment")
    st, sv = traj.series("strichartz_window")
    lt, lv = traj.series(f"local_mass_R{diag.evacuation_radius:g}")
    scat = scattering_report(
        traj.status,
        ct,
        cv,
        st,
        sv,
        lt,
        lv,
        evacuation_radius=diag.evacuation_radius,
        evacuation_fraction=diag.evacuation_fraction,
    )
    _write_scattering_ini(outdir / "scattering.ini", scat)

    # --- contamination & exit code ------------------------------------------
    bt, bv = traj.series("boundary_mass")
    mt, mv = traj.series("M")
    initial_mass = float(mv[0]) if mv.size else 0.0
    contaminated = bool(
        bv.size and float(np.max(bv)) > diag.boundary_mass_fraction * initial_mass
    )
    if traj.status != STATUS_COMPLETED:
        exit_code = EXIT_NUMERICAL
    elif contaminated:
        exit_code = EXIT_CONTAMINATED
    else:
        exit_code = EXIT_CLEAN

    _write_ini(
        outdir / "run.ini",
        "run",
        {
            "status": traj.status,
            "status_detail": traj.status_detail or "",
            "verdict": scat.verdict,
            "contaminated": contaminated,
            "exit_code": exit_code,
            "initial_mass": initial_mass,
            "max_boundary_mass": float(np.max(bv)) if bv.size else 0.0,
            "samples": len(traj.times),
            "checkpoints": ck_index[0],
        },
    )

    if render_plots:
        plots.render_run(outdir)

    return RunArtifacts(
        directory=outdir,
        config=cfg,
        status=traj.status,
        status_detail=traj.status_detail or "",
        verdict=scat.verdict,
        contaminated=contaminated,
        exit_code=exit_code,
        ground_state=gs_report,
        scattering=scat,
        morawetz=tuple(mor_reports),
        trajectory=traj,
        csv_path=csv_path,
    )
