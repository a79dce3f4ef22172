"""End-to-end acceptance gate.

One test per advertised guarantee of the laboratory, each run at its stated
tolerance; every test prints a `[accept]` line with the measured figures
(shown for failing tests by default and for passing tests under `-rA`).

Two checks are expected to stay red at desk resolution and are kept as
honest failures rather than weakened:

* ``test_03b_soliton_observable_drift`` — the standing wave is orbitally
  unstable (perturbations e-fold in ~0.7 time units), so the discretization
  seed grows past the 1e-3 drift budget well before T=5.
* ``test_06d_boundary_mass_stays_clean`` — over T=40 the scattered wave
  reaches the box shell and the boundary monitor sees ~6e-2 of the mass,
  far above the 1e-6 budget; a clean run would need a box several times
  larger.  The physics verdicts (6a-6c) are unaffected.
"""

from __future__ import annotations

import configparser
import math
import shutil
import time
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from inls_lab.config import load_config, load_sweep
from inls_lab.core import (
    PhysicalParams,
    free_propagate,
    gaussian_datum,
    make_grid,
    observables,
    random_smooth_field,
)
from inls_lab.diagnostics import (
    base_observer,
    benstrick_residual,
    build_virial_weight,
    monotone_nonincreasing_tail,
    mor_terms,
    pure_virial_weight,
    virial_action,
    virial_identity_residual,
    virial_rhs,
)
from inls_lab.evolve import Schedule, evolve, make_state
from inls_lab.ground_state import (
    gn_functional,
    lift_profile,
    profile_distance,
    shooting_oracle,
    solve_profile,
    validate_ground_state,
)
from inls_lab.runner import resolve_ground_state
from inls_lab.sweep import sweep

# Shared resolution for the radial solver comparisons: the finest grid the
# float64 Petviashvili iteration still converges on (65536 stalls at ~1.4e-10).
N_R = 32768
R_MAX = 25.0
B_VALUES = (0.1, 0.25, 0.4)

# Offset-gaussian scattering run: amplitude balances the two threshold
# margins (their sum is 1 by construction; both ~0.5 and strictly below).
RUN_AMPLITUDE = "0.401929065567"
RUN_DIR_TAG = "b0.3_lam0.401929_x2"

_WALL: dict[str, float] = {}


def _line(label: str, ok: bool, detail: str) -> None:
    print(f"[accept] {label}: {'PASS' if ok else 'FAIL'} - {detail}")


def _read_csv(path: Path) -> dict[str, np.ndarray]:
    header = path.open().readline().strip().split(",")
    data = np.genfromtxt(path, delimiter=",", skip_header=1, missing_values="",
                         filling_values=np.nan)
    if data.ndim == 1:
        data = data[None, :]
    return {name: data[:, i] for i, name in enumerate(header)}


def _read_ini(path: Path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    cp.read(path)
    return cp


# ---------------------------------------------------------------------------
# 1 + 2: ground-state identities and the sharp interpolation constant
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def gs_suite():
    """Petviashvili profile, validated report, and shooting-oracle distance
    for each coupling exponent, plus the wall time of the whole batch."""
    t0 = time.perf_counter()
    out = {}
    for b in B_VALUES:
        p = PhysicalParams(b=b)
        prof = solve_profile(p, n_r=N_R, r_max=R_MAX, tol=1e-10)
        rep = validate_ground_state(prof, p, res_tol=1e-6)
        oracle = shooting_oracle(p, n_r=N_R, r_max=R_MAX)
        out[b] = SimpleNamespace(report=rep, distance=profile_distance(prof, oracle))
    _WALL["gs"] = time.perf_counter() - t0
    return out


def test_01_ground_state_identity_suite(gs_suite):
    worst = {"res1": 0.0, "res2": 0.0, "ratio": 0.0, "energy": 0.0, "dist": 0.0}
    for b, item in gs_suite.items():
        rep = item.report
        ratio = (1.0 - b) / (3.0 + b)
        rel_ratio = abs(rep.mass / rep.kinetic - ratio) / ratio
        e_pred = rep.kinetic * (1.0 + b) / (2.0 * (3.0 + b))
        rel_energy = abs(rep.energy - e_pred) / rep.energy
        worst["res1"] = max(worst["res1"], rep.pohozaev_res1)
        worst["res2"] = max(worst["res2"], rep.pohozaev_res2)
        worst["ratio"] = max(worst["ratio"], rel_ratio)
        worst["energy"] = max(worst["energy"], rel_energy)
        worst["dist"] = max(worst["dist"], item.distance)
    wall = _WALL["gs"]
    ok = all(v < 1e-6 for v in worst.values()) and wall < 30.0
    _line(
        "01 ground-state identity suite",
        ok,
        f"worst over b={B_VALUES}: res1={worst['res1']:.2e} res2={worst['res2']:.2e} "
        f"M/K={worst['ratio']:.2e} E={worst['energy']:.2e} "
        f"oracle-dist={worst['dist']:.2e} (tol 1e-6 each), wall {wall:.1f}s (<30s)",
    )
    for key, val in worst.items():
        assert val < 1e-6, f"{key} identity residual {val:.3e} exceeds 1e-6"
    assert wall < 30.0


def test_02_sharp_constant_consistency(gs_suite):
    t0 = time.perf_counter()
    worst_match = 0.0
    for b, item in gs_suite.items():
        rep = item.report
        ratio = gn_functional(rep.mass, rep.kinetic, rep.potential, b)
        worst_match = max(worst_match, abs(ratio - rep.sharp_constant) / rep.sharp_constant)

    b = 0.25
    rep = gs_suite[b].report
    p = PhysicalParams(b=b)
    g = make_grid(32, 16.0)
    worst_excess = -math.inf
    for seed in range(100):
        u = random_smooth_field(g, seed=seed, amplitude=1.0)
        obs = observables(u, p)
        bound = rep.sharp_constant * obs.mass ** (0.5 * (1.0 - b)) * obs.kinetic ** (
            0.5 * (3.0 + b)
        )
        worst_excess = max(worst_excess, obs.potential / bound - 1.0)
    wall = time.perf_counter() - t0
    ok = worst_match < 1e-4 and worst_excess < 1e-3 and wall < 60.0
    _line(
        "02 sharp-constant consistency",
        ok,
        f"|interp-ratio(Q) - C_b|/C_b <= {worst_match:.2e} (tol 1e-4); "
        f"inequality excess over 100 random fields <= {worst_excess:.2e} "
        f"(tol 1e-3), wall {wall:.1f}s (<60s)",
    )
    assert worst_match < 1e-4
    assert worst_excess < 1e-3, "interpolation inequality violated beyond tolerance"
    assert wall < 60.0


# ---------------------------------------------------------------------------
# 3: propagator exactness, convergence order, and the unstable standing wave
# ---------------------------------------------------------------------------


def test_03a_propagator_exact_identities():
    t0 = time.perf_counter()
    p = PhysicalParams(b=0.3)
    g = make_grid(64, 32.0)
    u0 = gaussian_datum(g, amplitude=1.0, width=2.0)

    # linear limit: coupling 0 must reproduce the closed-form free flow
    st = make_state(u0, p, coupling=0.0)
    evolve(st, Schedule(dt=1e-3, t_final=0.1, observer_stride=100))
    ref = free_propagate(u0, 0.1)
    lin_err = float(np.max(np.abs(st.u.values - ref.values))) / float(
        np.max(np.abs(ref.values))
    )

    # reversibility: forward then backward with the sign-flipped step
    st = make_state(u0, p)
    evolve(st, Schedule(dt=1e-3, t_final=0.5, observer_stride=500))
    evolve(st, Schedule(dt=-1e-3, t_final=-0.5, observer_stride=500))
    rev_err = float(np.sqrt(np.sum(np.abs(st.u.values - u0.values) ** 2))) / float(
        np.sqrt(np.sum(np.abs(u0.values) ** 2))
    )

    # mass conservation over 1e4 steps (phase steps preserve |u| pointwise)
    st = make_state(u0, p)
    traj = evolve(st, Schedule(dt=1e-4, t_final=1.0, observer_stride=10_000),
                  observers=[base_observer(None)])
    _, mm = traj.series("M")
    mass_drift = abs(float(mm[-1]) / float(mm[0]) - 1.0)

    # second-order accuracy of the split step, measured on the energy error
    e0 = observables(u0, p).energy
    errs = []
    dts = (1.6e-2, 8e-3, 4e-3)
    for dt in dts:
        st = make_state(u0, p)
        tr = evolve(st, Schedule(dt=dt, t_final=0.16, observer_stride=10_000),
                    observers=[base_observer(None)])
        _, ee = tr.series("E")
        errs.append(abs(float(ee[-1]) - e0))
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])

    wall = time.perf_counter() - t0
    _WALL["03a"] = wall
    ok = (
        mass_drift < 1e-10
        and rev_err < 1e-10
        and abs(order - 2.0) <= 0.1
        and lin_err < 1e-11
    )
    _line(
        "03a propagator exact identities",
        ok,
        f"mass drift {mass_drift:.2e} over 1e4 steps (tol 1e-10); "
        f"reversibility {rev_err:.2e} (tol 1e-10); energy-error order "
        f"{order:.3f} (2.0 +/- 0.1); linear limit {lin_err:.2e} (tol 1e-11); "
        f"wall {wall:.0f}s",
    )
    assert mass_drift < 1e-10
    assert rev_err < 1e-10
    assert abs(order - 2.0) <= 0.1
    assert lin_err < 1e-11


def test_03b_soliton_observable_drift():
    # Honest red: the standing wave is orbitally unstable, so the grid
    # discretization seeds a perturbation that e-folds ~7 times over T=5
    # and the kinetic integral leaves its 1e-3 drift budget.  The exact
    # invariants above and the exoneration checks here (mass and energy
    # conserved to integrator accuracy) show the drift is physics, not bug.
    t0 = time.perf_counter()
    p = PhysicalParams(b=0.3)
    g = make_grid(96, 12.0)
    profile, _ = resolve_ground_state(p)
    q = lift_profile(profile, g)
    st = make_state(q, p)
    traj = evolve(st, Schedule(dt=2.5e-3, t_final=5.0, observer_stride=50),
                  observers=[base_observer(None)])
    _, mm = traj.series("M")
    _, kk = traj.series("K")
    _, ee = traj.series("E")
    mass_drift = float(np.max(np.abs(mm / mm[0] - 1.0)))
    energy_drift = float(np.max(np.abs(ee - ee[0]))) / abs(float(ee[0]))
    drift = float(np.max(np.abs(kk / kk[0] - 1.0)))
    wall = time.perf_counter() - t0
    total = wall + _WALL.get("03a", 0.0)
    ok = drift < 1e-3
    _line(
        "03b soliton observable drift",
        ok,
        f"kinetic drift {drift:.2e} over T=5 (tol 1e-3, expected red: orbital "
        f"instability); exoneration: mass drift {mass_drift:.1e}, energy drift "
        f"{energy_drift:.1e}; propagator suite wall {total:.0f}s (<300s)",
    )
    assert mass_drift < 1e-10, "mass conservation lost - integrator defect"
    assert total < 300.0
    assert drift < 1e-3, (
        "standing-wave observables drifted beyond 1e-3: the profile is "
        "orbitally unstable and the discretization seed grows exponentially"
    )


# ---------------------------------------------------------------------------
# 4: the localized virial identity along the flow
# ---------------------------------------------------------------------------


def test_04_virial_identity_along_flow():
    t0 = time.perf_counter()
    p = PhysicalParams(b=0.3)
    g = make_grid(96, 24.0)
    u0 = gaussian_datum(g, amplitude=1.0, width=1.25)
    _, gs = resolve_ground_state(p)
    obs0 = observables(u0, p)
    me, mk = gs.amplitude_margins(obs0.mass, obs0.kinetic, obs0.energy)
    assert me < 1.0 and mk < 1.0, "flow datum must sit below the threshold"

    w_pure = pure_virial_weight(g)
    w_hyb = build_virial_weight(g, 8.0)

    def both_weights(view):
        return {
            "A_pure": virial_action(view.u, w_pure, view.uh),
            "rhs_pure": virial_rhs(view.u, w_pure, view.params, view.uh),
            "A_hyb": virial_action(view.u, w_hyb, view.uh),
            "rhs_hyb": virial_rhs(view.u, w_hyb, view.params, view.uh),
        }

    st = make_state(u0, p)
    traj = evolve(st, Schedule(dt=2e-3, t_final=0.1, observer_stride=5),
                  observers=[both_weights])
    residual = {}
    for tag in ("pure", "hyb"):
        tt, act = traj.series(f"A_{tag}")
        _, rhs = traj.series(f"rhs_{tag}")
        _, _, rel = virial_identity_residual(tt, act, rhs)
        residual[tag] = float(np.max(rel))

    # the unweighted identity collapses to the two quadratic integrals
    rhs0 = virial_rhs(u0, w_pure, p)
    closed = 8.0 * obs0.kinetic - 2.0 * (3.0 + p.b) * obs0.potential
    collapse = abs(rhs0 - closed) / abs(closed)

    # stationarity of the standing wave: at the validated profile observables
    # the collapsed right-hand side cancels to the radial quadrature floor
    rhs_q = abs(8.0 * gs.kinetic - 2.0 * (3.0 + p.b) * gs.potential)
    bound_q = 1e-3 * 8.0 * gs.kinetic

    wall = time.perf_counter() - t0
    ok = (
        residual["pure"] < 1e-3
        and residual["hyb"] < 1e-3
        and collapse < 1e-8
        and rhs_q < bound_q
        and wall < 300.0
    )
    _line(
        "04 virial identity",
        ok,
        f"flow residual pure {residual['pure']:.2e} / matched-weight "
        f"{residual['hyb']:.2e} (tol 1e-3); collapse {collapse:.2e} (tol 1e-8); "
        f"standing-wave rhs {rhs_q:.2e} < {bound_q:.2e}; wall {wall:.0f}s (<300s)",
    )
    assert residual["pure"] < 1e-3
    assert residual["hyb"] < 1e-3
    assert collapse < 1e-8
    assert rhs_q < bound_q
    assert wall < 300.0


# ---------------------------------------------------------------------------
# 5: cutoff-kinetic identity and the region decomposition
# ---------------------------------------------------------------------------


def test_05_cutoff_identities():
    t0 = time.perf_counter()
    p = PhysicalParams(b=0.3)
    g = make_grid(32, 16.0)
    worst_ben = 0.0
    for seed in range(20):
        u = random_smooth_field(g, seed=100 + seed, amplitude=1.0)
        worst_ben = max(worst_ben, benstrick_residual(u, 5.0))

    g48 = make_grid(48, 16.0)
    w = build_virial_weight(g48, 5.0)
    worst_close = 0.0
    fields = [random_smooth_field(g48, seed=200 + k, amplitude=1.0) for k in range(5)]
    fields.append(gaussian_datum(g48, amplitude=1.4, width=1.5))
    for u in fields:
        total = virial_rhs(u, w, p)
        parts = mor_terms(u, w, p)
        worst_close = max(worst_close, abs(sum(parts) - total) / abs(total))
    wall = time.perf_counter() - t0
    ok = worst_ben < 1e-8 and worst_close < 1e-6 and wall < 60.0
    _line(
        "05 cutoff identities",
        ok,
        f"cutoff-kinetic residual <= {worst_ben:.2e} over 20 random fields "
        f"(tol 1e-8); region-decomposition closure <= {worst_close:.2e} "
        f"(tol 1e-6); wall {wall:.1f}s (<60s)",
    )
    assert worst_ben < 1e-8
    assert worst_close < 1e-6
    assert wall < 60.0


# ---------------------------------------------------------------------------
# 6 + 7 + 9: the flagship off-center scattering run (via the sweep driver so
# the determinism check can vary the worker count and nothing else)
# ---------------------------------------------------------------------------


def _sweep_text(outdir: Path, workers: int) -> str:
    return f"""
[grid]
n = 128
L = 64.0

[physics]
b = 0.3

[datum]
family = gaussian
amplitude = {RUN_AMPLITUDE}
sigma = 5.5
center = 2.0, 0.0, 0.0
velocity = 0.0, 0.0, 0.0

[schedule]
dt = 0.02
T = 40.0
observer_stride = 25
checkpoint_stride = 100
guard_factor = 1000.0

[diagnostics]
local_mass_radii = 10.0
virial_weight_radius = pure
morawetz_auto = true
evacuation_radius = 10.0
evacuation_fraction = 0.25
boundary_mass_fraction = 1e-06

[output]
directory = {outdir}
seed = 0

[sweep]
b = 0.3
amplitude = {RUN_AMPLITUDE}
center = 2.0, 0.0, 0.0
workers = {workers}
"""


@pytest.fixture(scope="module")
def scattering_run(tmp_path_factory):
    """The T=40 off-center below-threshold run, executed through the sweep
    driver with a single point and one worker."""
    base = tmp_path_factory.mktemp("flagship")
    t0 = time.perf_counter()
    table = sweep(load_sweep(_sweep_text(base, workers=1)))
    wall = time.perf_counter() - t0
    run_dir = base / RUN_DIR_TAG
    assert run_dir.is_dir(), f"sweep did not create {run_dir}"
    row = table.rows[0]
    assert row["error"] == "", f"run failed: {row['error']}"
    csv = _read_csv(run_dir / "diagnostics.csv")
    return SimpleNamespace(
        base=base,
        run_dir=run_dir,
        wall=wall,
        row=row,
        csv=csv,
        scattering=_read_ini(run_dir / "scattering.ini")["scattering"],
        morawetz=_read_ini(run_dir / "morawetz.ini"),
        run=_read_ini(run_dir / "run.ini")["run"],
    )


def test_06a_stays_below_threshold(scattering_run):
    r = scattering_run
    me = r.csv["threshold_energy_margin"]
    mk = r.csv["threshold_kinetic_margin"]
    n_samples = me.size
    ok = (
        r.run["status"] == "completed"
        and bool(np.all(me < 1.0))
        and bool(np.all(mk < 1.0))
        and abs(me[0] - 0.5) < 0.05
        and abs(mk[0] - 0.5) < 0.05
        and r.wall < 1800.0
    )
    _line(
        "06a stay-below invariant",
        ok,
        f"margins start ({me[0]:.4f}, {mk[0]:.4f}) ~ (0.5, 0.5), max over "
        f"{n_samples} samples ({np.max(me):.4f}, {np.max(mk):.4f}) < 1; "
        f"status {r.run['status']}; wall {r.wall:.0f}s (<1800s)",
    )
    assert r.run["status"] == "completed"
    assert np.all(me < 1.0) and np.all(mk < 1.0)
    assert abs(me[0] - 0.5) < 0.05 and abs(mk[0] - 0.5) < 0.05
    assert r.wall < 1800.0


def test_06b_local_mass_evacuates(scattering_run):
    r = scattering_run
    local = r.csv["local_mass_R10"]
    frac = float(np.min(local)) / float(np.max(local))
    evac = r.scattering["evacuated"] == "True"
    ok = frac < 0.25 and evac
    _line(
        "06b local-mass evacuation",
        ok,
        f"mass inside R=10 falls to {frac:.4f} of its peak (< 0.25); "
        f"report flag evacuated={evac}",
    )
    assert frac < 0.25
    assert evac


def test_06c_interaction_increments_decay(scattering_run):
    r = scattering_run
    inc = r.csv["cauchy_increment"]
    inc = inc[~np.isnan(inc)]
    monotone = monotone_nonincreasing_tail(inc)
    verdict = r.scattering["verdict"]
    ok = inc.size >= 10 and monotone and verdict == "scattering-consistent"
    _line(
        "06c interaction-picture increments",
        ok,
        f"{inc.size} increments, last-half monotone non-increasing: {monotone}; "
        f"final {inc[-1]:.3e}; verdict '{verdict}'",
    )
    assert inc.size >= 10
    assert monotone
    assert verdict == "scattering-consistent"


def test_06d_boundary_mass_stays_clean(scattering_run):
    # Honest red: by t~9 the outgoing wave reaches the absorbing-free box
    # shell, so the boundary monitor integrates ~6e-2 of the mass, far over
    # the 1e-6 contamination budget.  The run is flagged (exit code 4) and
    # the monitor is doing its job; a clean T=40 run needs a much larger box.
    r = scattering_run
    bmax = float(np.nanmax(r.csv["boundary_mass"]))
    m0 = float(r.csv["M"][0])
    frac = bmax / m0
    ok = frac < 1e-6
    _line(
        "06d boundary-mass monitor",
        ok,
        f"max boundary mass fraction {frac:.3e} (tol 1e-6, expected red: "
        f"periodic shell re-entry over T=40); run flagged contaminated="
        f"{r.run['contaminated']}, exit code {r.run['exit_code']}",
    )
    assert frac < 1e-6, (
        "boundary shell sees the scattered wave before T=40; the monitor "
        "correctly flags the run as contaminated"
    )


def test_07_space_time_bound_scaling(scattering_run):
    r = scattering_run
    fitted = []
    for section in r.morawetz.sections():
        sec = r.morawetz[section]
        horizon = float(sec["t"])
        radius = float(sec["r"])
        assert abs(radius - horizon ** (1.0 / 1.3)) < 1e-9 * radius
        fitted.append(float(sec["fitted_constant"]))
    spread = max(fitted) / min(fitted)
    ok = len(fitted) == 3 and spread < 2.0
    _line(
        "07 space-time bound scaling",
        ok,
        f"fitted constants {[f'{c:.4f}' for c in fitted]} across horizons "
        f"T=10,20,40 with R=T^(1/1.3): spread factor {spread:.4f} (< 2)",
    )
    assert len(fitted) == 3
    assert spread < 2.0


# ---------------------------------------------------------------------------
# 8: the standing-wave datum must be distinguishable from scattering
# ---------------------------------------------------------------------------


SOLITON_TEXT = """
[grid]
n = 64
L = 16.0

[physics]
b = 0.3

[datum]
family = ground_state_scaled
amplitude = 1.0
center = 0.0, 0.0, 0.0
velocity = 0.0, 0.0, 0.0

[schedule]
dt = 0.002
T = 4.0
observer_stride = 25
checkpoint_stride = 200
guard_factor = 1000.0

[diagnostics]
local_mass_radii = 6.0
virial_weight_radius = pure
morawetz_auto = true
evacuation_radius = 6.0
evacuation_fraction = 0.25
boundary_mass_fraction = 1e-06

[output]
directory = {outdir}
seed = 0
"""


def test_08_standing_wave_verdict(scattering_run, tmp_path_factory):
    from inls_lab.runner import run_experiment

    outdir = tmp_path_factory.mktemp("standing") / "run"
    t0 = time.perf_counter()
    art = run_experiment(load_config(SOLITON_TEXT.format(outdir=outdir)))
    wall = time.perf_counter() - t0
    inc = art.scattering.cauchy_increments
    floor = 10.0 * float(scattering_run.scattering["final_increment"])
    lowest = float(np.min(inc)) if inc.size else 0.0
    ok = art.verdict.startswith("soliton") and inc.size >= 5 and lowest >= floor
    _line(
        "08 standing-wave verdict",
        ok,
        f"verdict '{art.verdict}'; {inc.size} increments, min {lowest:.3e} >= "
        f"10 x scattering-run final increment {floor:.3e}; wall {wall:.0f}s",
    )
    assert art.verdict.startswith("soliton"), art.verdict
    assert inc.size >= 5
    assert lowest >= floor


# ---------------------------------------------------------------------------
# 9: worker-count determinism of the flagship run
# ---------------------------------------------------------------------------


def test_09_determinism_across_workers(scattering_run, tmp_path_factory):
    base = tmp_path_factory.mktemp("flagship_w8")
    t0 = time.perf_counter()
    table = sweep(load_sweep(_sweep_text(base, workers=8)))
    wall = time.perf_counter() - t0
    assert table.rows[0]["error"] == ""
    run_dir = base / RUN_DIR_TAG

    diag_same = (run_dir / "diagnostics.csv").read_bytes() == (
        scattering_run.run_dir / "diagnostics.csv"
    ).read_bytes()
    sweep_same = (base / "sweep.csv").read_bytes() == (
        scattering_run.base / "sweep.csv"
    ).read_bytes()

    # the byte comparison is done; drop the bulky state snapshots
    shutil.rmtree(run_dir / "checkpoints", ignore_errors=True)
    shutil.rmtree(scattering_run.run_dir / "checkpoints", ignore_errors=True)

    ok = diag_same and sweep_same
    _line(
        "09 determinism across workers",
        ok,
        f"diagnostics.csv bit-identical: {diag_same}; sweep.csv bit-identical: "
        f"{sweep_same} (worker counts 1 vs 8); second run wall {wall:.0f}s",
    )
    assert diag_same, "diagnostics.csv differs between worker counts 1 and 8"
    assert sweep_same, "sweep.csv differs between worker counts 1 and 8"
