"""Command-line interface.

Verbs:
    ground-state --b <v>     solve + validate the variational profile
    run --config <file>      run one experiment into its artifact directory
    sweep --config <file>    run a parameter sweep (parallel workers)
    plot --run <dir>         regenerate plot data and figures from artifacts
    verify                   run the built-in identity suite

Exit codes: 0 clean, 2 validation error, 3 numerical abort, 4 contaminated run.
Worker count for sweeps comes from the [sweep] section or the environment
variable INLS_LAB_WORKERS.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config, load_sweep

EXIT_CLEAN = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CONTAMINATED = 4


def _cmd_ground_state(args) -> int:
    from .core import PhysicalParams
    from .ground_state import GroundStateError, REPORT_FIELDS, save_report
    from .runner import resolve_ground_state

    if not (0.0 < args.b < 0.5):
        print(f"error: b must lie in (0, 1/2); got {args.b}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        _, report = resolve_ground_state(PhysicalParams(b=args.b))
    except (GroundStateError, ValueError) as exc:
        print(f"error: ground-state solve failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name in REPORT_FIELDS:
        print(f"{name} = {getattr(report, name)!r}")
    if args.out:
        save_report(report, args.out)
        print(f"report written to {args.out}")
    return EXIT_CLEAN


def _cmd_run(args) -> int:
    from .runner import run_experiment

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg = load_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        art = run_experiment(cfg)
    except Exception as exc:
        print(f"error: run aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"run directory: {art.directory}")
    print(f"status: {art.status}" + (f" ({art.status_detail})" if art.status_detail else ""))
    print(f"verdict: {art.verdict}")
    print(f"contaminated: {art.contaminated}")
    return art.exit_code


def _cmd_sweep(args) -> int:
    from .sweep import sweep

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        spec = load_sweep(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    table = sweep(spec)
    failures = sum(1 for row in table.rows if row["error"])
    print(f"sweep table: {table.path} ({len(table.rows)} rows, {failures} failed)")
    for row in table.rows:
        tag = row["error"] or row["verdict"]
        print(f"  [{row['index']}] b={row['b']:g} amplitude={row['amplitude']:g} "
              f"offset={row['offset']:g} -> {tag}")
    return EXIT_CLEAN


def _cmd_plot(args) -> int:
    from . import plots

    try:
        written = plots.render_run(args.run)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for path in written:
        print(path)
    return EXIT_CLEAN


# ---------------------------------------------------------------------------
# verify: the built-in identity suite
# ---------------------------------------------------------------------------


def _verify_checks():
    """Yields (name, residual, tolerance) for each identity check."""
    import tempfile

    from . import checkpoint as ck
    from .core import (
        PhysicalParams,
        free_propagate,
        gaussian_datum,
        make_grid,
        observables,
        random_smooth_field,
    )
    from .diagnostics import (
        benstrick_residual,
        build_virial_weight,
        mor_terms,
        pure_virial_weight,
        virial_rhs,
    )
    from .evolve import EvolutionState, Schedule, evolve, make_state
    from .runner import resolve_ground_state

    params = PhysicalParams(b=0.3)
    g = make_grid(32, 16.0)

    # 1. free propagator against the closed-form spreading gaussian.  The
    # comparison grid must be fine enough that the sampling alias of the
    # gaussian (~ exp(-k_max^2/4)) sits below the tolerance.
    g_fine = make_grid(64, 16.0)
    u0 = gaussian_datum(g_fine, amplitude=1.0, width=1.0)
    t = 0.2
    ut = free_propagate(u0, t)
    mesh = np.meshgrid(
        *(3 * [np.arange(g_fine.n) * g_fine.h - g_fine.length / 2]), indexing="ij"
    )
    r2 = mesh[0] ** 2 + mesh[1] ** 2 + mesh[2] ** 2
    sigma = 1.0 + 4.0j * t
    exact = sigma ** -1.5 * np.exp(-r2 / sigma)
    err = float(np.max(np.abs(ut.values - exact)))
    yield "free propagator matches closed form", err, 1e-12

    # 2. mass conservation over a short nonlinear run
    state = make_state(gaussian_datum(g, amplitude=1.0, width=1.5), params)
    m0 = observables(state.u, params).mass
    evolve(state, Schedule(dt=1e-3, t_final=0.2, observer_stride=200))
    m1 = observables(state.u, params).mass
    yield "mass conserved by the splitting", abs(m1 - m0) / m0, 1e-12

    # 3. reversibility: forward then backward
    fwd = make_state(gaussian_datum(g, amplitude=1.0, width=1.5), params)
    evolve(fwd, Schedule(dt=1e-3, t_final=0.1))
    back = EvolutionState(
        u=fwd.u, t=fwd.t, params=fwd.params, weight=fwd.weight, coupling=fwd.coupling
    )
    evolve(back, Schedule(dt=-1e-3, t_final=-0.1))
    ref = gaussian_datum(g, amplitude=1.0, width=1.5)
    rev = float(np.max(np.abs(back.u.values - ref.values)))
    yield "time-reversal round trip", rev, 1e-10

    # 4. pure-weight identity rhs = 8K - 2(3+b)P
    u = gaussian_datum(g, amplitude=1.2, width=1.5)
    obs = observables(u, params)
    rhs = virial_rhs(u, pure_virial_weight(g), params)
    expect = 8.0 * obs.kinetic - 2.0 * (3.0 + params.b) * obs.potential
    yield "pure-weight identity collapse", abs(rhs - expect) / abs(expect), 1e-10

    # 5. square-function identity on a random field
    rnd = random_smooth_field(g, seed=7)
    yield "square-function identity (padded)", benstrick_residual(rnd, 5.0), 1e-8

    # 6. region decomposition closes
    w = build_virial_weight(g, 5.0)
    total = virial_rhs(rnd, w, params)
    parts = mor_terms(rnd, w, params)
    closure = abs(total - sum(parts)) / max(abs(total), 1.0)
    yield "bilinear region decomposition closes", closure, 1e-6

    # 7. checkpoint round trip
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "state.bin"
        ck.write_checkpoint(u, 1.25, params.b, path)
        u2, t2, b2 = ck.read_checkpoint(path)
        exact_rt = float(
            np.max(np.abs(u2.values - u.values)) + abs(t2 - 1.25) + abs(b2 - params.b)
        )
    yield "checkpoint bit-exact round trip", exact_rt, 0.0

    # 8. variational identities of the cached ground state
    _, rep = resolve_ground_state(params)
    yield "ground-state identity residual (res1)", rep.pohozaev_res1, 1e-6
    yield "ground-state identity residual (res2)", rep.pohozaev_res2, 1e-6


def _cmd_verify(_args) -> int:
    failures = 0
    for name, value, tol in _verify_checks():
        ok = value <= tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {tol:g})")
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_NUMERICAL
    print("all identity checks passed")
    return EXIT_CLEAN


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inls-lab",
        description="Numerical laboratory for the focusing inhomogeneous cubic "
        "Schrodinger flow with an inverse-power interaction weight.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_gs = sub.add_parser("ground-state", help="solve and validate the radial profile")
    p_gs.add_argument("--b", type=float, required=True, help="weight decay exponent")
    p_gs.add_argument("--out", type=str, default=None, help="write the report INI here")
    p_gs.set_defaults(fn=_cmd_ground_state)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("--config", type=str, required=True)
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep from a sweep spec")
    p_sweep.add_argument("--config", type=str, required=True)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="regenerate plots for a finished run")
    p_plot.add_argument("--run", type=str, required=True)
    p_plot.set_defaults(fn=_cmd_plot)

    p_verify = sub.add_parser("verify", help="run the built-in identity suite")
    p_verify.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
