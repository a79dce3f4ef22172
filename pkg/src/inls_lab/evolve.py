"""Strang split-step spectral propagator for
(i d/dt + Lap) u + |x|^(-b) |u|^2 u = 0  on the periodic box.

The step is  half-kinetic -> full nonlinear phase -> half-kinetic.  Both
substeps are exactly unitary, so mass is conserved to roundoff per step and
the map is exactly time-reversible (run with -dt to undo a +dt step, up to
floating-point noise).

`evolve` keeps the field resident in spectral space and applies the
half-kinetic multiplier twice per step — never a pre-squared full multiplier
— so the computed orbit is bitwise independent of how often observers sample
it.  Observers receive both representations of the field at sample times and
return named scalar diagnostics; stateful observers (e.g. the scattering
monitor) are instances with __call__.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ComplexField,
    GridSpec,
    PhysicalParams,
    fftn,
    ifftn,
    kinetic_from_spectrum,
    sample_weight,
    wavenumber_sq,
)

log = logging.getLogger(__name__)

DEFAULT_GUARD_FACTOR = 1e3

STATUS_COMPLETED = "completed"
STATUS_GROWTH = "growth"
STATUS_NAN = "nan"


class PropagatorError(RuntimeError):
    pass


@dataclass
class EvolutionState:
    """Field + clock + cached coupling weight.

    coupling scales the nonlinear term; 0 switches it off (linear control
    runs), 1 is the physical equation.
    """

    u: ComplexField
    t: float
    params: PhysicalParams
    weight: np.ndarray
    coupling: float = 1.0

    @property
    def grid(self) -> GridSpec:
        return self.u.grid


def make_state(
    u: ComplexField,
    params: PhysicalParams,
    t: float = 0.0,
    coupling: float = 1.0,
) -> EvolutionState:
    if not math.isfinite(t):
        raise PropagatorError(f"non-finite start time {t}")
    return EvolutionState(u=u, t=t, params=params, weight=sample_weight(u.grid, params), coupling=coupling)


@dataclass(frozen=True)
class Schedule:
    """Time-stepping plan.  t_final must be an integer number of steps away;
    checkpoint_stride, when nonzero, must be a multiple of observer_stride so
    every checkpoint coincides with a diagnostic sample."""

    dt: float
    t_final: float
    observer_stride: int = 10
    checkpoint_stride: int = 0
    guard_factor: float = DEFAULT_GUARD_FACTOR

    def __post_init__(self):
        if self.dt == 0.0 or not math.isfinite(self.dt):
            raise PropagatorError(f"dt must be nonzero and finite, got {self.dt}")
        if self.observer_stride < 1:
            raise PropagatorError(f"observer_stride must be >= 1, got {self.observer_stride}")
        if self.checkpoint_stride and self.checkpoint_stride % self.observer_stride != 0:
            raise PropagatorError(
                f"checkpoint_stride {self.checkpoint_stride} is not a multiple of "
                f"observer_stride {self.observer_stride}"
            )
        n = self.t_final / self.dt
        if n < 0:
            raise PropagatorError(f"t_final {self.t_final} unreachable with dt {self.dt}")
        if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
            raise PropagatorError(
                f"t_final {self.t_final} is not an integer number of steps of {self.dt}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class SampleView:
    """What an observer sees at a sample time.  `uh` is the spectral field
    (fft of u.values); reuse it instead of re-transforming."""

    t: float
    step: int
    u: ComplexField
    uh: np.ndarray
    params: PhysicalParams
    weight: np.ndarray
    coupling: float
    is_checkpoint: bool


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    columns: dict = field(default_factory=dict)
    status: str = STATUS_COMPLETED
    status_detail: str = ""
    checkpoint_times: list = field(default_factory=list)

    def append(self, t: float, values: dict) -> None:
        idx = len(self.times)
        self.times.append(t)
        for key, val in values.items():
            col = self.columns.setdefault(key, [None] * idx)
            col.append(val)
        for key, col in self.columns.items():
            if len(col) <= idx:
                col.append(None)

    def series(self, key: str, dense_only: bool = True):
        """(t, values) arrays for one column; dense_only drops empty cells.
        A column that was never emitted yields empty arrays."""
        col = self.columns.get(key)
        if col is None:
            return np.array([]), np.array([])
        if dense_only:
            pairs = [(t, v) for t, v in zip(self.times, col) if v is not None]
            if not pairs:
                return np.array([]), np.array([])
            tt, vv = zip(*pairs)
            return np.asarray(tt), np.asarray(vv)
        return np.asarray(self.times), np.asarray([math.nan if v is None else v for v in col])


# ---------------------------------------------------------------------------
# Single-step operations (physical-space API, used by tests and short runs)
# ---------------------------------------------------------------------------


def nonlinear_phase_step(state: EvolutionState, dt: float) -> EvolutionState:
    """u <- u exp(i dt w |u|^2): exact solution of the nonlinear substep
    (|u| is pointwise invariant), hence exactly mass-preserving."""
    vals = state.u.values
    dens = vals.real ** 2 + vals.imag ** 2
    phase = np.exp((1j * dt * state.coupling) * (state.weight * dens))
    return EvolutionState(
        u=ComplexField(vals * phase, state.grid),
        t=state.t,
        params=state.params,
        weight=state.weight,
        coupling=state.coupling,
    )


def strang_step(state: EvolutionState, dt: float) -> EvolutionState:
    """Half kinetic, full nonlinear phase, half kinetic; advances t by dt."""
    g = state.grid
    half = np.exp((-0.5j * dt) * wavenumber_sq(g))
    uh = fftn(state.u.values)
    uh *= half
    mid = EvolutionState(
        u=ComplexField(ifftn(uh), g),
        t=state.t,
        params=state.params,
        weight=state.weight,
        coupling=state.coupling,
    )
    mid = nonlinear_phase_step(mid, dt)
    uh = fftn(mid.u.values)
    uh *= half
    out = ComplexField(ifftn(uh), g)
    if not np.isfinite(out.values.view(float)).all():
        raise PropagatorError(f"non-finite field after step at t={state.t + dt}")
    return EvolutionState(u=out, t=state.t + dt, params=state.params, weight=state.weight, coupling=state.coupling)


# ---------------------------------------------------------------------------
# Trajectory driver
# ---------------------------------------------------------------------------


def evolve(
    state: EvolutionState,
    schedule: Schedule,
    observers=(),
    checkpoint_sink=None,
) -> Trajectory:
    """Advance the state through the schedule, sampling observers every
    observer_stride steps (including step 0 and the final step).

    The run aborts with status 'growth' when the kinetic integral exceeds
    guard_factor * K(0) — a periodic box cannot follow genuine blow-up — and
    with status 'nan' on any non-finite value.  Both leave the offending
    sample recorded.  checkpoint_sink(u: ComplexField, t: float) is called at
    every checkpoint step.
    """
    g = state.grid
    n_steps = schedule.n_steps
    k2 = wavenumber_sq(g)
    half = np.exp((-0.5j * schedule.dt) * k2)
    theta_coef = schedule.dt * state.coupling
    weight = state.weight

    traj = Trajectory()
    uh = fftn(state.u.values)
    kinetic0 = None

    def take_sample(step: int, uh_now: np.ndarray) -> bool:
        """Record one sample; returns False when the run must stop."""
        nonlocal kinetic0
        t = state.t + step * schedule.dt
        u_now = ComplexField(ifftn(uh_now), g)
        finite = bool(np.isfinite(u_now.values.view(float)).all())
        kinetic = kinetic_from_spectrum(g, uh_now) if finite else math.nan
        if kinetic0 is None and finite:
            kinetic0 = kinetic
        is_ckpt = bool(
            schedule.checkpoint_stride
            and step % schedule.checkpoint_stride == 0
        )
        view = SampleView(
            t=t,
            step=step,
            u=u_now,
            uh=uh_now,
            params=state.params,
            weight=weight,
            coupling=state.coupling,
            is_checkpoint=is_ckpt,
        )
        values = {}
        for obs in observers:
            values.update(obs(view))
        traj.append(t, values)
        if is_ckpt:
            traj.checkpoint_times.append(t)
            if checkpoint_sink is not None:
                checkpoint_sink(u_now, t)
        if not finite:
            traj.status = STATUS_NAN
            traj.status_detail = f"non-finite field at t={t:.6g} (step {step})"
            log.error("%s", traj.status_detail)
            return False
        if kinetic0 is not None and kinetic > schedule.guard_factor * max(kinetic0, 1e-300):
            traj.status = STATUS_GROWTH
            traj.status_detail = (
                f"kinetic integral {kinetic:.3e} exceeded {schedule.guard_factor:g} x K(0) "
                f"at t={t:.6g} (step {step})"
            )
            log.warning("%s", traj.status_detail)
            return False
        return True

    if not take_sample(0, uh):
        return traj

    for step in range(1, n_steps + 1):
        uh *= half
        u = ifftn(uh)
        dens = u.real ** 2 + u.imag ** 2
        u *= np.exp((1j * theta_coef) * (weight * dens))
        uh = fftn(u)
        uh *= half
        if step % schedule.observer_stride == 0 or step == n_steps:
            if not take_sample(step, uh):
                return traj

    state.u = ComplexField(ifftn(uh), g)
    state.t = state.t + n_steps * schedule.dt
    return traj
