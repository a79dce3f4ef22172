"""Radial ground-state solver for  ΔQ - Q + |x|^(-b) Q^3 = 0  in 3D.

Two independent methods:

* `solve_profile`: Petviashvili fixed-point iteration on a half-offset
  radial finite-difference grid (the production solver);
* `shooting_oracle`: bisection on Q(0) for the radial ODE initial-value
  problem, integrated with a high-order adaptive scheme (the verification
  solver — shares no discretization machinery with the first).

Both return a RadialProfile on the nodes r_j = (j + 1/2) h_r, which never
touch r = 0, so the coupling weight r^(-b) needs no clamping here.

`validate_ground_state` turns an accepted profile into the downstream
currency: the two integral identities obtained by multiplying the equation
by Q and by x.grad(Q), the sharp interpolation constant, and the two
threshold quantities used by the flow classifier.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .core import ComplexField, GridSpec, PhysicalParams, _axis, radius_field

log = logging.getLogger(__name__)

# Petviashvili stabilizer exponent for a cubic nonlinearity (p=3):
# gamma = (<AQ,Q>/<wQ^3,Q>)^(p/(p-1)) with p/(p-1) = 3/2.
STABILIZER_EXPONENT = 1.5

# Shooting integrator: series start distance and integration horizon.
SHOOT_EPS = 10.0 * math.sqrt(np.finfo(float).eps)
SHOOT_R_END = 40.0
# Radius past which the shot is replaced by the matched far-field form
# A e^(-r)/r (the bisection gap re-excites the growing mode near r ~ 18,
# long after the profile has entered the linear regime).
SHOOT_TAIL_MATCH_R = 12.0


class GroundStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial profile on the half-offset grid r_j = (j+1/2) h_r."""

    r: np.ndarray
    q: np.ndarray
    h_r: float
    r_max: float
    b: float
    iterations: int = 0
    residual: float = float("nan")

    @property
    def n(self) -> int:
        return self.q.size

    def radial_l2(self) -> float:
        """sqrt(4 pi sum q^2 r^2 h) — the full-space L2 norm of the lift."""
        return math.sqrt(4.0 * math.pi * self.h_r * float(np.sum(self.q ** 2 * self.r ** 2)))


def profile_distance(a: RadialProfile, b: RadialProfile) -> float:
    """Relative full-space L2 distance between two profiles on one grid."""
    if a.n != b.n or abs(a.h_r - b.h_r) > 1e-15 * a.h_r:
        raise ValueError("profiles live on different radial grids")
    num = float(np.sum((a.q - b.q) ** 2 * a.r ** 2))
    den = float(np.sum(b.q ** 2 * b.r ** 2))
    return math.sqrt(num / den)


@dataclass(frozen=True)
class GroundStateReport:
    """Validated observables and threshold constants of one ground state."""

    b: float
    mass: float
    kinetic: float
    potential: float
    energy: float
    sharp_constant: float
    threshold_energy: float
    threshold_kinetic: float
    pohozaev_res1: float
    pohozaev_res2: float
    sharp_relation_res: float
    # provenance of the profile behind the numbers
    n_r: int = 0
    r_max: float = float("nan")
    tol: float = float("nan")
    iterations: int = 0
    equation_residual: float = float("nan")

    def amplitude_margins(self, mass: float, kinetic: float, energy: float):
        """Threshold margins of an arbitrary field's (M, K, E) triple.

        The energy-side quantity sign(E)|E|^(1+b) M^(1-b) is compared to
        E_Q^(1+b) M_Q^(1-b); the gradient-side quantity K^((1+b)/2) M^((1-b)/2)
        to the same combination of Q.  Margin < 1 means strictly below.
        """
        e_val = math.copysign(abs(energy) ** (1.0 + self.b), energy) * mass ** (1.0 - self.b)
        k_val = kinetic ** (0.5 * (1.0 + self.b)) * mass ** (0.5 * (1.0 - self.b))
        return e_val / self.threshold_energy, k_val / self.threshold_kinetic


# ---------------------------------------------------------------------------
# Petviashvili solver
# ---------------------------------------------------------------------------


def _radial_operator_bands(n: int, h: float, r: np.ndarray):
    """Banded form of A = -Lap_r + 1 in conservative flux discretization.

    Fluxes live at radii (j+1) h; the innermost flux coefficient is 0^2, so
    the coordinate singularity never enters; the ghost value beyond r_max is
    held at zero (Dirichlet).  A is symmetric positive definite with respect
    to the r^2-weighted inner product.
    """
    beta = (np.arange(1, n + 1) * h) ** 2  # beta[j] = ((j+1) h)^2
    beta_lo = np.concatenate(([0.0], beta[:-1]))  # beta[j-1], with beta[-1] = 0
    inv = 1.0 / (r ** 2 * h ** 2)
    diag = 1.0 + (beta + beta_lo) * inv
    upper = -beta * inv  # couples j -> j+1
    lower = -beta_lo * inv  # couples j -> j-1
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return ab, beta, upper, lower, diag


def _apply_operator(q, upper, lower, diag):
    out = diag * q
    out[:-1] += upper[:-1] * q[1:]
    out[1:] += lower[1:] * q[:-1]
    return out


def solve_profile(
    params: PhysicalParams,
    n_r: int = 4096,
    r_max: float = 30.0,
    tol: float = 1e-10,
    max_iter: int = 500,
    initial_guess=None,
    stabilizer_exponent: float = STABILIZER_EXPONENT,
) -> RadialProfile:
    """Petviashvili iteration  Q <- gamma (-Lap_r + 1)^(-1) (r^(-b) Q^3).

    Converged when the relative equation residual
    ||AQ - r^(-b)Q^3|| / ||r^(-b)Q^3||  (r^2-weighted L2)  drops below tol.
    """
    if r_max < 25.0:
        raise GroundStateError(f"r_max must leave tail room (>= 25), got {r_max}")
    if tol > 1e-10:
        raise GroundStateError(f"equation residual tolerance must be <= 1e-10, got {tol}")
    if n_r < 64:
        raise GroundStateError(f"n_r too small: {n_r}")

    h = r_max / n_r
    r = (np.arange(n_r) + 0.5) * h
    ab, _beta, upper, lower, diag = _radial_operator_bands(n_r, h, r)
    w = r ** (-params.b)
    measure = r ** 2 * h

    def wdot(f, g):
        return float(np.sum(f * g * measure))

    q = np.asarray(initial_guess if initial_guess is not None else 3.0 * np.exp(-(r ** 2)), dtype=float)
    if q.shape != r.shape:
        raise GroundStateError("initial guess shape does not match the radial grid")

    residual = math.inf
    for it in range(1, max_iter + 1):
        rhs = w * q ** 3
        num = wdot(_apply_operator(q, upper, lower, diag), q)
        den = wdot(rhs, q)
        if den <= 0.0 or num <= 0.0 or not math.isfinite(den):
            raise GroundStateError(f"iteration collapapsed at step {it}: <Aq,q>={num}, <wq^3,q>={den}")
        gamma = (num / den) ** stabilizer_exponent
        q = gamma * solve_banded((1, 1), ab, rhs)
        if float(np.max(np.abs(q))) < 1e-8:
            raise GroundStateError(f"profile collapsed to zero at iteration {it}")
        new_rhs = w * q ** 3
        defect = _apply_operator(q, upper, lower, diag) - new_rhs
        residual = math.sqrt(wdot(defect, defect) / wdot(new_rhs, new_rhs))
        if residual < tol:
            break
    else:
        raise GroundStateError(
            f"no convergence after {max_iter} iterations (residual {residual:.3e}, tol {tol:.1e})"
        )

    if not np.all(q > 0.0):
        raise GroundStateError("converged profile is not strictly positive")
    if not np.all(np.diff(q) < 0.0):
        raise GroundStateError("converged profile is not strictly decreasing")
    if q[-1] > 1e-10 * q[0]:
        raise GroundStateError(
            f"tail not contained: q(r_max)/q(0) = {q[-1] / q[0]:.3e} > 1e-10"
        )
    log.info("ground state b=%.4g converged in %d iterations, residual %.3e", params.b, it, residual)
    return RadialProfile(r=r, q=q, h_r=h, r_max=r_max, b=params.b, iterations=it, residual=residual)


# ---------------------------------------------------------------------------
# Shooting oracle
# ---------------------------------------------------------------------------


def _shoot(params: PhysicalParams, q0: float, rtol=1e-12, atol=1e-14, dense=False):
    """Integrate the radial ODE outward from a series start at r = eps.

    Returns (outcome, solution) with outcome one of:
      'cross' — Q crossed zero (amplitude too large),
      'turn'  — Q' turned positive while Q > 0 (amplitude too small),
      'none'  — neither event fired before SHOOT_R_END.
    """
    b = params.b
    eps = SHOOT_EPS
    # Series: Q = q0 + (q0/6) r^2 - q0^3 r^(2-b)/((2-b)(3-b)) + h.o.t.
    c2 = q0 / 6.0
    cb = -q0 ** 3 / ((2.0 - b) * (3.0 - b))
    q_eps = q0 + c2 * eps ** 2 + cb * eps ** (2.0 - b)
    dq_eps = 2.0 * c2 * eps + (2.0 - b) * cb * eps ** (1.0 - b)

    def rhs(rr, y):
        qq, pp = y
        return (pp, qq - rr ** (-b) * qq ** 3 - 2.0 * pp / rr)

    def ev_cross(rr, y):
        return y[0]

    ev_cross.terminal = True
    ev_cross.direction = -1.0

    def ev_turn(rr, y):
        return y[1]

    ev_turn.terminal = True
    ev_turn.direction = 1.0

    sol = solve_ivp(
        rhs,
        (eps, SHOOT_R_END),
        (q_eps, dq_eps),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=(ev_cross, ev_turn),
        dense_output=dense,
    )
    if not sol.success:
        raise GroundStateError(f"radial IVP failed at q0={q0}: {sol.message}")
    if sol.t_events[0].size:
        return "cross", sol
    if sol.t_events[1].size:
        return "turn", sol
    return "none", sol


def shooting_oracle(
    params: PhysicalParams,
    bracket=(1.0, 8.0),
    n_r: int = 4096,
    r_max: float = 30.0,
    q0_tol: float = 5e-15,
) -> RadialProfile:
    """Bisection on the central value Q(0) between the two generic fates of
    the outward shot; samples the separating (decaying) solution on the same
    half-offset grid as solve_profile.

    Past SHOOT_TAIL_MATCH_R the shot is replaced by the matched decaying
    far field A e^(-r)/r  (the exact decaying solution of the linearized
    equation u'' = u for u = rQ; the cubic correction is O(e^(-3r))).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    fate_lo, _ = _shoot(params, lo)
    fate_hi, _ = _shoot(params, hi)
    if fate_lo != "turn" or fate_hi != "cross":
        raise GroundStateError(
            f"bracket does not separate the two shot outcomes: "
            f"q0={lo} -> {fate_lo}, q0={hi} -> {fate_hi}"
        )
    while hi - lo > q0_tol * hi:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fate, _ = _shoot(params, mid)
        # Monotone dichotomy: every outcome inside the bracket must be one of
        # the two bracket fates, otherwise bisection is invalid.
        if fate == "turn":
            lo = mid
        elif fate == "cross":
            hi = mid
        else:
            raise GroundStateError(f"ambiguous shot outcome at q0={mid}")
    q0 = 0.5 * (lo + hi)

    _fate, sol = _shoot(params, q0, dense=True)
    r_good = min(SHOOT_TAIL_MATCH_R, float(sol.t[-1]))
    if r_good < 10.0:
        raise GroundStateError(f"separatrix shot died too early (r = {r_good:.2f})")
    q_match, dq_match = sol.sol(r_good)
    amp = q_match * r_good * math.exp(r_good)
    # Consistency of the matched tail: the logarithmic derivative of the shot
    # must agree with d/dr log(e^(-r)/r) = -(1 + 1/r).
    slope_expect = -(1.0 + 1.0 / r_good) * q_match
    if abs(dq_match - slope_expect) > 1e-4 * abs(dq_match):
        raise GroundStateError(
            f"tail mismatch at r={r_good}: Q'={dq_match:.6e}, expected {slope_expect:.6e}"
        )

    h = r_max / n_r
    r = (np.arange(n_r) + 0.5) * h
    q = np.empty_like(r)
    inner = r <= r_good
    q[inner] = sol.sol(r[inner])[0]
    q[~inner] = amp * np.exp(-r[~inner]) / r[~inner]
    if not np.all(q > 0.0):
        raise GroundStateError("shooting profile not positive")
    if not np.all(np.diff(q) < 0.0):
        raise GroundStateError("shooting profile not strictly decreasing")
    log.info("shooting oracle b=%.4g: Q(0) = %.12f", params.b, q0)
    return RadialProfile(r=r, q=q, h_r=h, r_max=r_max, b=params.b, iterations=0, residual=float("nan"))


# ---------------------------------------------------------------------------
# Validation and reports
# ---------------------------------------------------------------------------


def radial_observables(profile: RadialProfile):
    """(M, K, P) by radial quadrature; K through the same Dirichlet flux form
    that defines the finite-difference operator, so that the multiply-by-Q
    identity closes at the level of the iteration residual."""
    r, q, h = profile.r, profile.q, profile.h_r
    n = q.size
    measure = r ** 2 * h
    mass = 4.0 * math.pi * float(np.sum(q ** 2 * measure))
    beta = (np.arange(1, n + 1) * h) ** 2
    dq = np.empty(n)
    dq[:-1] = (q[1:] - q[:-1]) / h
    dq[-1] = (0.0 - q[-1]) / h  # Dirichlet ghost at r_max
    kinetic = 4.0 * math.pi * float(np.sum(beta * dq ** 2 * h))
    w = r ** (-profile.b)
    potential = 4.0 * math.pi * float(np.sum(w * q ** 4 * measure))
    return mass, kinetic, potential


def validate_ground_state(
    profile: RadialProfile,
    params: PhysicalParams,
    res_tol: float = 1e-6,
) -> GroundStateReport:
    """Check the two multiply-and-integrate identities and package the
    threshold constants.  Rejects profiles whose residuals exceed res_tol."""
    if abs(params.b - profile.b) > 1e-14:
        raise GroundStateError(f"profile solved at b={profile.b}, asked to validate at b={params.b}")
    b = params.b
    mass, kinetic, potential = radial_observables(profile)
    energy = 0.5 * kinetic - 0.25 * potential
    res1 = abs(potential - kinetic - mass) / potential
    res2 = abs((1.0 - b) * kinetic - (3.0 + b) * mass) / kinetic
    if res1 > res_tol or res2 > res_tol:
        raise GroundStateError(
            f"integral identities violated: res1={res1:.3e}, res2={res2:.3e} (tol {res_tol:.1e})"
        )
    threshold_kinetic = kinetic ** (0.5 * (1.0 + b)) * mass ** (0.5 * (1.0 - b))
    threshold_energy = energy ** (1.0 + b) * mass ** (1.0 - b)
    sharp_constant = (4.0 / (3.0 + b)) / threshold_kinetic
    # Second form of the sharp-constant relation, an exact algebraic
    # consequence of the two identities; kept as a self-check.
    expect = (
        16.0 / (3.0 + b) ** (3.0 + b)
        * ((1.0 + b) / 2.0) ** (1.0 + b)
        / sharp_constant ** 2
    )
    relation_res = abs(threshold_energy - expect) / expect
    return GroundStateReport(
        b=b,
        mass=mass,
        kinetic=kinetic,
        potential=potential,
        energy=energy,
        sharp_constant=sharp_constant,
        threshold_energy=threshold_energy,
        threshold_kinetic=threshold_kinetic,
        pohozaev_res1=res1,
        pohozaev_res2=res2,
        sharp_relation_res=relation_res,
        n_r=profile.n,
        r_max=profile.r_max,
        tol=profile.residual,
        iterations=profile.iterations,
        equation_residual=profile.residual,
    )


def gn_functional(mass: float, kinetic: float, potential: float, b: float) -> float:
    """Weighted interpolation ratio  P / (M^((1-b)/2) K^((3+b)/2)); equals the
    sharp constant exactly at the ground state."""
    return potential / (mass ** (0.5 * (1.0 - b)) * kinetic ** (0.5 * (3.0 + b)))


# ---------------------------------------------------------------------------
# Lift to the 3D grid
# ---------------------------------------------------------------------------


def lift_profile(
    profile: RadialProfile,
    grid: GridSpec,
    amplitude: float = 1.0,
    center=(0.0, 0.0, 0.0),
    velocity=(0.0, 0.0, 0.0),
) -> ComplexField:
    """Cubic-spline interpolation of amplitude * q(|x - center|) onto the grid,
    modulated by exp(i velocity . x).

    Requires the profile to cover the box corners seen from the center,
    r_max >= (sqrt(3)/2) L + |center|.
    """
    shift = math.sqrt(sum(c * c for c in center))
    need = math.sqrt(3.0) / 2.0 * grid.length + shift
    if profile.r_max < need - 1e-12:
        raise GroundStateError(
            f"profile covers r <= {profile.r_max}, box corners reach {need:.3f}"
        )
    spline = CubicSpline(profile.r, profile.q, extrapolate=True)
    if shift == 0.0:
        r = radius_field(grid)
    else:
        ax = _axis(grid)
        r = np.sqrt(
            (ax[:, None, None] - center[0]) ** 2
            + (ax[None, :, None] - center[1]) ** 2
            + (ax[None, None, :] - center[2]) ** 2
        )
    vals = amplitude * spline(r)
    vals[r > profile.r_max] = 0.0
    vals = vals.astype(np.complex128)
    if any(v != 0.0 for v in velocity):
        ax = _axis(grid)
        phase = (
            velocity[0] * ax[:, None, None]
            + velocity[1] * ax[None, :, None]
            + velocity[2] * ax[None, None, :]
        )
        vals *= np.exp(1j * phase)
    return ComplexField(vals, grid)


# ---------------------------------------------------------------------------
# Disk cache (profiles are cheap to recompute but the CLI reuses them across
# runs; reports are written next to the profile)
# ---------------------------------------------------------------------------


def _cache_key(b: float, n_r: int, r_max: float, tol: float) -> str:
    return f"profile_b{b:.6g}_n{n_r}_rmax{r_max:.6g}_tol{tol:.3g}.npz"


def solve_cached(
    params: PhysicalParams,
    cache_dir: str | Path,
    n_r: int = 4096,
    r_max: float = 30.0,
    tol: float = 1e-10,
) -> RadialProfile:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / _cache_key(params.b, n_r, r_max, tol)
    if path.exists():
        with np.load(path) as data:
            return RadialProfile(
                r=data["r"],
                q=data["q"],
                h_r=float(data["h_r"]),
                r_max=float(data["r_max"]),
                b=float(data["b"]),
                iterations=int(data["iterations"]),
                residual=float(data["residual"]),
            )
    profile = solve_profile(params, n_r=n_r, r_max=r_max, tol=tol)
    # atomic publish so concurrent sweep workers never observe a partial file
    tmp = path.with_suffix(f".tmp{os.getpid()}.npz")
    np.savez(
        tmp,
        r=profile.r,
        q=profile.q,
        h_r=profile.h_r,
        r_max=profile.r_max,
        b=profile.b,
        iterations=profile.iterations,
        residual=profile.residual,
    )
    os.replace(tmp, path)
    return profile


REPORT_FIELDS = (
    "b",
    "mass",
    "kinetic",
    "potential",
    "energy",
    "sharp_constant",
    "threshold_energy",
    "threshold_kinetic",
    "pohozaev_res1",
    "pohozaev_res2",
    "sharp_relation_res",
    "n_r",
    "r_max",
    "tol",
    "iterations",
    "equation_residual",
)


def save_report(report: GroundStateReport, path: str | Path) -> None:
    lines = ["[ground_state]"]
    for name in REPORT_FIELDS:
        value = getattr(report, name)
        if isinstance(value, float):
            lines.append(f"{name} = {value!r}")
        else:
            lines.append(f"{name} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_report(path: str | Path) -> GroundStateReport:
    text = Path(path).read_text()
    values = {}
    section_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[ground_state]":
            section_seen = True
            continue
        if "=" not in line:
            raise GroundStateError(f"{path}:{lineno}: malformed report line {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    if not section_seen:
        raise GroundStateError(f"{path}: missing [ground_state] section")
    missing = [f for f in REPORT_FIELDS if f not in values]
    if missing:
        raise GroundStateError(f"{path}: report missing fields {missing}")
    kwargs = {}
    for name in REPORT_FIELDS:
        raw = values[name]
        if name in ("n_r", "iterations"):
            kwargs[name] = int(raw)
        else:
            kwargs[name] = float(raw)
    return GroundStateReport(**kwargs)
