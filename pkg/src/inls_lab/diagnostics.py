"""Everything the scattering analysis turns on: threshold classification,
the virial action and its exact time-derivative identity, the hybrid
virial/Morawetz weight, localized-mass and flux monitors, the cutoff
kinetic-energy identity, windowed space-time norms, and verdicts.

Conventions:

* the virial weight is radial, described by m(r) = da/dr, with
  m = 2r inside R/2 (so a = |x|^2 there) and m = 2R outside R (a = 2R|x|),
  bridged by the monotone cubic Hermite interpolant on [R/2, R];
* radius = inf denotes the pure a = |x|^2 weight on the whole box;
* all integrals are rectangle sums; gradients are spectral;
* the cutoff identity is evaluated on a 2x zero-padded grid, where every
  integrand is a trigonometric polynomial below the alias threshold, so the
  identity holds to roundoff rather than to aliasing error.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    ComplexField,
    GridSpec,
    PhysicalParams,
    boundary_mass,
    cutoff_radial_derivative,
    fftn,
    fourier_pad,
    ifftn,
    integrate,
    kinetic_from_spectrum,
    radius_field,
    sample_cutoff,
    sample_weight,
    spectral_gradient,
    wavenumber_sq,
)
from .ground_state import GroundStateReport

log = logging.getLogger(__name__)

# The cubic Hermite bridge overshoots the inner plateau of Delta a = 6
# slightly (sup ~ 6.9, attained inside the annulus; see the weight tests);
# anything above this bound means a construction bug.
DELTA_A_BOUND = 7.0

VERDICT_SCATTERING = "scattering-consistent"
VERDICT_SOLITON = "soliton-like"
VERDICT_GROWTH = "growth"

DEFAULT_EVACUATION_FRACTION = 0.25


class DiagnosticsError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Threshold classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    below_energy: bool
    below_kinetic: bool
    margin_energy: float
    margin_kinetic: float
    consistent: bool

    @property
    def below(self) -> bool:
        return self.below_energy and self.below_kinetic


def classify_threshold(
    u: ComplexField,
    gs: GroundStateReport,
    params: PhysicalParams,
) -> Classification:
    """Compare the field's scale-invariant threshold quantities with the
    ground state's.  Margin < 1 means strictly below.  A negative energy
    together with below-threshold kinetic size cannot occur below threshold;
    such a combination is flagged as inconsistent (numerics suspect)."""
    from .core import observables  # local import to keep module init cheap

    obs = observables(u, params)
    return classify_from_observables(obs.mass, obs.kinetic, obs.energy, gs)


def classify_from_observables(
    mass: float, kinetic: float, energy: float, gs: GroundStateReport
) -> Classification:
    margin_e, margin_k = gs.amplitude_margins(mass, kinetic, energy)
    below_e = margin_e < 1.0
    below_k = margin_k < 1.0
    consistent = not (energy < 0.0 and below_k)
    if not consistent:
        log.warning(
            "inconsistent classification: E=%.6e < 0 with kinetic margin %.3f < 1",
            energy,
            margin_k,
        )
    return Classification(
        below_energy=below_e,
        below_kinetic=below_k,
        margin_energy=margin_e,
        margin_kinetic=margin_k,
        consistent=consistent,
    )


# ---------------------------------------------------------------------------
# Virial weight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VirialWeight:
    """Radial weight a(x) described through m = da/dr and derived fields.

    All arrays live on the grid.  m_over_r is the continuous extension
    (m/r -> 2 at the origin, which always lies in the inner pure region).
    """

    grid: GridSpec
    radius: float
    m: np.ndarray
    m_prime: np.ndarray
    m_over_r: np.ndarray
    delta_a: np.ndarray
    lap_delta_a: np.ndarray

    @property
    def is_pure(self) -> bool:
        return math.isinf(self.radius)

    def region_masks(self):
        """(inner, annulus, outer) masks; they partition the grid."""
        r = radius_field(self.grid)
        if self.is_pure:
            inner = np.ones(r.shape, dtype=bool)
            empty = np.zeros(r.shape, dtype=bool)
            return inner, empty, empty
        inner = r < 0.5 * self.radius
        outer = r >= self.radius
        annulus = ~(inner | outer)
        return inner, annulus, outer


def pure_virial_weight(grid: GridSpec) -> VirialWeight:
    """a = |x|^2 everywhere: m = 2r, Delta a = 6, all higher terms zero."""
    r = radius_field(grid)
    two = np.full(r.shape, 2.0)
    zero = np.zeros(r.shape)
    return VirialWeight(
        grid=grid,
        radius=math.inf,
        m=2.0 * r,
        m_prime=two,
        m_over_r=two.copy(),
        delta_a=np.full(r.shape, 6.0),
        lap_delta_a=zero,
    )


def build_virial_weight(grid: GridSpec, radius: float) -> VirialWeight:
    """Hybrid weight: m = 2r inside R/2, m = 2R outside R, cubic Hermite
    bridge with m(R/2) = R, m'(R/2) = 2, m(R) = 2R, m'(R) = 0 in between.
    The bridge is monotone (m' = 2(1-s)(1+3s) >= 0 on [0,1]), so the
    Hessian of a stays positive semidefinite."""
    if math.isinf(radius):
        return pure_virial_weight(grid)
    if not (0.0 < radius < 0.4 * grid.length):
        raise DiagnosticsError(
            f"matching radius {radius} outside the safe range (0, 0.4 L = {0.4 * grid.length})"
        )
    r = radius_field(grid)
    R = float(radius)
    s = (2.0 * r / R - 1.0).clip(0.0, 1.0)  # bridge coordinate on [R/2, R]
    inner = r <= 0.5 * R
    outer = r >= R
    bridge = ~(inner | outer)

    m = np.where(inner, 2.0 * r, 2.0 * R)
    m_prime = np.where(inner, 2.0, 0.0)
    m2 = np.zeros(r.shape)
    m3 = np.zeros(r.shape)
    sb = s[bridge]
    m[bridge] = R * (1.0 + sb + sb ** 2 - sb ** 3)
    m_prime[bridge] = 2.0 * (1.0 + 2.0 * sb - 3.0 * sb ** 2)
    m2[bridge] = (8.0 - 24.0 * sb) / R
    m3[bridge] = -48.0 / R ** 2

    rsafe = np.where(r > 0.0, r, 1.0)
    m_over_r = np.where(inner, 2.0, m / rsafe)
    delta_a = m_prime + 2.0 * m_over_r
    lap_delta_a = np.where(bridge, m3 + 4.0 * m2 / rsafe, 0.0)

    if float(m_prime.min()) < 0.0 or float(m.min()) < 0.0:
        raise DiagnosticsError("virial weight lost monotonicity (construction bug)")
    if float(np.abs(delta_a).max()) > DELTA_A_BOUND:
        raise DiagnosticsError(
            f"|Delta a| reached {float(np.abs(delta_a).max()):.3f} > {DELTA_A_BOUND}"
        )
    return VirialWeight(
        grid=grid,
        radius=R,
        m=m,
        m_prime=m_prime,
        m_over_r=m_over_r,
        delta_a=delta_a,
        lap_delta_a=lap_delta_a,
    )


# ---------------------------------------------------------------------------
# Virial action, identity right-hand side, region decomposition
# ---------------------------------------------------------------------------


def _radial_pieces(u: ComplexField, uh: np.ndarray | None = None):
    """Spectral gradient split into radial/angular moduli plus |u|^2/|u|^4."""
    g = u.grid
    gx, gy, gz = spectral_gradient(u, uh)
    x = g.axis()
    xdot = (
        x[:, None, None] * gx
        + x[None, :, None] * gy
        + x[None, None, :] * gz
    )
    grad_sq = (
        gx.real ** 2 + gx.imag ** 2
        + gy.real ** 2 + gy.imag ** 2
        + gz.real ** 2 + gz.imag ** 2
    )
    r = radius_field(g)
    rsafe = np.where(r > 0.0, r, 1.0)
    radial_sq = (xdot.real ** 2 + xdot.imag ** 2) / rsafe ** 2
    radial_sq = np.minimum(radial_sq, grad_sq)  # roundoff guard: |d_r u| <= |grad u|
    angular_sq = grad_sq - radial_sq
    dens = u.values.real ** 2 + u.values.imag ** 2
    return {
        "xdot": xdot,
        "grad_sq": grad_sq,
        "radial_sq": radial_sq,
        "angular_sq": angular_sq,
        "dens": dens,
        "rsafe": rsafe,
    }


def virial_action(u: ComplexField, w: VirialWeight, uh: np.ndarray | None = None) -> float:
    """A_a = 2 Im int conj(u) grad(a).grad(u) = 2 Im int conj(u) (m/r) x.grad(u)."""
    p = _radial_pieces(u, uh)
    vals = u.values
    integrand = w.m_over_r * (vals.real * p["xdot"].imag - vals.imag * p["xdot"].real)
    return 2.0 * integrate(u.grid, integrand)


def virial_rhs(
    u: ComplexField,
    w: VirialWeight,
    params: PhysicalParams,
    uh: np.ndarray | None = None,
    pieces=None,
    weight_samples: np.ndarray | None = None,
) -> float:
    """Exact time derivative of the action along the flow:

        4 int [m' |d_r u|^2 + (m/r) |angular grad u|^2]
        - int |u|^2 LapLap(a)
        - int w |u|^4 [Delta a + b (m/r)]

    With the pure weight this collapses to 8 K - 2(3+b) P pointwise.
    """
    p = pieces if pieces is not None else _radial_pieces(u, uh)
    wgt = weight_samples if weight_samples is not None else sample_weight(u.grid, params)
    bilinear = 4.0 * integrate(
        u.grid, w.m_prime * p["radial_sq"] + w.m_over_r * p["angular_sq"]
    )
    if w.is_pure:
        lap_term = 0.0  # LapLap(a) vanishes identically for a = |x|^2
    else:
        lap_term = integrate(u.grid, p["dens"] * w.lap_delta_a)
    quartic = p["dens"] ** 2
    coupling_term = integrate(
        u.grid, wgt * quartic * (w.delta_a + params.b * w.m_over_r)
    )
    return bilinear - lap_term - coupling_term


def cartesian_bilinear(u: ComplexField, w: VirialWeight, uh: np.ndarray | None = None) -> float:
    """4 sum Re[ a_jk conj(u_j) u_k ] assembled from the Hessian
    a_jk = (m/r) delta_jk + (m' - m/r) x_j x_k / r^2 — the independent
    Cartesian route to the bilinear term (consistency check)."""
    g = u.grid
    grads = spectral_gradient(u, uh)
    x = g.axis()
    axes = [x[:, None, None], x[None, :, None], x[None, None, :]]
    r = radius_field(g)
    rsafe = np.where(r > 0.0, r, 1.0)
    aniso = (w.m_prime - w.m_over_r) / rsafe ** 2
    total = 0.0
    for j in range(3):
        for k in range(3):
            gj, gk = grads[j], grads[k]
            re_jk = gj.real * gk.real + gj.imag * gk.imag
            a_jk = aniso * (axes[j] * axes[k])
            if j == k:
                a_jk = a_jk + w.m_over_r
            total += integrate(g, a_jk * re_jk)
    return 4.0 * total


def mor_terms(
    u: ComplexField,
    w: VirialWeight,
    params: PhysicalParams,
    uh: np.ndarray | None = None,
    weight_samples: np.ndarray | None = None,
):
    """Region-restricted pieces of the identity, written in the per-region
    simplified forms; their sum closes on virial_rhs because the regions
    partition the grid.

    inner  (r <  R/2): 8 |grad u|^2 - (6 + 2b) w |u|^4
    bridge ([R/2, R)): the full piecewise integrand
    outer  (r >= R):   8R |angular grad u|^2 / r - |u|^2 LapLap a
                       - 2R (2+b) w |u|^4 / r            (LapLap a = 0 there)
    """
    if w.is_pure:
        raise DiagnosticsError("region decomposition needs a finite matching radius")
    g = u.grid
    p = _radial_pieces(u, uh)
    wgt = weight_samples if weight_samples is not None else sample_weight(g, params)
    inner, bridge, outer = w.region_masks()
    quartic = p["dens"] ** 2
    h3 = g.cell_volume

    t_inner = h3 * (
        8.0 * float(np.sum(p["grad_sq"][inner]))
        - (6.0 + 2.0 * params.b) * float(np.sum((wgt * quartic)[inner]))
    )
    bil = 4.0 * (w.m_prime * p["radial_sq"] + w.m_over_r * p["angular_sq"])
    full = bil - p["dens"] * w.lap_delta_a - wgt * quartic * (w.delta_a + params.b * w.m_over_r)
    t_bridge = h3 * float(np.sum(full[bridge]))
    R = w.radius
    t_outer = h3 * (
        8.0 * R * float(np.sum((p["angular_sq"] / p["rsafe"])[outer]))
        - 2.0 * R * (2.0 + params.b) * float(np.sum((wgt * quartic / p["rsafe"])[outer]))
    )
    return t_inner, t_bridge, t_outer


def virial_identity_residual(times, action, rhs):
    """Centered-difference d/dt of the sampled action against the sampled
    right-hand side.  Returns (interior times, absolute residual series,
    residual normalized by max |rhs|)."""
    times = np.asarray(times, dtype=float)
    action = np.asarray(action, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if times.size < 3:
        raise DiagnosticsError("need at least 3 samples for the identity residual")
    dadt = (action[2:] - action[:-2]) / (times[2:] - times[:-2])
    resid = np.abs(dadt - rhs[1:-1])
    scale = float(np.max(np.abs(rhs)))
    if scale == 0.0:
        scale = 1.0
    return times[1:-1], resid, resid / scale


# ---------------------------------------------------------------------------
# Localized mass, flux, coercivity, cutoff identity
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _cutoff_cached(grid: GridSpec, radius: float) -> np.ndarray:
    chi = sample_cutoff(grid, radius)
    chi.setflags(write=False)
    return chi


@lru_cache(maxsize=64)
def _cutoff_derivative_cached(grid: GridSpec, radius: float) -> np.ndarray:
    dchi = cutoff_radial_derivative(grid, radius)
    dchi.setflags(write=False)
    return dchi


def local_mass(u: ComplexField, radius: float) -> float:
    """Smooth-cutoff mass int chi_R |u|^2 (chi = 1 inside R/2, 0 outside R)."""
    chi = _cutoff_cached(u.grid, radius)
    dens = u.values.real ** 2 + u.values.imag ** 2
    return integrate(u.grid, chi * dens)


def mass_flux(u: ComplexField, radius: float, uh: np.ndarray | None = None) -> float:
    """d/dt of local_mass by the continuity identity  d_t |u|^2 =
    -2 div Im(conj(u) grad u):  integrating against chi and moving the
    divergence over gives  +2 int chi'(r) Im(conj(u) d_r u)  (chi' <= 0, so
    outgoing flux makes this negative, draining the local mass)."""
    g = u.grid
    p = _radial_pieces(u, uh)
    dchi = _cutoff_derivative_cached(g, radius)
    vals = u.values
    # Im(conj(u) x.grad(u)) / r, with chi' = 0 on both plateaus (covers r=0)
    im_rad = (vals.real * p["xdot"].imag - vals.imag * p["xdot"].real) / p["rsafe"]
    return 2.0 * integrate(g, dchi * im_rad)


def mass_flux_residual(times, local_series, flux_series):
    """FD d/dt of the local mass against the flux integral; returns
    (interior times, residual, normalized residual, envelope max |dL/dt|)."""
    times = np.asarray(times, dtype=float)
    loc = np.asarray(local_series, dtype=float)
    flx = np.asarray(flux_series, dtype=float)
    if times.size < 3:
        raise DiagnosticsError("need at least 3 samples for the flux residual")
    dldt = (loc[2:] - loc[:-2]) / (times[2:] - times[:-2])
    resid = np.abs(dldt - flx[1:-1])
    scale = float(np.max(np.abs(flx)))
    if scale == 0.0:
        scale = 1.0
    return times[1:-1], resid, resid / scale, float(np.max(np.abs(dldt)))


def coercivity_gap(
    u: ComplexField,
    radius: float,
    params: PhysicalParams,
    gs: GroundStateReport | None = None,
):
    """Localized coercivity quantity for v = chi_R u:

        gap = int |grad v|^2 - (3+b)/4 int w |v|^4

    Returns (gap, delta_prime) with delta_prime = gap / int w |v|^4 (nan for
    vanishing denominator).  A negative gap for a below-threshold field is a
    reportable finding, not an error."""
    g = u.grid
    chi = _cutoff_cached(g, radius)
    v = ComplexField(chi * u.values, g)
    vh = fftn(v.values)
    kin = kinetic_from_spectrum(g, vh)
    dens = v.values.real ** 2 + v.values.imag ** 2
    wgt = sample_weight(g, params)
    pot = integrate(g, wgt * dens * dens)
    gap = kin - 0.25 * (3.0 + params.b) * pot
    delta_prime = gap / pot if pot > 0.0 else math.nan
    return gap, delta_prime


def benstrick_residual(u: ComplexField, radius: float) -> float:
    """Residual of the cutoff kinetic identity

        int chi^2 |grad u|^2 = int |grad(chi u)|^2 + int chi Lap(chi) |u|^2

    normalized by 1 + LHS.  Every term is evaluated on a 2x zero-padded
    grid: chi, u, and their products are then trigonometric polynomials
    below the alias threshold of the fine grid, so the rectangle sums ARE
    the exact integrals and the identity closes to roundoff."""
    g = u.grid
    chi = _cutoff_cached(g, radius)
    n_f = 2 * g.n
    h3_f = (g.length / n_f) ** 3

    chi_hat = fftn(np.asarray(chi, dtype=np.complex128))
    k2 = wavenumber_sq(g)
    lap_chi_hat = -k2 * chi_hat

    U = fourier_pad(u.values)
    X = fourier_pad_spectrum(chi_hat, g.n)
    LX = fourier_pad_spectrum(lap_chi_hat, g.n)

    # gradient of u from the coarse spectrum, padded per axis
    uh = fftn(u.values)
    k = g.wavenumbers()
    shapes = [(g.n, 1, 1), (1, g.n, 1), (1, 1, g.n)]
    grad_sq_fine = np.zeros((n_f,) * 3)
    for shape in shapes:
        comp = fourier_pad_spectrum(uh * (1j * k.reshape(shape)), g.n)
        grad_sq_fine += comp.real ** 2 + comp.imag ** 2

    lhs = h3_f * float(np.sum(X.real ** 2 * grad_sq_fine))

    prod = X * U  # exact values of chi*u on the fine grid (bandwidth 2x coarse)
    ph = fftn(prod)
    kf = 2.0 * np.pi * np.fft.fftfreq(n_f, d=g.length / n_f)
    gsq = np.zeros((n_f,) * 3)
    fshapes = [(n_f, 1, 1), (1, n_f, 1), (1, 1, n_f)]
    for shape in fshapes:
        comp = ifftn(ph * (1j * kf.reshape(shape)))
        gsq += comp.real ** 2 + comp.imag ** 2
    rhs1 = h3_f * float(np.sum(gsq))
    rhs2 = h3_f * float(np.sum(X.real * LX.real * (U.real ** 2 + U.imag ** 2)))
    return abs(lhs - (rhs1 + rhs2)) / (1.0 + abs(lhs))


def fourier_pad_spectrum(spec_coarse: np.ndarray, n: int) -> np.ndarray:
    """Like core.fourier_pad but starting from a coarse spectrum."""
    import scipy.fft as sfft

    nf = 2 * n
    spec = sfft.fftshift(spec_coarse.copy())
    spec[0, :, :] = 0.0
    spec[:, 0, :] = 0.0
    spec[:, :, 0] = 0.0
    pad = (nf - n) // 2
    big = np.zeros((nf, nf, nf), dtype=np.complex128)
    big[pad : pad + n, pad : pad + n, pad : pad + n] = spec
    big = sfft.ifftshift(big)
    return sfft.ifftn(big, workers=1) * 8.0


# ---------------------------------------------------------------------------
# Space-time averages and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MorawetzReport:
    horizon: float
    radius: float
    average: float
    bound_value: float
    fitted_constant: float


def auto_morawetz_radius(horizon: float, b: float) -> float:
    """The coupled scaling R = T^(1/(1+b)) that balances R/T against R^-b."""
    return horizon ** (1.0 / (1.0 + b))


def morawetz_report(times, ball_series, radius: float, horizon: float, b: float) -> MorawetzReport:
    """Trapezoid time average of the sampled weighted quartic ball integrals
    over [0, horizon], compared with the dispersive bound R/T + R^-b."""
    times = np.asarray(times, dtype=float)
    vals = np.asarray(ball_series, dtype=float)
    sel = times <= horizon + 1e-12
    if int(np.sum(sel)) < 2 or float(times.max()) < horizon - 1e-9:
        raise DiagnosticsError(f"trajectory does not cover the horizon T={horizon}")
    tt, vv = times[sel], vals[sel]
    average = float(np.trapezoid(vv, tt)) / horizon
    bound = radius / horizon + radius ** (-b)
    return MorawetzReport(
        horizon=horizon,
        radius=radius,
        average=average,
        bound_value=bound,
        fitted_constant=average / bound,
    )


def weighted_ball_integral(
    u: ComplexField,
    radius: float,
    params: PhysicalParams,
    weight_samples: np.ndarray | None = None,
) -> float:
    """int chi_R w |u|^4 — the integrand of the Morawetz space-time average."""
    chi = _cutoff_cached(u.grid, radius)
    wgt = weight_samples if weight_samples is not None else sample_weight(u.grid, params)
    dens = u.values.real ** 2 + u.values.imag ** 2
    return integrate(u.grid, chi * wgt * dens * dens)


@dataclass(frozen=True)
class ScatteringReport:
    verdict: str
    cauchy_times: np.ndarray
    cauchy_increments: np.ndarray
    strichartz_times: np.ndarray
    strichartz_windows: np.ndarray
    local_mass_times: np.ndarray
    local_mass_series: np.ndarray
    evacuated: bool
    increments_monotone: bool
    final_increment: float
    evacuation_radius: float
    evacuation_fraction: float


def monotone_nonincreasing_tail(values: np.ndarray) -> bool:
    """True when the last half of the sequence is non-increasing up to a
    roundoff-level slack (all-zero sequences qualify)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return False
    tail = v[v.size // 2 :] if v.size >= 4 else v
    slack = 1e-9 * float(np.max(np.abs(v))) if float(np.max(np.abs(v))) > 0 else 0.0
    return bool(np.all(np.diff(tail) <= slack))


def scattering_report(
    traj_status: str,
    cauchy_times,
    cauchy_increments,
    strichartz_times,
    strichartz_windows,
    local_times,
    local_series,
    evacuation_radius: float,
    evacuation_fraction: float = DEFAULT_EVACUATION_FRACTION,
) -> ScatteringReport:
    """Finite-horizon surrogate verdict:

    * growth: the kinetic guard tripped;
    * scattering-consistent: interaction-representation increments
      non-increasing over the last half AND the local mass at the monitor
      radius dipped below the configured fraction of its peak;
    * soliton-like: everything else.
    """
    ct = np.asarray(cauchy_times, dtype=float)
    cv = np.asarray(cauchy_increments, dtype=float)
    lt = np.asarray(local_times, dtype=float)
    lv = np.asarray(local_series, dtype=float)
    peak = float(np.max(lv)) if lv.size else 0.0
    evacuated = bool(lv.size and float(np.min(lv)) <= evacuation_fraction * peak)
    monotone = monotone_nonincreasing_tail(cv) if cv.size else False
    final_inc = float(cv[-1]) if cv.size else math.nan
    if traj_status == "growth":
        verdict = VERDICT_GROWTH
    elif monotone and evacuated:
        verdict = VERDICT_SCATTERING
    else:
        verdict = VERDICT_SOLITON
    return ScatteringReport(
        verdict=verdict,
        cauchy_times=ct,
        cauchy_increments=cv,
        strichartz_times=np.asarray(strichartz_times, dtype=float),
        strichartz_windows=np.asarray(strichartz_windows, dtype=float),
        local_mass_times=lt,
        local_mass_series=lv,
        evacuated=evacuated,
        increments_monotone=monotone,
        final_increment=final_inc,
        evacuation_radius=evacuation_radius,
        evacuation_fraction=evacuation_fraction,
    )


def strichartz_spatial_exponent(b: float) -> float:
    """Spatial exponent 6/(1-b) of the window norm (time exponent is 4)."""
    return 6.0 / (1.0 - b)


# ---------------------------------------------------------------------------
# Observers for evolve()
# ---------------------------------------------------------------------------


def base_observer(gs: GroundStateReport | None):
    """M, K, P, E, the two threshold margins, and the boundary-mass monitor."""

    def observe(view):
        g = view.u.grid
        dens = view.u.values.real ** 2 + view.u.values.imag ** 2
        mass = integrate(g, dens)
        kinetic = kinetic_from_spectrum(g, view.uh)
        potential = integrate(g, view.weight * dens * dens)
        energy = 0.5 * kinetic - 0.25 * potential
        out = {
            "M": mass,
            "K": kinetic,
            "P": potential,
            "E": energy,
            "boundary_mass": boundary_mass(view.u),
        }
        if gs is not None:
            me, mk = gs.amplitude_margins(mass, kinetic, energy)
            out["threshold_energy_margin"] = me
            out["threshold_kinetic_margin"] = mk
        return out

    return observe


def virial_observer(weight: VirialWeight, params: PhysicalParams):
    """A_a and the identity right-hand side at every sample."""

    def observe(view):
        pieces = _radial_pieces(view.u, view.uh)
        vals = view.u.values
        integrand = weight.m_over_r * (
            vals.real * pieces["xdot"].imag - vals.imag * pieces["xdot"].real
        )
        action = 2.0 * integrate(view.u.grid, integrand)
        rhs = virial_rhs(
            view.u,
            weight,
            params,
            pieces=pieces,
            weight_samples=view.weight,
        )
        return {"A_a": action, "virial_rhs": rhs}

    return observe


def local_mass_observer(radii):
    radii = tuple(radii)

    def observe(view):
        return {f"local_mass_R{r:g}": local_mass(view.u, r) for r in radii}

    return observe


def morawetz_observer(radii, params: PhysicalParams):
    radii = tuple(radii)

    def observe(view):
        return {
            f"morawetz_ball_R{r:g}": weighted_ball_integral(
                view.u, r, params, weight_samples=view.weight
            )
            for r in radii
        }

    return observe


def mass_flux_observer(radii):
    radii = tuple(radii)

    def observe(view):
        pieces = _radial_pieces(view.u, view.uh)
        vals = view.u.values
        im_rad = (
            vals.real * pieces["xdot"].imag - vals.imag * pieces["xdot"].real
        ) / pieces["rsafe"]
        out = {}
        for r in radii:
            dchi = _cutoff_derivative_cached(view.u.grid, r)
            out[f"mass_flux_R{r:g}"] = 2.0 * integrate(view.u.grid, dchi * im_rad)
        return out

    return observe


class CauchyIncrementObserver:
    """H1 increments of the interaction representation v(t) = free(-t) u(t),
    computed spectrally at checkpoint samples (no extra transforms)."""

    def __init__(self):
        self._prev = None
        self._prev_t = None

    def __call__(self, view):
        if not view.is_checkpoint:
            return {}
        g = view.u.grid
        k2 = wavenumber_sq(g)
        vhat = view.uh * np.exp(1j * view.t * k2)
        if self._prev is None:
            self._prev = vhat
            self._prev_t = view.t
            return {}
        diff = vhat - self._prev
        h1_sq = (
            g.cell_volume
            * float(np.sum((1.0 + k2) * (diff.real ** 2 + diff.imag ** 2)))
            / g.n ** 3
        )
        self._prev = vhat
        self._prev_t = view.t
        return {"cauchy_increment": math.sqrt(max(h1_sq, 0.0))}


class StrichartzWindowObserver:
    """Discrete L^4-in-time norm of ||u||_{L^{6/(1-b)}} accumulated between
    consecutive checkpoints (trapezoid rule within the window)."""

    def __init__(self, b: float):
        self.p = strichartz_spatial_exponent(b)
        self._sum = 0.0
        self._last_t = None
        self._last_val = None

    def __call__(self, view):
        g = view.u.grid
        dens = view.u.values.real ** 2 + view.u.values.imag ** 2
        lp = integrate(g, dens ** (0.5 * self.p)) ** (1.0 / self.p)
        val4 = lp ** 4
        if self._last_t is not None:
            self._sum += 0.5 * (val4 + self._last_val) * (view.t - self._last_t)
        self._last_t = view.t
        self._last_val = val4
        if view.is_checkpoint and view.step > 0:
            out = {"strichartz_window": self._sum ** 0.25}
            self._sum = 0.0
            return out
        return {}
