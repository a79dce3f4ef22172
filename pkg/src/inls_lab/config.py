"""Experiment configuration: flat INI sections, strict parsing, validation.

The grammar is deliberately small — five sections of scalar keys plus an
optional [sweep] section — so a config file fully describes a run and
round-trips losslessly through :func:`RunConfig.to_text`.
"""

from __future__ import annotations

import configparser
import io
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import GridSpec, PhysicalParams, make_grid
from .evolve import DEFAULT_GUARD_FACTOR, PropagatorError, Schedule

__all__ = [
    "ConfigError",
    "DatumSpec",
    "DiagnosticsSpec",
    "RunConfig",
    "SweepSpec",
    "load_config",
    "load_sweep",
    "DATUM_FAMILIES",
    "MAX_SWEEP_POINTS",
    "WORKERS_ENV_VAR",
]

DATUM_FAMILIES = ("gaussian", "ground_state_scaled")
MAX_SWEEP_POINTS = 64
WORKERS_ENV_VAR = "INLS_LAB_WORKERS"


class ConfigError(ValueError):
    """Raised for both parse errors (with line numbers, from the INI layer)
    and validation errors (naming the violated precondition)."""


# ---------------------------------------------------------------------------
# Component specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatumSpec:
    family: str = "gaussian"
    amplitude: float = 1.0
    sigma: float = 1.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def validate(self) -> None:
        if self.family not in DATUM_FAMILIES:
            raise ConfigError(
                f"datum.family must be one of {DATUM_FAMILIES}, got {self.family!r}"
            )
        if not (self.amplitude >= 0.0 and math.isfinite(self.amplitude)):
            raise ConfigError("datum.amplitude must be a finite value >= 0")
        if self.family == "gaussian" and not (self.sigma > 0.0):
            raise ConfigError("datum.sigma must be > 0 for the gaussian family")


@dataclass(frozen=True)
class DiagnosticsSpec:
    local_mass_radii: tuple[float, ...] = (8.0,)
    virial_weight_radius: float | None = None  # None means the pure weight
    morawetz_auto: bool = True
    morawetz_radius: float = 8.0  # used when morawetz_auto is off
    evacuation_radius: float = 8.0
    evacuation_fraction: float = 0.25
    boundary_mass_fraction: float = 1e-6

    def validate(self, grid: GridSpec) -> None:
        for r in self.local_mass_radii:
            if not (0.0 < r <= grid.length / 2.0):
                raise ConfigError(
                    f"diagnostics.local_mass_radii entries must lie in (0, L/2]; got {r}"
                )
        if self.virial_weight_radius is not None and not (
            0.0 < self.virial_weight_radius < 0.4 * grid.length
        ):
            raise ConfigError(
                "diagnostics.virial_weight_radius must lie in (0, 0.4 L) or be 'pure'"
            )
        if not (self.morawetz_radius > 0.0):
            raise ConfigError("diagnostics.morawetz_radius must be > 0")
        if not (0.0 < self.evacuation_radius <= grid.length / 2.0):
            raise ConfigError("diagnostics.evacuation_radius must lie in (0, L/2]")
        if not (0.0 < self.evacuation_fraction < 1.0):
            raise ConfigError("diagnostics.evacuation_fraction must lie in (0, 1)")
        if not (0.0 < self.boundary_mass_fraction < 1.0):
            raise ConfigError("diagnostics.boundary_mass_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class RunConfig:
    n: int = 64
    length: float = 32.0
    b: float = 0.3
    weight_floor: float | None = None  # None -> h/2 at build time
    datum: DatumSpec = field(default_factory=DatumSpec)
    dt: float = 1e-3
    t_final: float = 1.0
    observer_stride: int = 10
    checkpoint_stride: int = 100
    guard_factor: float = DEFAULT_GUARD_FACTOR
    diagnostics: DiagnosticsSpec = field(default_factory=DiagnosticsSpec)
    output_dir: str = "runs/experiment"
    seed: int = 0

    # -- derived builders ---------------------------------------------------

    def grid(self) -> GridSpec:
        return make_grid(self.n, self.length)

    def params(self) -> PhysicalParams:
        kwargs = {}
        if self.weight_floor is not None:
            kwargs["weight_floor"] = self.weight_floor
        return PhysicalParams(b=self.b, **kwargs)

    def schedule(self) -> Schedule:
        return Schedule(
            dt=self.dt,
            t_final=self.t_final,
            observer_stride=self.observer_stride,
            checkpoint_stride=self.checkpoint_stride,
            guard_factor=self.guard_factor,
        )

    def validate(self) -> "RunConfig":
        """Build every referenced domain object so module preconditions fire
        here, at load time, rather than mid-run."""
        if not (0.0 < self.b < 0.5):
            raise ConfigError(
                f"physics.b must lie in the open interval (0, 1/2); got {self.b}"
            )
        if self.weight_floor is not None and not (self.weight_floor > 0.0):
            raise ConfigError("physics.weight_floor must be > 0 when given")
        try:
            grid = self.grid()
            self.params()
            self.schedule()
        except ConfigError:
            raise
        except (ValueError, PropagatorError) as exc:
            raise ConfigError(str(exc)) from exc
        self.datum.validate()
        self.diagnostics.validate(grid)
        if not self.output_dir:
            raise ConfigError("output.directory must be non-empty")
        if self.seed < 0:
            raise ConfigError("output.seed must be >= 0")
        return self

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        d, g = self.datum, self.diagnostics
        lines = [
            "[grid]",
            f"n = {self.n}",
            f"L = {self.length!r}",
            "",
            "[physics]",
            f"b = {self.b!r}",
        ]
        if self.weight_floor is not None:
            lines.append(f"weight_floor = {self.weight_floor!r}")
        lines += [
            "",
            "[datum]",
            f"family = {d.family}",
            f"amplitude = {d.amplitude!r}",
            f"sigma = {d.sigma!r}",
            f"center = {_triple_text(d.center)}",
            f"velocity = {_triple_text(d.velocity)}",
            "",
            "[schedule]",
            f"dt = {self.dt!r}",
            f"T = {self.t_final!r}",
            f"observer_stride = {self.observer_stride}",
            f"checkpoint_stride = {self.checkpoint_stride}",
            f"guard_factor = {self.guard_factor!r}",
            "",
            "[diagnostics]",
            f"local_mass_radii = {', '.join(repr(r) for r in g.local_mass_radii)}",
            "virial_weight_radius = "
            + ("pure" if g.virial_weight_radius is None else repr(g.virial_weight_radius)),
            f"morawetz_auto = {'true' if g.morawetz_auto else 'false'}",
            f"morawetz_radius = {g.morawetz_radius!r}",
            f"evacuation_radius = {g.evacuation_radius!r}",
            f"evacuation_fraction = {g.evacuation_fraction!r}",
            f"boundary_mass_fraction = {g.boundary_mass_fraction!r}",
            "",
            "[output]",
            f"directory = {self.output_dir}",
            f"seed = {self.seed}",
            "",
        ]
        return "\n".join(lines)


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig
    b_values: tuple[float, ...]
    amplitude_values: tuple[float, ...]
    center_values: tuple[tuple[float, float, float], ...]
    workers: int | None = None  # None -> environment / serial
    max_points: int = MAX_SWEEP_POINTS

    def points(self):
        """Cross-product in lexicographic order: b, then amplitude, then |x0|."""
        out = []
        for b in self.b_values:
            for lam in self.amplitude_values:
                for x0 in self.center_values:
                    out.append((b, lam, x0))
        return out

    def validate(self) -> "SweepSpec":
        self.base.validate()
        if not (self.b_values and self.amplitude_values and self.center_values):
            raise ConfigError("sweep axes must be non-empty")
        size = len(self.b_values) * len(self.amplitude_values) * len(self.center_values)
        if size > self.max_points:
            raise ConfigError(
                f"sweep cross-product has {size} points, above the cap "
                f"{self.max_points} (raise sweep.max_points deliberately)"
            )
        for b in self.b_values:
            if not (0.0 < b < 0.5):
                raise ConfigError(f"sweep.b entries must lie in (0, 1/2); got {b}")
        for lam in self.amplitude_values:
            if not (lam >= 0.0):
                raise ConfigError("sweep.amplitude entries must be >= 0")
        return self

    def config_for(self, b: float, amplitude: float, center) -> RunConfig:
        tag = f"b{b:g}_lam{amplitude:g}_x{_offset(center):g}"
        return replace(
            self.base,
            b=b,
            datum=replace(self.base.datum, amplitude=amplitude, center=tuple(center)),
            output_dir=str(Path(self.base.output_dir) / tag),
        )

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get(WORKERS_ENV_VAR, "").strip()
        if env:
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise ConfigError(
                    f"{WORKERS_ENV_VAR} must be an integer, got {env!r}"
                ) from exc
        return 1


def _offset(center) -> float:
    return math.sqrt(sum(c * c for c in center))


def _triple_text(v) -> str:
    return ", ".join(repr(float(c)) for c in v)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "grid": {"n", "L"},
    "physics": {"b", "weight_floor"},
    "datum": {"family", "amplitude", "sigma", "center", "velocity"},
    "schedule": {"dt", "T", "observer_stride", "checkpoint_stride", "guard_factor"},
    "diagnostics": {
        "local_mass_radii",
        "virial_weight_radius",
        "morawetz_auto",
        "morawetz_radius",
        "evacuation_radius",
        "evacuation_fraction",
        "boundary_mass_fraction",
    },
    "output": {"directory", "seed"},
    "sweep": {"b", "amplitude", "center", "workers", "max_points"},
}


def _read_ini(text: str) -> configparser.ConfigParser:
    # ';' separates triples in list values, so only '#' marks inline comments
    parser = configparser.ConfigParser(
        strict=True,
        interpolation=None,
        inline_comment_prefixes=("#",),
    )
    parser.optionxform = str  # keys are case-sensitive
    try:
        parser.read_file(io.StringIO(text), source="<config>")
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return parser


class _Section:
    """Typed accessors over one INI section; every getter raises ConfigError
    with the dotted key name on malformed values."""

    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.data = dict(parser[name]) if parser.has_section(name) else {}

    def _get(self, key, conv, default):
        if key not in self.data:
            return default
        raw = self.data[key].strip()
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{self.name}.{key}: cannot parse {raw!r}") from exc

    def floatv(self, key, default=None):
        return self._get(key, float, default)

    def intv(self, key, default=None):
        return self._get(key, int, default)

    def strv(self, key, default=None):
        return self._get(key, str, default)

    def boolv(self, key, default=None):
        def conv(raw):
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)

        return self._get(key, conv, default)

    def triple(self, key, default):
        def conv(raw):
            parts = [p for p in raw.replace(",", " ").split() if p]
            if len(parts) != 3:
                raise ValueError(raw)
            return tuple(float(p) for p in parts)

        return self._get(key, conv, default)

    def float_list(self, key, default):
        def conv(raw):
            parts = [p for p in raw.replace(",", " ").split() if p]
            if not parts:
                raise ValueError(raw)
            return tuple(float(p) for p in parts)

        return self._get(key, conv, default)

    def triple_list(self, key, default):
        def conv(raw):
            groups = [g.strip() for g in raw.split(";") if g.strip()]
            if not groups:
                raise ValueError(raw)
            out = []
            for g in groups:
                parts = [p for p in g.replace(",", " ").split() if p]
                if len(parts) != 3:
                    raise ValueError(g)
                out.append(tuple(float(p) for p in parts))
            return tuple(out)

        return self._get(key, conv, default)


def _build_run_config(parser: configparser.ConfigParser) -> RunConfig:
    grid = _Section(parser, "grid")
    phys = _Section(parser, "physics")
    datum = _Section(parser, "datum")
    sched = _Section(parser, "schedule")
    diag = _Section(parser, "diagnostics")
    out = _Section(parser, "output")

    defaults = RunConfig()
    virial_raw = diag.strv("virial_weight_radius", None)
    if virial_raw is None:
        virial_radius = defaults.diagnostics.virial_weight_radius
    elif virial_raw.strip().lower() == "pure":
        virial_radius = None
    else:
        virial_radius = diag.floatv("virial_weight_radius")

    cfg = RunConfig(
        n=grid.intv("n", defaults.n),
        length=grid.floatv("L", defaults.length),
        b=phys.floatv("b", defaults.b),
        weight_floor=phys.floatv("weight_floor", None),
        datum=DatumSpec(
            family=datum.strv("family", defaults.datum.family),
            amplitude=datum.floatv("amplitude", defaults.datum.amplitude),
            sigma=datum.floatv("sigma", defaults.datum.sigma),
            center=datum.triple("center", defaults.datum.center),
            velocity=datum.triple("velocity", defaults.datum.velocity),
        ),
        dt=sched.floatv("dt", defaults.dt),
        t_final=sched.floatv("T", defaults.t_final),
        observer_stride=sched.intv("observer_stride", defaults.observer_stride),
        checkpoint_stride=sched.intv("checkpoint_stride", defaults.checkpoint_stride),
        guard_factor=sched.floatv("guard_factor", defaults.guard_factor),
        diagnostics=DiagnosticsSpec(
            local_mass_radii=diag.float_list(
                "local_mass_radii", defaults.diagnostics.local_mass_radii
            ),
            virial_weight_radius=virial_radius,
            morawetz_auto=diag.boolv("morawetz_auto", defaults.diagnostics.morawetz_auto),
            morawetz_radius=diag.floatv(
                "morawetz_radius", defaults.diagnostics.morawetz_radius
            ),
            evacuation_radius=diag.floatv(
                "evacuation_radius", defaults.diagnostics.evacuation_radius
            ),
            evacuation_fraction=diag.floatv(
                "evacuation_fraction", defaults.diagnostics.evacuation_fraction
            ),
            boundary_mass_fraction=diag.floatv(
                "boundary_mass_fraction", defaults.diagnostics.boundary_mass_fraction
            ),
        ),
        output_dir=out.strv("directory", defaults.output_dir),
        seed=out.intv("seed", defaults.seed),
    )
    return cfg.validate()


def load_config(text: str) -> RunConfig:
    """Parse and validate a run configuration from INI text."""
    parser = _read_ini(text)
    if parser.has_section("sweep"):
        raise ConfigError(
            "[sweep] section present: this is a sweep spec, load it with load_sweep"
        )
    return _build_run_config(parser)


def load_sweep(text: str) -> SweepSpec:
    """Parse and validate a sweep spec: a run config plus a [sweep] section
    whose axes override b / datum.amplitude / datum.center per point."""
    parser = _read_ini(text)
    sweep = _Section(parser, "sweep")
    parser.remove_section("sweep")
    base = _build_run_config(parser)
    spec = SweepSpec(
        base=base,
        b_values=tuple(sorted(sweep.float_list("b", (base.b,)))),
        amplitude_values=tuple(
            sorted(sweep.float_list("amplitude", (base.datum.amplitude,)))
        ),
        center_values=tuple(
            sorted(sweep.triple_list("center", (base.datum.center,)), key=_offset)
        ),
        workers=sweep.intv("workers", None),
        max_points=sweep.intv("max_points", MAX_SWEEP_POINTS),
    )
    return spec.validate()
