"""Run configuration: a YAML document plus command-line overrides.

Format (version 1)::

    format_version: 1
    model:
      density_per_km2: 60          # reflector centers per km^2
      widths: {min: 10, max: 40, n: 4}           # metres
      orientations_deg: {min: 10, max: 80, n: 8} # strictly inside (0, 90)
    link:
      d: 350                        # base station to mobile, metres
    grid:
      points: 200                   # TOA/bias grid size, AOA grid size
    simulation:
      mode: independent             # independent | correlated | correlated_los_blocked | none
      realizations: 100000          # kept realizations
      seed: 0
      s_window: null                # metres; null = analytic 1 - 1e-4 quantile
      n_jobs: 1
    fit:
      method: moments               # moments | analytic-exp
      matching: first               # first | second

Every section and key is optional except ``model`` and ``link``.  Unknown
keys are rejected so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import yaml

from .blocking import BooleanModelParams, DiscreteUniform
from .geometry import TestLink
from .montecarlo import BlockingMode

FORMAT_VERSION = 1

_MODE_ALIASES = {
    "independentblocking": BlockingMode.INDEPENDENT,
    "correlatedblocking": BlockingMode.CORRELATED,
    "correlatedlosblocked": BlockingMode.CORRELATED_LOS_BLOCKED,
    "noblocking": BlockingMode.NONE,
}

FIT_METHODS = ("moments", "analytic-exp")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class SimulationSection:
    mode: str = "independent"
    realizations: int = 100_000
    seed: int = 0
    s_window: float | None = None
    n_jobs: int = 1


@dataclass
class FitSection:
    method: str = "moments"
    matching: str = "first"


@dataclass
class RunConfig:
    density_per_km2: float
    widths: tuple
    orientations_deg: tuple
    d: float
    grid_points: int = 200
    simulation: SimulationSection = field(default_factory=SimulationSection)
    fit: FitSection = field(default_factory=FitSection)

    @property
    def model(self) -> BooleanModelParams:
        return BooleanModelParams.from_field_units(self.density_per_km2, self.widths, self.orientations_deg)

    @property
    def link(self) -> TestLink:
        return TestLink(self.d)

    @property
    def mode(self) -> BlockingMode:
        return parse_mode(self.simulation.mode)

    def echo(self) -> dict:
        """Plain-data copy of the resolved configuration, in the file's own layout."""
        return {
            "format_version": FORMAT_VERSION,
            "model": {
                "density_per_km2": self.density_per_km2,
                "widths": dict(zip(("min", "max", "n"), self.widths)),
                "orientations_deg": dict(zip(("min", "max", "n"), self.orientations_deg)),
            },
            "link": {"d": self.d},
            "grid": {"points": self.grid_points},
            "simulation": asdict(self.simulation),
            "fit": asdict(self.fit),
        }


def parse_mode(text) -> BlockingMode:
    if isinstance(text, BlockingMode):
        return text
    key = str(text).strip().lower()
    try:
        return BlockingMode(key)
    except ValueError:
        pass
    try:
        return _MODE_ALIASES[key.replace("_", "").replace("-", "")]
    except KeyError:
        choices = ", ".join(m.value for m in BlockingMode)
        raise ConfigError(f"simulation.mode: unknown mode {text!r} (choose from {choices})") from None


def _section(doc: dict, name: str, allowed, required=False) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(f"{name}: section is required")
        return {}
    sec = doc[name]
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(sec).__name__}")
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"{name}.{extra[0]}: unknown key")
    return sec


def _number(value, where: str, positive=False, integer=False, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        value = int(value)
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be positive, got {value!r}")
    return value


def _uniform(sec: dict, where: str) -> tuple:
    if not isinstance(sec, dict):
        raise ConfigError(f"{where}: expected a mapping with min, max, n")
    extra = sorted(set(sec) - {"min", "max", "n"})
    if extra:
        raise ConfigError(f"{where}.{extra[0]}: unknown key")
    for key in ("min", "max", "n"):
        if key not in sec:
            raise ConfigError(f"{where}.{key}: required")
    lo = _number(sec["min"], f"{where}.min")
    hi = _number(sec["max"], f"{where}.max")
    n = _number(sec["n"], f"{where}.n", positive=True, integer=True)
    if lo > hi:
        raise ConfigError(f"{where}: min={lo} exceeds max={hi}")
    if (n == 1) != (lo == hi):
        raise ConfigError(f"{where}.n: n must be 1 exactly when min == max")
    return (lo, hi, n)


def from_dict(doc) -> RunConfig:
    """Validate a parsed document and build a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a mapping")
    extra = sorted(set(doc) - {"format_version", "model", "link", "grid", "simulation", "fit"})
    if extra:
        raise ConfigError(f"{extra[0]}: unknown section")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ConfigError(f"format_version: unsupported version {version!r} (this build reads {FORMAT_VERSION})")

    model = _section(doc, "model", ("density_per_km2", "widths", "orientations_deg"), required=True)
    for key in ("density_per_km2", "widths", "orientations_deg"):
        if key not in model:
            raise ConfigError(f"model.{key}: required")
    density = _number(model["density_per_km2"], "model.density_per_km2", positive=True)
    widths = _uniform(model["widths"], "model.widths")
    if not widths[0] > 0:
        raise ConfigError(f"model.widths.min: widths must be positive, got {widths[0]!r}")
    orient = _uniform(model["orientations_deg"], "model.orientations_deg")
    for key, val in zip(("min", "max"), orient[:2]):
        if not 0 < val < 90:
            raise ConfigError(f"model.orientations_deg.{key}: must lie strictly between 0 and 90 degrees, got {val!r}")

    link = _section(doc, "link", ("d",), required=True)
    if "d" not in link:
        raise ConfigError("link.d: required")
    d = _number(link["d"], "link.d", positive=True)

    grid = _section(doc, "grid", ("points",))
    points = _number(grid.get("points", 200), "grid.points", positive=True, integer=True)

    sim = _section(doc, "simulation", ("mode", "realizations", "seed", "s_window", "n_jobs"))
    simulation = SimulationSection(
        mode=parse_mode(sim.get("mode", "independent")).value,
        realizations=_number(sim.get("realizations", 100_000), "simulation.realizations", positive=True, integer=True),
        seed=_number(sim.get("seed", 0), "simulation.seed", integer=True),
        s_window=_number(sim.get("s_window"), "simulation.s_window", positive=True, allow_none=True),
        n_jobs=_number(sim.get("n_jobs", 1), "simulation.n_jobs", positive=True, integer=True),
    )

    fit = _section(doc, "fit", ("method", "matching"))
    fit_section = FitSection(method=str(fit.get("method", "moments")), matching=str(fit.get("matching", "first")))

    cfg = RunConfig(density, widths, orient, d, points, simulation, fit_section)
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    """Check cross-field constraints and that the inner types accept the values."""
    if cfg.grid_points < 3:
        raise ConfigError(f"grid.points: need at least 3, got {cfg.grid_points}")
    sim = cfg.simulation
    if not 0 <= sim.seed < 2**64:
        raise ConfigError(f"simulation.seed: must fit in 64 unsigned bits, got {sim.seed}")
    if sim.realizations < 1:
        raise ConfigError(f"simulation.realizations: must be positive, got {sim.realizations}")
    if sim.s_window is not None and not sim.s_window > cfg.d:
        raise ConfigError(f"simulation.s_window: must exceed link.d = {cfg.d}, got {sim.s_window}")
    parse_mode(sim.mode)
    if cfg.fit.method not in FIT_METHODS:
        raise ConfigError(f"fit.method: unknown method {cfg.fit.method!r} (choose from {', '.join(FIT_METHODS)})")
    if cfg.fit.matching not in ("first", "second"):
        raise ConfigError(f"fit.matching: unknown convention {cfg.fit.matching!r} (choose from first, second)")
    try:
        DiscreteUniform(*cfg.widths)
        cfg.model
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None
    return cfg


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: {path} is not valid YAML: {exc}") from None
    return from_dict(doc)
