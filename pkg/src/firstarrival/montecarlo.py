"""Brute-force simulation of Boolean-model realizations and their first-arriving reflection.

Each realization ``i`` draws from its own Philox stream (key = seed, counter
word 2 = ``i``), so any subset of realizations can be regenerated alone and the
output does not depend on how work is split between processes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analytic import DEFAULT_COVERAGE, ToaDistribution
from .blocking import BooleanModelParams
from .curves import DistributionCurve, empirical_cdf, ks_distance  # noqa: F401  (re-exported)
from .geometry import FACE_NORMAL_OFFSET, Quadrant, Reflector, TestLink

# rotated-frame face index used by the kernels -> quadrant it reflects into
_FACE_QUADRANT = {
    0: Quadrant.III,
    1: Quadrant.IV,
    2: Quadrant.I,
    3: Quadrant.II,
}
assert all(FACE_NORMAL_OFFSET[q] == f * 0.5 * math.pi for f, q in _FACE_QUADRANT.items())

class BlockingMode(enum.Enum):
    INDEPENDENT = "independent"
    CORRELATED = "correlated"
    CORRELATED_LOS_BLOCKED = "correlated_los_blocked"
    NONE = "none"


@dataclass(frozen=True)
class WindowRegion:
    """Axis-aligned rectangle in which reflector centers are drawn."""

    x0: float
    x1: float
    y0: float
    y1: float

    @classmethod
    def around_ellipse(cls, s_window: float, link: TestLink, margin: float) -> "WindowRegion":
        """Bounding box of the ``s_window`` ellipse grown by ``margin`` on every side."""
        a = 0.5 * s_window
        b = 0.5 * math.sqrt(max(s_window**2 - link.d**2, 0.0))
        return cls(-a - margin, a + margin, -b - margin, b + margin)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to reproduce a simulation run.

    ``realizations`` is the number of realizations to keep; attempts stop at
    ``max_attempts`` (default ``50 * realizations + 1000``).  ``s_window`` of
    ``None`` picks the analytic ``1 - 1e-4`` path-length quantile.
    """

    model: BooleanModelParams
    link: TestLink
    mode: BlockingMode = BlockingMode.INDEPENDENT
    realizations: int = 10_000
    seed: int = 0
    s_window: float | None = None
    max_attempts: int | None = None
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", BlockingMode(self.mode))
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValueError(f"realizations must be a positive integer, got {self.realizations!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.s_window is not None and not self.s_window > self.link.d:
            raise ValueError(f"s_window must exceed d = {self.link.d}")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be at least 1")

    @property
    def attempt_cap(self) -> int:
        if self.max_attempts is not None:
            return int(self.max_attempts)
        return 50 * int(self.realizations) + 1000


@dataclass(frozen=True)
class FirstArrivalSample:
    s: float
    alpha: float
    quadrant: Quadrant
    theta_used: float


@dataclass
class SimulationResult:
    """Kept first arrivals as parallel arrays plus run diagnostics."""

    s: np.ndarray
    alpha: np.ndarray
    quadrant: np.ndarray
    theta: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "ok" if self.s.size else "empty"

    def __len__(self):
        return self.s.size

    @property
    def samples(self):
        return [
            FirstArrivalSample(float(s), float(a), Quadrant(int(q)), float(t))
            for s, a, q, t in zip(self.s, self.alpha, self.quadrant, self.theta)
        ]


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """The random stream owned by realization ``index``."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(index), 0]))


def _sample_arrays(model: BooleanModelParams, region: WindowRegion, rng: np.random.Generator):
    n = rng.poisson(model.density * region.area)
    cx = region.x0 + (region.x1 - region.x0) * rng.random(n)
    cy = region.y0 + (region.y1 - region.y0) * rng.random(n)
    width = model.widths.sample(rng, n)
    theta = model.orientations.sample(rng, n)
    return cx, cy, width.astype(float), theta.astype(float)


def sample_realization(model: BooleanModelParams, window_region: WindowRegion, rng: np.random.Generator):
    """Poisson number of reflectors with uniform centers and i.i.d. marks."""
    cx, cy, width, theta = _sample_arrays(model, window_region, rng)
    return [Reflector(float(w), float(t), np.array([x, y])) for x, y, w, t in zip(cx, cy, width, theta)]


def _as_arrays(reflectors):
    if not reflectors:
        z = np.zeros(0)
        return z, z, z, z
    cx = np.array([r.center[0] for r in reflectors], dtype=float)
    cy = np.array([r.center[1] for r in reflectors], dtype=float)
    width = np.array([r.width for r in reflectors], dtype=float)
    theta = np.array([r.orientation for r in reflectors], dtype=float)
    return cx, cy, width, theta


def reflection_point(reflector: Reflector, link: TestLink, full_output: bool = False):
    """Specular reflection point on ``reflector`` and the quadrant it lies in, or ``None``.

    With ``full_output`` the number of qualifying faces is returned as well;
    more than one happens only on a set of measure zero and the shorter path
    is kept.
    """
    cx, cy, width, theta = _as_arrays([reflector])
    rx, ry, rs, face, hits = _kernels.reflection_candidates(cx, cy, width, theta, link.d, np.inf)
    if not np.isfinite(rs[0]):
        return (None, 0) if full_output else None
    point = np.array([rx[0], ry[0]])
    out = (point, _FACE_QUADRANT[int(face[0])])
    return (out, int(hits[0])) if full_output else out


def segment_blocked(a, b, blockers, exclude: int | None = None) -> bool:
    """Whether the open segment ``(a, b)`` passes through the interior of any blocker.

    ``exclude`` is the index (into ``blockers``) of a reflector to ignore,
    normally the one that produced the reflection.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.array_equal(a, b):
        raise ValueError("segment endpoints coincide")
    cx, cy, width, theta = _as_arrays(blockers)
    ex = -1 if exclude is None else int(exclude)
    return bool(_kernels.segment_blocked(a[0], a[1], b[0], b[1], cx, cy, width, theta, ex))


def _fresh_leg_blocked(a, b, model: BooleanModelParams, rng: np.random.Generator) -> bool:
    """Blockage of one leg by its own freshly drawn Boolean model.

    Only squares whose center lies within half a diagonal of the segment can
    touch it, so the field is drawn in the segment-aligned rectangle that
    covers that neighbourhood.
    """
    reach = model.widths.hi / math.sqrt(2.0)
    ax, ay = a
    bx, by = b
    length = math.hypot(bx - ax, by - ay)
    ux, uy = (bx - ax) / length, (by - ay) / length
    n = rng.poisson(model.density * (length + 2 * reach) * 2 * reach)
    if n == 0:
        return False
    u = rng.random((4, n))
    along = -reach + (length + 2 * reach) * u[0]
    across = -reach + 2 * reach * u[1]
    cx = ax + along * ux - across * uy
    cy = ay + along * uy + across * ux
    width = model.widths.from_uniform(u[2])
    theta = model.orientations.from_uniform(u[3])
    return bool(_kernels.segment_blocked(ax, ay, bx, by, cx, cy, width, theta, -1))


def _los_blocked(cx, cy, width, theta, link: TestLink) -> bool:
    hd = 0.5 * link.d
    return bool(_kernels.segment_blocked(-hd, 0.0, hd, 0.0, cx, cy, width, theta, -1))


def _run_one(index: int, cfg: SimulationConfig, region: WindowRegion, s_window: float):
    """One realization: ``(outcome, s, alpha, quadrant, theta, n_double)``.

    ``outcome`` is ``"kept"``, ``"no_visible"`` or ``"los_clear"``.
    """
    rng = realization_rng(cfg.seed, index)
    model, link = cfg.model, cfg.link
    cx, cy, width, theta = _sample_arrays(model, region, rng)
    if cfg.mode is BlockingMode.CORRELATED_LOS_BLOCKED and not _los_blocked(cx, cy, width, theta, link):
        return ("los_clear", np.nan, np.nan, 0, np.nan, 0)
    rx, ry, rs, face, hits = _kernels.reflection_candidates(cx, cy, width, theta, link.d, s_window)
    cand = np.flatnonzero(np.isfinite(rs))
    n_double = int(np.count_nonzero(hits > 1))
    # stable sort keeps the earlier-enumerated reflector on exact ties
    order = cand[np.argsort(rs[cand], kind="stable")]
    pick = -1
    if cfg.mode is BlockingMode.NONE:
        pick = int(order[0]) if order.size else -1
    elif cfg.mode is BlockingMode.INDEPENDENT:
        b, m = link.base_station, link.mobile
        for i in order:
            r = (rx[i], ry[i])
            if _fresh_leg_blocked(b, r, model, rng) or _fresh_leg_blocked(r, m, model, rng):
                continue
            pick = int(i)
            break
    else:
        pick = int(_kernels.first_visible_correlated(order, rx, ry, cx, cy, width, theta, link.d))
    if pick < 0:
        return ("no_visible", np.nan, np.nan, 0, np.nan, n_double)
    alpha = math.atan2(ry[pick], rx[pick] - 0.5 * link.d) % (2 * math.pi)
    return ("kept", rs[pick], alpha, int(_FACE_QUADRANT[int(face[pick])]), theta[pick], n_double)


def _run_block(args):
    start, stop, cfg, region, s_window = args
    return [_run_one(i, cfg, region, s_window) for i in range(start, stop)]


def analytic_reference(cfg: SimulationConfig) -> ToaDistribution:
    """The analytic path-length law a simulation mode should be compared against."""
    return ToaDistribution(cfg.model, cfg.link, blocking=cfg.mode is not BlockingMode.NONE)


def simulate_first_arrival(cfg: SimulationConfig, reference: ToaDistribution | None = None) -> SimulationResult:
    """Draw realizations until ``cfg.realizations`` of them are kept.

    A realization is kept when at least one reflection with path length up to
    the window survives the mode's blocking rule; in the LOS-blocked mode it
    must first have its direct path blocked.  Output is ordered by realization
    index.
    """
    reference = reference if reference is not None else analytic_reference(cfg)
    s_window = cfg.s_window if cfg.s_window is not None else reference.quantile(DEFAULT_COVERAGE)
    mass_beyond = 1.0 - float(reference.cdf(s_window))
    if mass_beyond > 1e-4 * (1 + 1e-6):
        raise ValueError(f"s_window={s_window:.6g} leaves {mass_beyond:.3g} of the analytic mass outside")
    region = WindowRegion.around_ellipse(s_window, cfg.link, cfg.model.widths.hi)

    target = int(cfg.realizations)
    cap = cfg.attempt_cap
    kept = []
    counts = {"kept": 0, "no_visible": 0, "los_clear": 0}
    doubles = 0
    attempts = 0
    pool = ProcessPoolExecutor(cfg.n_jobs) if cfg.n_jobs > 1 else None
    try:
        while len(kept) < target and attempts < cap:
            need = target - len(kept)
            # guess how many attempts the remaining keeps will take
            rate = (len(kept) + 1) / (attempts + 1)
            span = min(max(int(need / max(rate, 1e-3) * 1.05) + 16, 64), cap - attempts)
            bounds = np.linspace(attempts, attempts + span, max(cfg.n_jobs, 1) * 4 + 1).astype(int)
            jobs = [(a, b, cfg, region, s_window) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            blocks = pool.map(_run_block, jobs) if pool else map(_run_block, jobs)
            for block in blocks:
                for outcome in block:
                    attempts += 1
                    counts[outcome[0]] += 1
                    doubles += outcome[5]
                    if outcome[0] == "kept" and len(kept) < target:
                        kept.append(outcome[1:5])
                    if len(kept) >= target:
                        break
                if len(kept) >= target:
                    break
    finally:
        if pool:
            pool.shutdown()

    arr = np.array(kept, dtype=float).reshape(-1, 4)
    diagnostics = {
        "mode": cfg.mode.value,
        "seed": int(cfg.seed),
        "attempts": attempts,
        "kept": len(kept),
        "discarded_no_visible": counts["no_visible"],
        "discarded_los_clear": counts["los_clear"],
        "double_face_hits": doubles,
        "s_window": s_window,
        "analytic_mass_beyond_window": mass_beyond,
        "window_area": region.area,
        "attempt_cap_reached": len(kept) < target,
    }
    return SimulationResult(arr[:, 0], arr[:, 1], arr[:, 2].astype(int), arr[:, 3], diagnostics)


def count_reflections(model: BooleanModelParams, link: TestLink, s_max: float, realizations: int, seed: int = 0):
    """Per-realization number of reflectors with a reflection no longer than ``s_max``.

    Blocking is ignored; the counts are Poisson with the unblocked mean count.
    """
    region = WindowRegion.around_ellipse(s_max, link, model.widths.hi)
    out = np.empty(realizations, dtype=np.int64)
    for i in range(realizations):
        cx, cy, width, theta = _sample_arrays(model, region, realization_rng(seed, i))
        rs = _kernels.reflection_candidates(cx, cy, width, theta, link.d, s_max)[2]
        out[i] = np.count_nonzero(np.isfinite(rs))
    return out


__all__ = [
    "BlockingMode",
    "DistributionCurve",
    "FirstArrivalSample",
    "SimulationConfig",
    "SimulationResult",
    "WindowRegion",
    "analytic_reference",
    "count_reflections",
    "empirical_cdf",
    "ks_distance",
    "realization_rng",
    "reflection_point",
    "sample_realization",
    "segment_blocked",
    "simulate_first_arrival",
]
