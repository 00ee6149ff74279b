"""Plane geometry of a single base-station/mobile link.

The base station sits at ``b = [-d/2, 0]`` and the mobile at ``m = [d/2, 0]``.
Points are plain length-2 numpy arrays (or arrays of shape ``(..., 2)`` where
vectorisation makes sense).  Angles are radians throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Absolute tolerances, scaled by d (lengths) and d**2 (hyperbola residuals).
LENGTH_TOL = 1e-9
RESIDUAL_TOL = 1e-9


class DomainError(ValueError):
    """An argument lies outside the interval on which a function is defined."""


class Quadrant(enum.IntEnum):
    I = 1
    II = 2
    III = 3
    IV = 4


QUADRANTS = (Quadrant.I, Quadrant.II, Quadrant.III, Quadrant.IV)


class AoaFunctionMode(enum.Enum):
    VALUE = "value"
    DERIVATIVE = "derivative"
    INVERSE = "inverse"
    INVERSE_DERIVATIVE = "inverse_derivative"


# Direction of the outward normal of the face that reflects in each quadrant,
# as an offset added to the reflector orientation.
FACE_NORMAL_OFFSET = {
    Quadrant.I: math.pi,
    Quadrant.II: 1.5 * math.pi,
    Quadrant.III: 0.0,
    Quadrant.IV: 0.5 * math.pi,
}


@dataclass(frozen=True)
class TestLink:
    """Base station at ``[-d/2, 0]``, mobile at ``[d/2, 0]``."""

    __test__ = False  # keep pytest from collecting this class

    d: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValueError(f"link separation d must be positive and finite, got {self.d!r}")

    @property
    def base_station(self) -> np.ndarray:
        return np.array([-0.5 * self.d, 0.0])

    @property
    def mobile(self) -> np.ndarray:
        return np.array([0.5 * self.d, 0.0])


@dataclass(frozen=True)
class Reflector:
    """A square obstacle of edge ``width`` rotated by ``orientation`` about ``center``."""

    width: float
    orientation: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"reflector width must be positive, got {self.width!r}")
        if not 0 < self.orientation < 0.5 * math.pi:
            raise ValueError(f"orientation must lie in (0, pi/2), got {self.orientation!r}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(2))

    def internal_vector(self, q: Quadrant) -> np.ndarray:
        """Vector from the center to the midpoint of the face reflecting in quadrant ``q``."""
        phi = self.orientation + FACE_NORMAL_OFFSET[Quadrant(q)]
        return 0.5 * self.width * np.array([math.cos(phi), math.sin(phi)])

    def corners(self) -> np.ndarray:
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        half = 0.5 * self.width
        local = np.array([[half, half], [-half, half], [-half, -half], [half, -half]])
        rot = np.array([[c, -s], [s, c]])
        return self.center + local @ rot.T


def rotation(theta: float) -> np.ndarray:
    """Matrix rotating vectors clockwise by ``theta``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate(p, theta: float) -> np.ndarray:
    """Express ``p`` in the frame rotated counter-clockwise by ``theta``."""
    return np.asarray(p, dtype=float) @ rotation(theta).T


def unrotate(p, theta: float) -> np.ndarray:
    return np.asarray(p, dtype=float) @ rotation(theta)


def hyperbola_residual(p, theta: float, link: TestLink):
    """Reflection-hyperbola condition scaled by ``sin(2 theta)``.

    Zero exactly on the set of potential reflection points for orientation
    ``theta``; the scaling removes the ``cot(2 theta)`` pole.
    """
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    return math.sin(2 * theta) * (y * y - x * x + 0.25 * link.d**2) + 2 * math.cos(2 * theta) * x * y


def _check_path_length(s, link: TestLink):
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < link.d * (1 - 1e-12)) or np.any(np.isnan(s_arr)):
        raise DomainError(f"path length must satisfy s >= d = {link.d}, got {s!r}")
    return np.maximum(s_arr, link.d)


def boundary_prps(s, theta: float, link: TestLink) -> np.ndarray:
    """The four reflection points producing a path of exactly ``s`` metres.

    Returns an array of shape ``(4, 2)`` (or ``(4, ..., 2)`` for array ``s``)
    ordered ``h_I, h_II, h_III, h_IV``.  Uses the cancellation-free form of the
    intersection of the reflection hyperbola with the ``s``-ellipse.
    """
    s = _check_path_length(s, link)
    d = link.d
    st, ct = math.sin(theta), math.cos(theta)
    s2, d2 = s * s, d * d
    den_1 = 2.0 * np.sqrt(s2 - d2 * st * st)
    den_2 = 2.0 * np.sqrt(s2 - d2 * ct * ct)
    h1 = np.stack([s2 * ct / den_1, (s2 - d2) * st / den_1], axis=-1)
    h2 = np.stack([-s2 * st / den_2, (s2 - d2) * ct / den_2], axis=-1)
    return np.stack([h1, h2, -h1, -h2])


def s_ellipse_contains(p, s: float, link: TestLink, tol: float = LENGTH_TOL) -> bool:
    """True iff ``p`` lies in the set of points with ``|p-b| + |p-m| <= s``."""
    s = float(_check_path_length(s, link))
    p = np.asarray(p, dtype=float)
    d = link.d
    if s == d:
        x, y = p
        return abs(y) <= tol * d and -0.5 * d - tol * d <= x <= 0.5 * d + tol * d
    u2 = 0.25 * s * s
    v2 = 0.25 * (s * s - d * d)
    return bool(p[0] ** 2 / u2 + p[1] ** 2 / v2 <= 1 + tol)


def path_length(r, link: TestLink):
    """Total length ``|r - b| + |r - m|`` of the single-bounce path through ``r``."""
    r = np.asarray(r, dtype=float)
    return np.linalg.norm(r - link.base_station, axis=-1) + np.linalg.norm(r - link.mobile, axis=-1)


def snap_to_hyperbola(q: Quadrant, coord, theta: float, link: TestLink) -> np.ndarray:
    """Point of the reflection hyperbola in the rotated frame.

    For quadrant I ``coord`` is the rotated-frame abscissa and the ordinate is
    solved for; for quadrant II it is the other way around.
    """
    q = Quadrant(q)
    if q not in (Quadrant.I, Quadrant.II):
        raise ValueError("snapping is defined for quadrants I and II only")
    coord = np.asarray(coord, dtype=float)
    if np.any(coord == 0):
        raise DomainError("rotated-frame coordinate 0 is a pole of the hyperbola")
    other = -(link.d**2) * math.sin(2 * theta) / (8.0 * coord)
    if q is Quadrant.I:
        return np.stack([coord, other], axis=-1)
    return np.stack([other, coord], axis=-1)


def rotated_limits(s, theta: float, link: TestLink):
    """Rotated-frame coordinates of ``h_I(s)`` (abscissa) and ``h_II(s)`` (ordinate).

    At ``s = d`` these reduce to ``(d/2) cos(theta)`` and ``(d/2) sin(theta)``.
    Infinite ``s`` maps to infinity.
    """
    s = np.asarray(s, dtype=float)
    d = link.d
    with np.errstate(invalid="ignore"):
        x1 = 0.5 * np.sqrt(s * s - (d * math.sin(theta)) ** 2)
        y2 = 0.5 * np.sqrt(s * s - (d * math.cos(theta)) ** 2)
    return x1, y2


def _segment_angle(p, q):
    # slope angle of the undirected segment, folded into (-pi/2, pi/2]
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = q[..., 0] - p[..., 0]
    dy = q[..., 1] - p[..., 1]
    eta = np.arctan2(dy, dx)
    eta = np.where(eta > 0.5 * np.pi, eta - np.pi, eta)
    return np.where(eta <= -0.5 * np.pi, eta + np.pi, eta)


def face_width_factor(theta, eta):
    """``mu_2`` per unit ``w * |p-q|``: the two-branch sine factor.

    ``eta`` must be a slope angle in ``(-pi/2, pi/2]``.
    """
    x = np.asarray(theta) - np.asarray(eta)
    inner = (x >= 0) & (x <= 0.5 * np.pi)
    return np.sqrt(2.0) * np.where(inner, np.sin(0.25 * np.pi + x), np.abs(np.sin(x - 0.25 * np.pi)))


def dilated_segment_measure(p, q, w, theta):
    """Area of the segment ``[p, q]`` dilated by a ``w``-square at orientation ``theta``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    length = np.linalg.norm(q - p, axis=-1)
    eta = _segment_angle(p, q)
    area = np.asarray(w) * length * face_width_factor(theta, eta) + np.asarray(w) ** 2
    return area if np.ndim(area) else float(area)


# ---------------------------------------------------------------------------
# s-metre AOA functions


_VALUE_SIGN = {Quadrant.I: -1.0, Quadrant.II: -1.0, Quadrant.III: 1.0, Quadrant.IV: 1.0}


def _inverse_interval(q: Quadrant, theta: float):
    """Range of ``psi_q`` as ``(lo, hi, lo_closed, hi_closed)``."""
    half = 0.5 * math.pi
    if q is Quadrant.I:
        return theta, 2 * theta, False, True
    if q is Quadrant.II:
        return half + theta, math.pi, False, True
    if q is Quadrant.III:
        return math.pi, math.pi + theta, True, False
    return math.pi + 2 * theta, 1.5 * math.pi + theta, True, False


def _in_interval(alpha, lo, hi, lo_closed, hi_closed, slack=1e-12):
    lo_ok = alpha >= lo - slack if lo_closed else alpha > lo
    hi_ok = alpha <= hi + slack if hi_closed else alpha < hi
    return lo_ok & hi_ok


def aoa_interval(q: Quadrant, theta: float):
    """The angle interval ``(lo, hi, lo_closed, hi_closed)`` swept by ``psi_q``."""
    return _inverse_interval(Quadrant(q), theta)


def aoa_function(q: Quadrant, mode: AoaFunctionMode, arg, theta: float, link: TestLink):
    """Arrival angle at the mobile of the exactly-``s``-metre quadrant-``q`` reflection.

    ``VALUE`` and ``DERIVATIVE`` take a path length ``s >= d``; ``INVERSE`` and
    ``INVERSE_DERIVATIVE`` take an angle inside the range swept by ``psi_q``.
    Works elementwise on arrays.
    """
    q = Quadrant(q)
    mode = AoaFunctionMode(mode)
    d = link.d
    st, ct = math.sin(theta), math.cos(theta)
    # quadrants I/III are governed by sin(theta), II/IV by cos(theta)
    k = d * st if q in (Quadrant.I, Quadrant.III) else d * ct
    sign = _VALUE_SIGN[q]

    if mode in (AoaFunctionMode.VALUE, AoaFunctionMode.DERIVATIVE):
        s = _check_path_length(arg, link)
        if mode is AoaFunctionMode.VALUE:
            offset = {
                Quadrant.I: theta - 0.5 * math.pi,
                Quadrant.II: theta,
                Quadrant.III: theta + 0.5 * math.pi,
                Quadrant.IV: theta + math.pi,
            }[q]
            out = np.arccos(np.clip(sign * k / s, -1.0, 1.0)) + offset
        else:
            out = sign * k / (s * np.sqrt(s * s - k * k))
        return out if np.ndim(out) else float(out)

    alpha = np.asarray(arg, dtype=float)
    lo, hi, lo_c, hi_c = _inverse_interval(q, theta)
    if not np.all(_in_interval(alpha, lo, hi, lo_c, hi_c)):
        left = "[" if lo_c else "("
        right = "]" if hi_c else ")"
        raise DomainError(
            f"angle {arg!r} outside {left}{lo:.12g}, {hi:.12g}{right} for quadrant {q.name}"
        )
    x = alpha - theta
    if q in (Quadrant.I, Quadrant.III):
        inv = d * st / np.sin(x)
        out = inv if mode is AoaFunctionMode.INVERSE else -inv / np.tan(x)
    else:
        inv = -d * ct / np.cos(x)
        out = inv if mode is AoaFunctionMode.INVERSE else inv * np.tan(x)
    return out if np.ndim(out) else float(out)


def arrival_angle(r, link: TestLink):
    """Direction of ``r`` seen from the mobile, in ``[0, 2 pi)``."""
    r = np.asarray(r, dtype=float)
    v = r - link.mobile
    return np.mod(np.arctan2(v[..., 1], v[..., 0]), 2 * np.pi)


def quadrant_of(r) -> Quadrant:
    x, y = r
    if x >= 0:
        return Quadrant.I if y >= 0 else Quadrant.IV
    return Quadrant.II if y >= 0 else Quadrant.III
