"""Boolean model parameters and the independent-blocking visibility probability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import TestLink


@dataclass(frozen=True)
class DiscreteUniform:
    """``n`` equally spaced support points from ``lo`` to ``hi``, each with mass ``1/n``."""

    lo: float
    hi: float
    n: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("support endpoints must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.lo > self.hi:
            raise ValueError(f"lo={self.lo} exceeds hi={self.hi}")
        if (self.n == 1) != (self.lo == self.hi):
            raise ValueError("n == 1 exactly when lo == hi")
        object.__setattr__(self, "n", int(self.n))

    @cached_property
    def support(self) -> np.ndarray:
        pts = np.linspace(self.lo, self.hi, self.n)
        pts.flags.writeable = False
        return pts

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def second_moment(self) -> float:
        return float(np.mean(self.support**2))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.support[rng.integers(self.n, size=size)]

    def from_uniform(self, u) -> np.ndarray:
        """Map uniforms on ``[0, 1)`` to support points."""
        return self.support[np.minimum((np.asarray(u) * self.n).astype(np.intp), self.n - 1)]


@dataclass(frozen=True)
class BooleanModelParams:
    """Square reflectors on a Poisson process.

    Attributes
    ----------
    density : float
        Reflector centers per square metre.
    widths : DiscreteUniform
        Edge-width law in metres.
    orientations : DiscreteUniform
        Orientation law in radians, strictly inside ``(0, pi/2)``.
    """

    density: float
    widths: DiscreteUniform
    orientations: DiscreteUniform

    def __post_init__(self):
        if not (self.density > 0 and math.isfinite(self.density)):
            raise ValueError(f"density must be positive, got {self.density!r}")
        if not self.widths.lo > 0:
            raise ValueError("reflector widths must be positive")
        if not (0 < self.orientations.lo and self.orientations.hi < 0.5 * math.pi):
            raise ValueError("orientations must lie strictly inside (0, pi/2)")

    @classmethod
    def from_field_units(cls, density_per_km2, widths, orientations_deg):
        """Build from reflectors/km^2, ``(lo, hi, n)`` widths and ``(lo, hi, n)`` degrees."""
        lo, hi, n = orientations_deg
        return cls(
            density=density_per_km2 * 1e-6,
            widths=DiscreteUniform(*widths),
            orientations=DiscreteUniform(math.radians(lo), math.radians(hi), n),
        )

    @property
    def mean_width(self) -> float:
        return self.widths.mean

    @property
    def thetas(self) -> np.ndarray:
        return self.orientations.support

    def with_density(self, density: float) -> "BooleanModelParams":
        return BooleanModelParams(density, self.widths, self.orientations)


def expected_dilated_measure(p, q, model: BooleanModelParams):
    """``E_{W,Theta}`` of the dilated-segment area over the discrete mark law.

    The area is affine in ``w`` and ``w**2`` for fixed orientation, so the width
    average collapses to ``E[W]`` and ``E[W^2]``.  For the orientation average
    the length-weighted face factor is written as the sum of the absolute
    projections of ``q - p`` onto the two square axes, which avoids angles.
    """
    v = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    th = model.thetas
    axes = np.stack([np.stack([np.cos(th), np.sin(th)]), np.stack([-np.sin(th), np.cos(th)])])
    proj = np.abs(v @ axes[0]) + np.abs(v @ axes[1])
    return model.widths.mean * proj.mean(axis=-1) + model.widths.second_moment


def visibility_probability(r, model: BooleanModelParams, link: TestLink):
    """Probability that neither leg of the bounce at ``r`` is blocked.

    Each leg sees its own independent copy of the blockage process.  Accepts a
    single point or an array of points with trailing dimension 2.
    """
    r = np.asarray(r, dtype=float)
    exponent = expected_dilated_measure(link.base_station, r, model) + expected_dilated_measure(
        r, link.mobile, model
    )
    out = np.exp(-model.density * exponent)
    return out if np.ndim(out) else float(out)


class _ScalarVisibility:
    """Scalar-argument visibility probability for quadrature loops (no numpy dispatch per call)."""

    def __init__(self, model: BooleanModelParams, link: TestLink):
        self.lam = model.density
        self.ew = model.widths.mean / model.orientations.n
        self.const = 2.0 * model.widths.second_moment
        self.axes = [(math.cos(t), math.sin(t)) for t in model.thetas]
        self.half_d = 0.5 * link.d

    def __call__(self, x, y):
        hd = self.half_d
        acc = 0.0
        for c, s in self.axes:
            # legs b -> r and r -> m
            acc += abs(c * (x + hd) + s * y) + abs(c * y - s * (x + hd))
            acc += abs(c * (hd - x) - s * y) + abs(-c * y - s * (hd - x))
        return math.exp(-self.lam * (self.ew * acc + self.const))
