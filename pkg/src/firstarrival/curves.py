"""Tabulated distributions and the distances used to compare them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline


@dataclass
class DistributionCurve:
    """A distribution tabulated on an ascending grid.

    Parameters
    ----------
    grid, pdf, cdf : ndarray
        Abscissae (metres or radians), density and cumulative probability.
    meta : dict
        Source identifier plus whatever parameters produced the curve.
    kind : {"continuous", "step"}
        How to evaluate between grid points.  Continuous curves use a cubic
        Hermite interpolant of the CDF with the density as its slope; step
        curves are right-continuous empirical CDFs.
    pdf_fn, cdf_fn : callable, optional
        Exact evaluators when the curve came from a closed form.  Preferred
        over interpolation whenever present.
    """

    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    meta: dict = field(default_factory=dict)
    kind: str = "continuous"
    pdf_fn: Optional[Callable] = field(default=None, repr=False, compare=False)
    cdf_fn: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.pdf = np.asarray(self.pdf, dtype=float)
        self.cdf = np.asarray(self.cdf, dtype=float)
        if not (self.grid.shape == self.pdf.shape == self.cdf.shape) or self.grid.ndim != 1:
            raise ValueError("grid, pdf and cdf must be 1-D arrays of equal length")
        if self.grid.size == 0:
            raise ValueError("empty curve")
        if np.any(np.diff(self.grid) < 0):
            raise ValueError("grid must be ascending")
        if self.kind not in ("continuous", "step"):
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def __len__(self):
        return self.grid.size

    def cdf_at(self, x):
        """Cumulative probability at ``x``, clipped to ``[0, 1]``."""
        x = np.asarray(x, dtype=float)
        if self.cdf_fn is not None:
            out = np.asarray(self.cdf_fn(x), dtype=float)
        elif self.kind == "step":
            idx = np.searchsorted(self.grid, x, side="right") - 1
            out = np.where(idx >= 0, self.cdf[np.clip(idx, 0, None)], 0.0)
        else:
            out = self._interp_cdf(x)
        return np.clip(out, 0.0, 1.0)

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        if self.pdf_fn is not None:
            return np.asarray(self.pdf_fn(x), dtype=float)
        if self.kind == "step":
            raise TypeError("an empirical CDF has no density")
        return np.interp(x, self.grid, self.pdf, left=0.0, right=0.0)

    def _interp_cdf(self, x):
        if self.grid.size < 2:
            return np.where(x >= self.grid[0], self.cdf[0], 0.0)
        spline = CubicHermiteSpline(self.grid, self.cdf, self.pdf, extrapolate=False)
        out = spline(x)
        out = np.where(x < self.grid[0], 0.0, out)
        return np.where(x > self.grid[-1], self.cdf[-1], out)

    def trapezoid_mass(self) -> float:
        return float(np.trapezoid(self.pdf, self.grid))

    def shifted(self, offset: float, **meta) -> "DistributionCurve":
        """The same distribution moved by ``offset`` along the x axis."""
        pdf_fn = cdf_fn = None
        if self.pdf_fn is not None:
            inner_pdf = self.pdf_fn
            pdf_fn = lambda x: inner_pdf(np.asarray(x, dtype=float) - offset)  # noqa: E731
        if self.cdf_fn is not None:
            inner_cdf = self.cdf_fn
            cdf_fn = lambda x: inner_cdf(np.asarray(x, dtype=float) - offset)  # noqa: E731
        return replace(
            self,
            grid=self.grid + offset,
            meta={**self.meta, **meta},
            pdf_fn=pdf_fn,
            cdf_fn=cdf_fn,
        )


def empirical_cdf(samples, **meta) -> DistributionCurve:
    """Right-continuous step CDF of ``samples``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("empirical CDF of an empty sample set")
    n = x.size
    # collapse ties so the grid is the set of jump locations
    uniq, last = np.unique(x, return_index=False, return_counts=True)
    cdf = np.cumsum(last) / n
    return DistributionCurve(
        grid=uniq,
        pdf=np.full(uniq.size, np.nan),
        cdf=cdf,
        meta={"source": "empirical", "n": int(n), **meta},
        kind="step",
    )


def ks_distance(a: DistributionCurve, b: DistributionCurve) -> float:
    """Supremum of ``|F_a - F_b|`` over both grids, including left limits at jumps."""
    pts = np.union1d(a.grid, b.grid)
    left = np.nextafter(pts, -np.inf)
    probe = np.concatenate([pts, left])
    return float(np.max(np.abs(a.cdf_at(probe) - b.cdf_at(probe))))
