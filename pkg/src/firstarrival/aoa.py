"""Arrival direction of the first-arriving reflection at the mobile.

Given the first arrival has path length ``s``, it comes from one of ``4 n_theta``
possible boundary points, so the conditional direction is a finite mixture of
point masses.  Integrating against the path-length density gives the marginal
direction density, one smooth lobe per (orientation, quadrant) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import adaptive_legendre
from .analytic import ToaDistribution
from .blocking import BooleanModelParams, visibility_probability
from .geometry import (
    QUADRANTS,
    AoaFunctionMode,
    DomainError,
    Quadrant,
    TestLink,
    aoa_function,
    aoa_interval,
    boundary_prps,
)

# indicator signs: the quadrant I/II maps decrease in s, so their inverse slopes are negative
_LOBE_SIGN = {Quadrant.I: -1.0, Quadrant.II: -1.0, Quadrant.III: 1.0, Quadrant.IV: 1.0}


@dataclass(frozen=True)
class AoaAtom:
    angle: float
    weight: float
    quadrant: Quadrant
    orientation: float


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def contains(self, alpha, slack: float = 0.0):
        alpha = np.asarray(alpha, dtype=float)
        lo_ok = alpha >= self.lo - slack if self.lo_closed else alpha > self.lo - slack
        hi_ok = alpha <= self.hi + slack if self.hi_closed else alpha < self.hi + slack
        return lo_ok & hi_ok

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class AngleIntervalSet:
    """Disjoint, sorted angle intervals inside ``(0, 2 pi)``."""

    intervals: tuple

    @classmethod
    def union(cls, intervals, tol: float = 1e-12) -> "AngleIntervalSet":
        """Merge overlapping intervals, and touching ones unless both touching ends are open."""
        items = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
        merged = []
        for iv in items:
            if merged:
                cur = merged[-1]
                touching = abs(iv.lo - cur.hi) <= tol and (iv.lo_closed or cur.hi_closed)
                if iv.lo < cur.hi - tol or touching:
                    if iv.hi > cur.hi + tol:
                        merged[-1] = Interval(cur.lo, iv.hi, cur.lo_closed, iv.hi_closed)
                    elif abs(iv.hi - cur.hi) <= tol:
                        merged[-1] = Interval(cur.lo, cur.hi, cur.lo_closed, cur.hi_closed or iv.hi_closed)
                    continue
            merged.append(iv)
        return cls(tuple(merged))

    def contains(self, alpha, slack: float = 0.0):
        alpha = np.asarray(alpha, dtype=float)
        out = np.zeros(alpha.shape, dtype=bool)
        for iv in self.intervals:
            out |= iv.contains(alpha, slack)
        return out

    @property
    def total_length(self) -> float:
        return sum(iv.length for iv in self.intervals)

    def in_degrees(self):
        return [(math.degrees(iv.lo), math.degrees(iv.hi), iv.lo_closed, iv.hi_closed) for iv in self.intervals]


def lobe_interval(q: Quadrant, theta: float) -> Interval:
    return Interval(*aoa_interval(q, theta))


def aoa_support(model: BooleanModelParams) -> AngleIntervalSet:
    """Directions the first-arriving reflection can come from, over all orientations."""
    return AngleIntervalSet.union(lobe_interval(q, float(th)) for th in model.thetas for q in QUADRANTS)


def atom_weights(s, model: BooleanModelParams, link: TestLink):
    """Unnormalised weights of every (quadrant, orientation) atom at path length ``s``.

    Returns an array of shape ``(4, n_theta) + shape(s)``.  Each weight is the
    visibility probability at the boundary point times the rate at which the
    rotated-frame branch coordinate grows with ``s``; the two inverse-slope
    factors cancel to one.
    """
    s = np.asarray(s, dtype=float)
    d = link.d
    out = np.empty((4, model.thetas.size) + s.shape)
    for j, theta in enumerate(model.thetas):
        h = boundary_prps(s, float(theta), link)
        rho = visibility_probability(h, model, link)
        root_1 = np.sqrt(s * s - (d * math.sin(theta)) ** 2)
        root_2 = np.sqrt(s * s - (d * math.cos(theta)) ** 2)
        for i, root in enumerate((root_1, root_2, root_1, root_2)):
            out[i, j] = rho[i] * s / (2.0 * root)
    return out


def conditional_aoa_atoms(s: float, model: BooleanModelParams, link: TestLink):
    """Direction law of the first arrival given its path length is ``s``.

    Returns ``4 n_theta`` atoms with weights summing to one.  Each weight is
    assembled from the AOA map's slope and its inverse's slope at the atom, as
    well as the visibility probability, then normalised.
    """
    s = float(s)
    if not s > link.d:
        raise DomainError(f"path length must exceed d = {link.d}, got {s!r}")
    d = link.d
    raw = []
    for theta in model.thetas:
        theta = float(theta)
        h = boundary_prps(s, theta, link)
        rho = visibility_probability(h, model, link)
        for i, q in enumerate(QUADRANTS):
            angle = aoa_function(q, AoaFunctionMode.VALUE, s, theta, link)
            slope = aoa_function(q, AoaFunctionMode.DERIVATIVE, s, theta, link)
            inv_slope = aoa_function(q, AoaFunctionMode.INVERSE_DERIVATIVE, angle, theta, link)
            k = d * math.sin(theta) if q in (Quadrant.I, Quadrant.III) else d * math.cos(theta)
            weight = rho[i] * s * inv_slope / (2.0 * math.sqrt(s * s - k * k)) * slope
            raw.append((angle, weight, q, theta))
    total = math.fsum(w for _, w, _, _ in raw)
    return [AoaAtom(a, w / total, q, th) for a, w, q, th in raw]


def marginal_aoa_pdf(alpha, model: BooleanModelParams, link: TestLink, toa: ToaDistribution | None = None):
    """Density per radian of the first arrival's direction, zero off the support."""
    alpha = np.asarray(alpha, dtype=float)
    toa = toa if toa is not None else ToaDistribution(model, link, blocking=True)
    flat = alpha.ravel()
    out = np.zeros(flat.size)
    for j, theta in enumerate(model.thetas):
        theta = float(theta)
        for i, q in enumerate(QUADRANTS):
            # the open end of each lobe is the infinite-path-length limit
            mask = lobe_interval(q, theta).contains(flat)
            if not np.any(mask):
                continue
            a = flat[mask]
            s_star = aoa_function(q, AoaFunctionMode.INVERSE, a, theta, link)
            s_star = np.maximum(np.atleast_1d(s_star), link.d)
            inv_slope = np.atleast_1d(aoa_function(q, AoaFunctionMode.INVERSE_DERIVATIVE, a, theta, link))
            weights = atom_weights(s_star, model, link)
            total = weights.reshape(-1, s_star.size).sum(axis=0)
            # every atom invisible: the path-length density is zero there as well
            share = np.divide(weights[i, j], total, out=np.zeros_like(total), where=total > 0)
            out[mask] += _LOBE_SIGN[q] * inv_slope * share * toa.pdf(s_star)
    return out.reshape(alpha.shape) if alpha.ndim else float(out[0])


def aoa_bin_probabilities(edges, model: BooleanModelParams, link: TestLink, toa: ToaDistribution | None = None):
    """Probability mass of the marginal direction law in each bin ``[edges[i], edges[i+1])``.

    Bins are cut at every lobe endpoint so the quadrature never straddles a jump.
    """
    edges = np.asarray(edges, dtype=float)
    toa = toa if toa is not None else ToaDistribution(model, link, blocking=True)
    ends = sorted({e for th in model.thetas for q in QUADRANTS for e in aoa_interval(q, float(th))[:2]})
    pts = np.union1d(edges, [e for e in ends if edges[0] < e < edges[-1]])
    pieces = adaptive_legendre(
        lambda a: marginal_aoa_pdf(a, model, link, toa), pts[:-1], pts[1:], 1e-9, abs_floor=1e-14
    )
    owner = np.searchsorted(edges, pts[:-1], side="right") - 1
    return np.bincount(owner, weights=pieces, minlength=edges.size - 1)[: edges.size - 1]
