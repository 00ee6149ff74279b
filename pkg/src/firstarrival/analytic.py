"""Mean number of visible reflections and the first-arrival path-length law.

Everything reduces to one-dimensional integrals along the two branches of the
reflection hyperbola, taken in the frame rotated by the reflector orientation
where the hyperbola is ``x * y = const``.  The quadrant I branch is
parameterised by its rotated abscissa and the quadrant II branch by its rotated
ordinate; quadrants III and IV mirror them through the origin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .blocking import BooleanModelParams, _ScalarVisibility, visibility_probability
from . import _kernels
from ._quadrature import QuadratureError, adaptive_legendre
from .curves import DistributionCurve
from .geometry import DomainError, TestLink, rotated_limits

# envelope remainder allowed beyond the truncation point, per branch integral
TAIL_TARGET = 1e-9
# absolute quadrature tolerance, in units of mean reflector count
INTENSITY_ABS_TOL = 1e-10
MAX_SUBDIVISIONS = 200
# the default grid stops at this CDF level
DEFAULT_COVERAGE = 1 - 1e-4


@dataclass(frozen=True)
class IntensityResult:
    """Mean count of reflectors with visible reflections in a path-length window.

    Attributes
    ----------
    value : float
        Mean count, the sum of ``per_quadrant_per_orientation``.
    per_quadrant_per_orientation : ndarray, shape (n_theta, 2)
        Contribution of each orientation through the quadrant I and II
        branches.  Quadrants III and IV are already folded in.
    tail_error_bound : float
        Upper bound on the mass dropped by truncating an infinite window.
    """

    value: float
    per_quadrant_per_orientation: np.ndarray
    tail_error_bound: float = 0.0


def _rate(model: BooleanModelParams) -> float:
    return 2.0 * model.density * model.mean_width


def _truncation_offset(rate: float) -> float:
    """Distance past the branch start at which the envelope remainder hits the target."""
    return max(math.log(1.0 / (rate * TAIL_TARGET)), 0.0) / rate


def _pieces(a: float, b: float, scale: float):
    """Split ``[a, b]`` at geometrically growing steps.

    The first step is an eighth of ``scale`` or of ``a``, whichever is smaller:
    near the start the branch's other coordinate varies like ``1 / a``.
    """
    pts = [a]
    step = min(scale, max(a, 1e-6 * scale)) / 8.0
    while pts[-1] + step < b:
        pts.append(pts[-1] + step)
        step *= 2.0
    pts.append(b)
    return pts


class _BranchIntegrator:
    """Integrals of the visibility probability along one orientation's hyperbola."""

    def __init__(self, theta: float, model: BooleanModelParams, link: TestLink, blocking: bool):
        self.theta = theta
        self.link = link
        self.blocking = blocking
        self.rate = _rate(model)
        self.scale = max(1.0 / self.rate, link.d)
        self.const = -(link.d**2) * math.sin(2 * theta) / 8.0
        self.cos = math.cos(theta)
        self.sin = math.sin(theta)
        self.start = (0.5 * link.d * self.cos, 0.5 * link.d * self.sin)
        self.rho = _ScalarVisibility(model, link) if blocking else None
        # tolerance per sub-integral, converted from count units to metres
        self.epsabs = INTENSITY_ABS_TOL / self.rate

    def _integrand(self, quadrant: int):
        c, s, k, rho = self.cos, self.sin, self.const, self.rho
        if quadrant == 0:

            def f(x):
                y = k / x
                return rho(c * x - s * y, s * x + c * y)

        else:

            def f(y):
                x = k / y
                return rho(c * x - s * y, s * x + c * y)

        return f

    def integral(self, quadrant: int, lo: float, hi: float) -> float:
        """Integral over the rotated coordinate range ``[lo, hi]`` of one branch."""
        if hi <= lo:
            return 0.0
        if not self.blocking:
            return hi - lo
        f = self._integrand(quadrant)
        parts = []
        pts = _pieces(lo, hi, self.scale)
        for a, b in zip(pts[:-1], pts[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err, info = integrate.quad(
                    f, a, b, epsabs=self.epsabs, epsrel=1e-12, limit=MAX_SUBDIVISIONS, full_output=1
                )[:3]
            if info.get("last", 0) >= MAX_SUBDIVISIONS or err > max(10 * self.epsabs, 1e-9 * abs(val)):
                raise QuadratureError(
                    f"quadrature did not converge on [{a:.6g}, {b:.6g}] "
                    f"(orientation {self.theta:.6g} rad, error estimate {err:.3g})"
                )
            parts.append(val)
        return math.fsum(parts)

    def limits(self, s):
        """Rotated-frame endpoints of both branches for path length ``s``."""
        if math.isinf(s):
            off = _truncation_offset(self.rate)
            return self.start[0] + off, self.start[1] + off
        x, y = rotated_limits(s, self.theta, self.link)
        return float(x), float(y)

    def tail_bound(self) -> float:
        """Envelope bound on both dropped branch tails, in metres of branch length."""
        off = _truncation_offset(self.rate)
        return 2.0 * math.exp(-self.rate * off) / self.rate


def _check_window(s1, s2, link: TestLink):
    if math.isnan(s1) or math.isnan(s2):
        raise DomainError("path-length window contains NaN")
    if math.isinf(s1):
        raise DomainError("lower path length must be finite")
    if s1 < link.d * (1 - 1e-12):
        raise DomainError(f"lower path length {s1} is below d = {link.d}")
    if s2 < s1:
        raise DomainError(f"window is reversed: s1={s1} > s2={s2}")


def intensity(s1: float, s2: float, model: BooleanModelParams, link: TestLink, blocking: bool = True):
    """Mean number of reflectors whose visible reflection has length in ``[s1, s2]``.

    Parameters
    ----------
    s1, s2 : float
        Path-length window in metres, ``d <= s1 <= s2``; ``s2`` may be ``inf``.
    blocking : bool
        ``False`` forces the visibility probability to one.

    Returns
    -------
    IntensityResult
    """
    s1, s2 = float(s1), float(s2)
    _check_window(s1, s2, link)
    s1 = max(s1, link.d)
    thetas = model.thetas
    rate = _rate(model)
    scale = rate / thetas.size
    breakdown = np.zeros((thetas.size, 2))
    tail = 0.0
    for j, theta in enumerate(thetas):
        br = _BranchIntegrator(float(theta), model, link, blocking)
        lo = br.limits(s1)
        hi = br.limits(s2)
        for quadrant in (0, 1):
            breakdown[j, quadrant] = scale * br.integral(quadrant, lo[quadrant], hi[quadrant])
        if math.isinf(s2) and blocking:
            tail += scale * br.tail_bound()
    if math.isinf(s2) and not blocking:
        breakdown[:] = np.inf
        return IntensityResult(math.inf, breakdown, 0.0)
    value = math.fsum(breakdown.ravel())
    return IntensityResult(value, breakdown, tail)


def branch_integrals(model: BooleanModelParams, link: TestLink) -> np.ndarray:
    """Improper integrals of the visibility probability along each branch.

    Returns an array of shape ``(n_theta, 2)`` in metres; each entry is bounded
    by ``1 / (2 lambda E[W])``.
    """
    out = np.zeros((model.thetas.size, 2))
    for j, theta in enumerate(model.thetas):
        br = _BranchIntegrator(float(theta), model, link, True)
        hi = br.limits(math.inf)
        for quadrant in (0, 1):
            out[j, quadrant] = br.integral(quadrant, br.start[quadrant], hi[quadrant])
    return out


def no_visible_reflection_probability(model: BooleanModelParams, link: TestLink) -> float:
    """Probability that no reflector produces a visible reflection at all."""
    return math.exp(-intensity(link.d, math.inf, model, link).value)


def _unblocked_exponent(s, model: BooleanModelParams, link: TestLink):
    """Closed-form mean reflection count up to ``s`` with blocking switched off."""
    s = np.asarray(s, dtype=float)
    d = link.d
    th = model.thetas
    st, ct = np.sin(th), np.cos(th)
    s2 = (s * s)[..., None]
    excess = s2 - d * d
    # sqrt(s^2 - d^2 sin^2) - d cos written without cancellation near s = d
    term_1 = excess / (np.sqrt(s2 - (d * st) ** 2) + d * ct)
    term_2 = excess / (np.sqrt(s2 - (d * ct) ** 2) + d * st)
    return model.density * model.mean_width * np.mean(term_1 + term_2, axis=-1)


def _unblocked_exponent_slope(s, model: BooleanModelParams, link: TestLink):
    s = np.asarray(s, dtype=float)
    d = link.d
    th = model.thetas
    s2 = (s * s)[..., None]
    terms = 1.0 / np.sqrt(s2 - (d * np.sin(th)) ** 2) + 1.0 / np.sqrt(s2 - (d * np.cos(th)) ** 2)
    return model.density * model.mean_width * s * np.mean(terms, axis=-1)


def _check_lengths(s, link: TestLink) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s < link.d * (1 - 1e-12)) or np.any(~np.isfinite(s)):
        raise DomainError(f"path lengths must be finite and >= d = {link.d}")
    return np.maximum(s, link.d)


def _check_grid(grid, link: TestLink) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-D array")
    if np.any(grid < link.d * (1 - 1e-12)) or np.any(~np.isfinite(grid)):
        raise DomainError(f"grid points must be finite and >= d = {link.d}")
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid must be ascending")
    return np.maximum(grid, link.d)


class ToaDistribution:
    """Path length of the first-arriving reflection.

    With ``blocking=True`` the law is conditioned on at least one visible
    reflection existing anywhere; without blocking every reflector is visible,
    the count is a.s. infinite and no conditioning is needed.

    The running mean count is tabulated on an evenly spaced lattice of path
    lengths, extended on demand, by integrating its closed-form derivative over
    ``s``; an evaluation then only integrates from the lattice point below it,
    vectorised over all requested points.
    """

    def __init__(self, model: BooleanModelParams, link: TestLink, blocking: bool = True):
        self.model = model
        self.link = link
        self.blocking = blocking
        self.rate = _rate(model)
        # running mean count on the lattice d + k * step, extended on demand
        self._step = 0.25 * min(link.d, 1.0 / self.rate)
        self._knot_values = np.zeros(1)
        if blocking:
            full = intensity(link.d, math.inf, model, link)
            self.lambda_inf = full.value
            self.tail_error_bound = full.tail_error_bound
            # past this every branch has reached its truncation point
            self._max_knot = int(math.ceil(2.0 * _truncation_offset(self.rate) / self._step))
        else:
            self.lambda_inf = math.inf
            self.tail_error_bound = 0.0

    @property
    def normalizer(self) -> float:
        """Probability of the conditioning event."""
        return -math.expm1(-self.lambda_inf) if self.blocking else 1.0

    def mean_count(self, s):
        """Mean number of visible reflections no longer than ``s``."""
        s_arr = _check_lengths(s, self.link)
        if not self.blocking:
            out = _unblocked_exponent(s_arr, self.model, self.link)
            return out if np.ndim(out) else float(out)
        d = self.link.d
        # past the last lattice point the remaining count is below tail_error_bound
        flat = np.minimum(s_arr.ravel(), d + self._max_knot * self._step)
        idx = np.minimum(np.floor((flat - d) / self._step).astype(np.int64), self._max_knot)
        if idx.size:
            self._extend(int(idx.max()))
        out = self._knot_values[idx] + self._count_between(d + idx * self._step, flat)
        out = out.reshape(s_arr.shape)
        return out if np.ndim(out) else float(out)

    def _extend(self, k_max: int):
        have = self._knot_values.size
        if k_max < have:
            return
        # grow geometrically so repeated small extensions stay cheap
        k_max = min(max(k_max, 2 * have), self._max_knot)
        lo = self.link.d + self._step * np.arange(have - 1, k_max)
        inc = self._count_between(lo, lo + self._step)
        self._knot_values = np.concatenate([self._knot_values, self._knot_values[-1] + np.cumsum(inc)])

    def _count_between(self, lo, hi):
        return adaptive_legendre(
            self.count_density, lo, hi, INTENSITY_ABS_TOL, max_length=0.25 * min(self.link.d, 1.0 / self.rate)
        )

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        safe = np.maximum(s, self.link.d)
        out = -np.expm1(-np.asarray(self.mean_count(safe))) / self.normalizer
        out = np.where(s < self.link.d, 0.0, np.minimum(out, 1.0))
        return out if np.ndim(out) else float(out)

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        safe = np.maximum(s, self.link.d)
        out = np.exp(-np.asarray(self.mean_count(safe))) * self.count_density(safe) / self.normalizer
        out = np.where(s < self.link.d, 0.0, out)
        return out if np.ndim(out) else float(out)

    def count_density(self, s):
        """Derivative of ``mean_count`` with respect to ``s``."""
        s = np.asarray(s, dtype=float)
        if not self.blocking:
            return _unblocked_exponent_slope(s, self.model, self.link)
        th = self.model.thetas
        flat = np.ascontiguousarray(s.ravel())
        out = _kernels.count_density(
            flat,
            th,
            np.cos(th),
            np.sin(th),
            self.model.density,
            self.model.mean_width,
            self.model.widths.second_moment,
            self.link.d,
        )
        return out.reshape(s.shape)

    def count_density_reference(self, s):
        """Pure numpy version of :meth:`count_density`."""
        s = np.asarray(s, dtype=float)
        d = self.link.d
        th = self.model.thetas
        st, ct = np.sin(th), np.cos(th)
        s_col = s[..., None]
        s2, d2 = s_col * s_col, d * d
        root_1 = np.sqrt(s2 - d2 * st * st)
        root_2 = np.sqrt(s2 - d2 * ct * ct)
        # quadrant I and II boundary points for every orientation at once
        h_1 = np.stack([s2 * ct / (2 * root_1), (s2 - d2) * st / (2 * root_1)], axis=-1)
        h_2 = np.stack([-s2 * st / (2 * root_2), (s2 - d2) * ct / (2 * root_2)], axis=-1)
        rho_1 = visibility_probability(h_1, self.model, self.link)
        rho_2 = visibility_probability(h_2, self.model, self.link)
        acc = np.sum(rho_1 / root_1 + rho_2 / root_2, axis=-1)
        return self.model.density * self.model.mean_width * s * acc / th.size

    def quantile(self, p: float) -> float:
        """Smallest path length whose CDF reaches ``p``."""
        if not 0 <= p < 1:
            raise DomainError(f"quantile level must lie in [0, 1), got {p!r}")
        d = self.link.d
        if p == 0:
            return d
        target = -math.log1p(-p * self.normalizer)
        g = lambda s: float(self.mean_count(s)) - target  # noqa: E731
        hi = 2.0 * d
        while g(hi) < 0:
            hi = d + 2.0 * (hi - d)
            if hi > 1e12 * d:
                raise QuadratureError("quantile bracket search diverged")
        return optimize.brentq(g, d, hi, xtol=1e-13 * d, rtol=4 * np.finfo(float).eps)

    def default_grid(self, points: int = 200, coverage: float = DEFAULT_COVERAGE) -> np.ndarray:
        """Geometric spacing in ``s - d`` from just above ``d`` out to a high quantile."""
        if points < 3:
            raise DomainError("a grid needs at least 3 points")
        d = self.link.d
        span = self.quantile(coverage) - d
        return np.concatenate([[d], d + np.geomspace(span * 1e-4, span, points - 1)])

    def curve(self, grid=None, points: int = 200, coverage: float = DEFAULT_COVERAGE) -> DistributionCurve:
        grid = self.default_grid(points, coverage) if grid is None else _check_grid(grid, self.link)
        return DistributionCurve(
            grid=grid,
            pdf=np.asarray(self.pdf(grid), dtype=float),
            cdf=np.asarray(self.cdf(grid), dtype=float),
            meta={
                "source": "toa_with_blocking" if self.blocking else "toa_without_blocking",
                "d": self.link.d,
                "density": self.model.density,
                "lambda_hat_inf": self.lambda_inf,
                "tail_error_bound": self.tail_error_bound,
            },
            pdf_fn=self.pdf,
            cdf_fn=self.cdf,
        )


def toa_with_blocking(model: BooleanModelParams, link: TestLink, grid=None, points: int = 200) -> DistributionCurve:
    """First-arrival path length under independent blocking, given one visible reflection exists."""
    return ToaDistribution(model, link, blocking=True).curve(grid, points)


def toa_without_blocking(link: TestLink, model: BooleanModelParams, grid=None, points: int = 200) -> DistributionCurve:
    """First-arrival path length when no reflection is ever blocked."""
    return ToaDistribution(model, link, blocking=False).curve(grid, points)


def bias_from_toa(curve: DistributionCurve, link: TestLink) -> DistributionCurve:
    """Excess range ``S - d`` of a path-length curve."""
    return curve.shifted(-link.d, quantity="bias")
