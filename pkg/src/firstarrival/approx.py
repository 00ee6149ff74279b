"""Closed-form surrogates for the NLOS bias and how far each one is from the exact law."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._quadrature import adaptive_legendre
from .blocking import BooleanModelParams
from .curves import DistributionCurve

PDF_FLOOR = 1e-300
# how far out a bias curve must reach before its moments are trusted
MOMENT_COVERAGE = 1 - 1e-8


class Family(enum.Enum):
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    HALF_NORMAL = "half_normal"
    RAYLEIGH = "rayleigh"


class MomentMatching(enum.Enum):
    """Which moment pins the scale of a one-parameter family."""

    FIRST = "first"
    SECOND = "second"


def exponential_bias_rate(model: BooleanModelParams) -> float:
    """Rate per metre of the exponential tail of the unblocked bias, ``2 lambda E[W]``."""
    return 2.0 * model.density * model.mean_width


@dataclass(frozen=True)
class BiasMoments:
    """First two raw moments of the bias, with the error from the uncovered tail.

    ``truncation`` holds ``(tail mass * endpoint, tail mass * endpoint**2)``.
    """

    m1: float
    m2: float
    truncation: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.m1 > 0:
            raise ValueError(f"first moment must be positive, got {self.m1!r}")
        if not self.m2 > self.m1**2:
            raise ValueError(f"moments imply non-positive variance: m1={self.m1!r}, m2={self.m2!r}")

    @property
    def variance(self) -> float:
        return self.m2 - self.m1**2


def bias_moments(bias: DistributionCurve, min_coverage: float = 1 - 1e-7) -> BiasMoments:
    """Raw moments of a bias curve.

    Integrates ``b f(b)`` and ``b**2 f(b)`` over the tabulated range with
    adaptive Gauss-Legendre quadrature when the curve has an exact density and
    with the trapezoid rule otherwise.
    """
    covered = float(bias.cdf[-1])
    if covered < min_coverage:
        raise ValueError(f"curve covers {covered:.8f} of the mass, need at least {min_coverage}")
    lo, hi = float(bias.grid[0]), float(bias.grid[-1])
    if bias.pdf_fn is not None:
        f = bias.pdf_fn
        edges = np.unique(np.concatenate([bias.grid[:: max(1, bias.grid.size // 32)], [hi]]))
        m1, m2 = (
            float(
                np.sum(
                    adaptive_legendre(lambda x, p=power: x**p * f(x), edges[:-1], edges[1:], 1e-11 * hi**power)
                )
            )
            for power in (1, 2)
        )
    else:
        m1 = float(np.trapezoid(bias.grid * bias.pdf, bias.grid))
        m2 = float(np.trapezoid(bias.grid**2 * bias.pdf, bias.grid))
    tail = max(1.0 - covered, 0.0)
    return BiasMoments(m1, m2, (tail * hi, tail * hi * hi))


@dataclass(frozen=True)
class FittedFamily:
    """A moment-matched surrogate.

    ``params`` is ``(rate,)`` for the exponential, ``(shape, rate)`` for the
    gamma and ``(scale,)`` for the half-normal and Rayleigh families.
    """

    family: Family
    params: tuple
    matching: MomentMatching = MomentMatching.FIRST
    frozen: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not all(p > 0 and math.isfinite(p) for p in self.params):
            raise ValueError(f"{self.family.value} parameters must be positive, got {self.params!r}")
        fam = Family(self.family)
        if fam is Family.EXPONENTIAL:
            dist = stats.expon(scale=1.0 / self.params[0])
        elif fam is Family.GAMMA:
            shape, rate = self.params
            dist = stats.gamma(shape, scale=1.0 / rate)
        elif fam is Family.HALF_NORMAL:
            dist = stats.halfnorm(scale=self.params[0])
        else:
            dist = stats.rayleigh(scale=self.params[0])
        object.__setattr__(self, "frozen", dist)

    def pdf(self, x):
        return self.frozen.pdf(x)

    def logpdf(self, x):
        return self.frozen.logpdf(x)

    def cdf(self, x):
        return self.frozen.cdf(x)

    def moments(self):
        return float(self.frozen.moment(1)), float(self.frozen.moment(2))


def fit_family(family, moments: BiasMoments, matching=MomentMatching.FIRST) -> FittedFamily:
    """Match a surrogate family to the bias moments.

    The gamma family always matches both moments.  The others have one
    parameter, pinned by the first or the second raw moment.
    """
    family = Family(family)
    matching = MomentMatching(matching)
    m1, m2 = moments.m1, moments.m2
    if family is Family.GAMMA:
        var = moments.variance
        return FittedFamily(family, (m1 * m1 / var, m1 / var), matching)
    first = matching is MomentMatching.FIRST
    if family is Family.EXPONENTIAL:
        # E[X] = 1/rate, E[X^2] = 2/rate^2
        rate = 1.0 / m1 if first else math.sqrt(2.0 / m2)
        return FittedFamily(family, (rate,), matching)
    if family is Family.HALF_NORMAL:
        # E[X] = scale sqrt(2/pi), E[X^2] = scale^2
        scale = m1 * math.sqrt(0.5 * math.pi) if first else math.sqrt(m2)
        return FittedFamily(family, (scale,), matching)
    # Rayleigh: E[X] = scale sqrt(pi/2), E[X^2] = 2 scale^2
    scale = m1 * math.sqrt(2.0 / math.pi) if first else math.sqrt(0.5 * m2)
    return FittedFamily(family, (scale,), matching)


@dataclass(frozen=True)
class KlReport:
    value: float
    truncation: float
    floor_hits: int


def kl_divergence(candidate: FittedFamily, bias: DistributionCurve, full_output: bool = False):
    """Divergence of the surrogate from the bias, ``int f_X log(f_X / f_B)``, in nats.

    The integral runs over the surrogate's bulk (up to its ``1 - 1e-12``
    quantile) wherever the bias density stays above ``PDF_FLOOR``; the mass
    left out is returned as a truncation estimate when ``full_output`` is set.
    Points where the bias density falls below the floor are counted and warned
    about rather than treated as failures.
    """
    upper = float(candidate.frozen.ppf(1 - 1e-12))
    lo = max(float(bias.grid[0]), 0.0)
    floor_hits = [0]

    def integrand(x):
        fb = np.asarray(bias.pdf_at(x), dtype=float)
        lfx = candidate.logpdf(x)
        usable = (fb > PDF_FLOOR) & np.isfinite(lfx)
        floor_hits[0] += int(np.count_nonzero(~(fb > PDF_FLOOR)))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.exp(lfx) * (lfx - np.log(fb))
        return np.where(usable, val, 0.0)

    # resolve the body near zero and the decay separately
    scale = float(candidate.frozen.std())
    cuts = [lo + scale * k for k in (0.01, 0.05, 0.25, 0.5, 1, 2, 4, 8, 16)]
    edges = np.array([lo] + [c for c in cuts if c < upper] + [upper])
    value = math.fsum(adaptive_legendre(integrand, edges[:-1], edges[1:], 1e-9, abs_floor=1e-15))
    truncation = float(candidate.frozen.sf(upper)) + float(candidate.cdf(lo))
    if floor_hits[0]:
        warnings.warn(
            f"bias density below {PDF_FLOOR:g} at {floor_hits[0]} evaluation points; those points were skipped",
            RuntimeWarning,
            stacklevel=2,
        )
    if full_output:
        return KlReport(value, truncation, floor_hits[0])
    return value
