"""Vectorised adaptive Gauss-Legendre quadrature over many intervals at once."""

from __future__ import annotations

import numpy as np


class QuadratureError(ArithmeticError):
    """Adaptive quadrature hit its subdivision cap or flagged another failure."""


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(20)


def adaptive_legendre(func, lo, hi, tol, max_length=np.inf, abs_floor=0.0, max_rounds=60):
    """Integrals of a vectorised ``func`` over many intervals ``[lo_i, hi_i]`` at once.

    Every interval is first cut into pieces no longer than ``max_length``.  A
    piece is accepted when the 20-point Gauss-Legendre value on the whole piece
    agrees with the sum over its two halves to within ``tol`` times the piece's
    share of its interval, so each integral meets ``tol`` on its own;
    otherwise both halves are refined.  Comparing
    against the halves (rather than a lower-order rule on the same nodes)
    keeps derivative kinks from slipping through on a lucky agreement.
    Pieces whose error estimate is below ``abs_floor`` are accepted outright,
    which lets integrable endpoint singularities terminate.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    out = np.zeros(lo.size)
    length = np.maximum(hi - lo, 1e-300)
    counts = np.where(hi > lo, np.maximum(np.ceil(np.maximum(hi - lo, 0.0) / max_length), 1), 0).astype(int)
    owner = np.repeat(np.arange(lo.size), counts)
    first = np.repeat(np.cumsum(counts) - counts, counts)
    k = np.arange(owner.size) - first
    step = (hi - lo)[owner] / counts[owner]
    a = lo[owner] + k * step
    b = np.where(k == counts[owner] - 1, hi[owner], a + step)

    def rule(a, b):
        half = 0.5 * (b - a)
        vals = func(0.5 * (a + b)[:, None] + half[:, None] * _GAUSS_NODES[None, :])
        return half * (vals @ _GAUSS_WEIGHTS)

    whole = rule(a, b) if owner.size else np.zeros(0)
    for _ in range(max_rounds):
        if owner.size == 0:
            return out
        mid = 0.5 * (a + b)
        both = rule(np.concatenate([a, mid]), np.concatenate([mid, b]))
        left, right = both[: owner.size], both[owner.size :]
        refined = left + right
        allowed = np.maximum(tol * (b - a) / length[owner], 1e-14 * np.abs(refined))
        ok = np.abs(refined - whole) <= np.maximum(allowed, abs_floor)
        np.add.at(out, owner[ok], refined[ok])
        bad = ~ok
        owner = np.concatenate([owner[bad], owner[bad]])
        a, b = np.concatenate([a[bad], mid[bad]]), np.concatenate([mid[bad], b[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    if owner.size == 0:
        return out
    raise QuadratureError(f"{owner.size // 2} integration intervals failed to converge")
