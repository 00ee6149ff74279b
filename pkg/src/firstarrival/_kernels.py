"""Compiled inner loops.  Each has a plain numpy counterpart used as a test oracle."""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _leg_exponent(px, py, qx, qy, axes_c, axes_s):
    # sum over blocker orientations of the |projections| of q - p on both square axes
    vx = qx - px
    vy = qy - py
    acc = 0.0
    for k in range(axes_c.size):
        c = axes_c[k]
        s = axes_s[k]
        acc += abs(c * vx + s * vy) + abs(c * vy - s * vx)
    return acc


@njit(cache=True)
def count_density(s_values, thetas, axes_c, axes_s, density, mean_width, width_sq, d):
    """Derivative of the mean visible-reflection count with respect to path length."""
    out = np.empty(s_values.size)
    n_theta = thetas.size
    n_axes = axes_c.size
    hd = 0.5 * d
    d2 = d * d
    for i in range(s_values.size):
        s = s_values[i]
        s2 = s * s
        acc = 0.0
        for j in range(n_theta):
            st = math.sin(thetas[j])
            ct = math.cos(thetas[j])
            for branch in range(2):
                if branch == 0:
                    root = math.sqrt(s2 - d2 * st * st)
                    hx = s2 * ct / (2.0 * root)
                    hy = (s2 - d2) * st / (2.0 * root)
                else:
                    root = math.sqrt(s2 - d2 * ct * ct)
                    hx = -s2 * st / (2.0 * root)
                    hy = (s2 - d2) * ct / (2.0 * root)
                proj = _leg_exponent(-hd, 0.0, hx, hy, axes_c, axes_s)
                proj += _leg_exponent(hx, hy, hd, 0.0, axes_c, axes_s)
                expo = mean_width * proj / n_axes + 2.0 * width_sq
                acc += math.exp(-density * expo) / root
        out[i] = density * mean_width * s * acc / n_theta
    return out


# rotated-frame outward normals of the four faces: +x', +y', -x', -y'
_FACE_NX = np.array([1.0, 0.0, -1.0, 0.0])
_FACE_NY = np.array([0.0, 1.0, 0.0, -1.0])


@njit(cache=True)
def reflection_candidates(cx, cy, width, theta, d, s_max):
    """Specular reflection point of every reflector, if it has one with path length <= ``s_max``.

    In the frame rotated by the reflector orientation the faces are axis
    aligned and the reflection hyperbola is ``x' y' = -d^2 sin(2 theta) / 8``,
    so each face meets it in at most one point.  A crossing counts when the
    face's outward normal points towards both link ends.

    Returns ``(x, y, s, face, n_hits)`` arrays; ``s`` is ``inf`` where there is
    no reflection and ``n_hits`` counts faces that qualified.
    """
    n = cx.size
    rx = np.zeros(n)
    ry = np.zeros(n)
    rs = np.full(n, np.inf)
    face = np.full(n, -1, dtype=np.int64)
    hits = np.zeros(n, dtype=np.int64)
    hd = 0.5 * d
    for i in range(n):
        c = math.cos(theta[i])
        s = math.sin(theta[i])
        k = -d * d * math.sin(2.0 * theta[i]) / 8.0
        ux = c * cx[i] + s * cy[i]
        uy = -s * cx[i] + c * cy[i]
        h = 0.5 * width[i]
        for f in range(4):
            nx_r = _FACE_NX[f]
            ny_r = _FACE_NY[f]
            if nx_r != 0.0:
                xr = ux + nx_r * h
                if xr == 0.0:
                    continue
                yr = k / xr
                if abs(yr - uy) > h:
                    continue
            else:
                yr = uy + ny_r * h
                if yr == 0.0:
                    continue
                xr = k / yr
                if abs(xr - ux) > h:
                    continue
            px = c * xr - s * yr
            py = s * xr + c * yr
            nx = c * nx_r - s * ny_r
            ny = s * nx_r + c * ny_r
            if nx * (-hd - px) + ny * (0.0 - py) <= 0.0:
                continue
            if nx * (hd - px) + ny * (0.0 - py) <= 0.0:
                continue
            sp = math.hypot(px + hd, py) + math.hypot(px - hd, py)
            if sp > s_max:
                continue
            hits[i] += 1
            if sp < rs[i]:
                rs[i] = sp
                rx[i] = px
                ry[i] = py
                face[i] = f
    return rx, ry, rs, face, hits


@njit(cache=True)
def segment_hits_square(ax, ay, bx, by, cx, cy, width, theta):
    """True iff the open segment ``(a, b)`` meets the open square interior (separating axes)."""
    c = math.cos(theta)
    s = math.sin(theta)
    h = 0.5 * width
    # segment in the square's own frame
    a0 = c * (ax - cx) + s * (ay - cy)
    a1 = -s * (ax - cx) + c * (ay - cy)
    b0 = c * (bx - cx) + s * (by - cy)
    b1 = -s * (bx - cx) + c * (by - cy)
    if max(a0, b0) <= -h or min(a0, b0) >= h:
        return False
    if max(a1, b1) <= -h or min(a1, b1) >= h:
        return False
    # axis normal to the segment
    nx = -(b1 - a1)
    ny = b0 - a0
    radius = h * (abs(nx) + abs(ny))
    return abs(nx * a0 + ny * a1) < radius


@njit(cache=True)
def segment_blocked(ax, ay, bx, by, cx, cy, width, theta, exclude):
    """True iff any square other than index ``exclude`` blocks the open segment."""
    lo_x = min(ax, bx)
    hi_x = max(ax, bx)
    lo_y = min(ay, by)
    hi_y = max(ay, by)
    for k in range(cx.size):
        if k == exclude:
            continue
        reach = 0.7071067811865476 * width[k]
        # cheap rejection against the segment's bounding box
        if cx[k] + reach <= lo_x or cx[k] - reach >= hi_x or cy[k] + reach <= lo_y or cy[k] - reach >= hi_y:
            continue
        if segment_hits_square(ax, ay, bx, by, cx[k], cy[k], width[k], theta[k]):
            return True
    return False


@njit(cache=True)
def first_visible_correlated(order, rx, ry, cx, cy, width, theta, d):
    """Index of the shortest candidate whose two legs miss every other reflector, or -1."""
    hd = 0.5 * d
    for t in range(order.size):
        i = order[t]
        if segment_blocked(-hd, 0.0, rx[i], ry[i], cx, cy, width, theta, i):
            continue
        if segment_blocked(rx[i], ry[i], hd, 0.0, cx, cy, width, theta, i):
            continue
        return i
    return -1
