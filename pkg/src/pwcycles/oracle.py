"""Brute-force reference solver for the closing equations.

Shares nothing with :mod:`pwcycles.cycles` beyond the first integrals: the
residual is evaluated by plugging conic points into ``H`` directly, minima
of ``|r|^2`` are located on a dense periodic grid and refined by repeated
local quadratic fits.  No Jacobian, no Newton.  Slow but simple, which is
the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Tuple

import numpy as np

from .fields import first_integral
from .system import PiecewiseSystem

TWO_PI = 2.0 * math.pi


@dataclass
class OracleResult:
    kind: str                     # "Empty", "Finite" or "Continuum"
    roots: List[Tuple[float, float]] = dc_field(default_factory=list)


def _residual_fn(system: PiecewiseSystem):
    h1 = first_integral(system.inner)
    h2 = first_integral(system.outer)
    conic = system.conic

    def norm2(a, t):
        xa, ya = conic.angle_point(a)
        xt, yt = conic.angle_point(t)
        d1 = h1(xa, ya) - h1(xt, yt)
        d2 = h2(xa, ya) - h2(xt, yt)
        return d1 * d1 + d2 * d2

    # magnitude of the integrals on the conic, to make tolerances relative
    phis = np.linspace(0.0, TWO_PI, 64, endpoint=False)
    pts = conic.angle_point(phis)
    scale = max(1.0, float(np.ptp(h1(*pts))), float(np.ptp(h2(*pts))))
    return norm2, scale


def _refine(norm2, a, t, step, iters=80):
    """Shrinking-stencil quadratic fits of ``norm2`` around ``(a, t)``."""
    offs = np.array([-1.0, 0.0, 1.0])
    u, v = np.meshgrid(offs, offs, indexing="ij")
    u, v = u.ravel(), v.ravel()
    design = np.stack([np.ones(9), u, v, u * u, u * v, v * v], axis=1)
    pinv = np.linalg.pinv(design)
    for _ in range(iters):
        f = norm2(a + step * u, t + step * v)
        c = pinv @ f
        hess = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
        grad = np.array([c[1], c[2]])
        try:
            move = -np.linalg.solve(hess, grad)
            if np.linalg.det(hess) <= 0 or hess[0, 0] <= 0:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            # indefinite or flat fit: step to the best stencil point instead
            k = int(np.argmin(f))
            move = np.array([u[k], v[k]])
        reach = float(np.abs(move).max())
        if reach > 1.0:
            # minimiser predicted outside the stencil: walk, do not shrink
            a += step * move[0] / reach
            t += step * move[1] / reach
            continue
        a += step * move[0]
        t += step * move[1]
        step *= min(0.5, max(reach, 0.05))
        if step < 1e-14:
            break
    return a, t


def brute_force_cycles(system: PiecewiseSystem, n: int = 2000, band: int = 2,
                       accept: float = 1e-8, merge: float = 1e-6,
                       continuum_count: int = 8) -> OracleResult:
    """All isolated off-diagonal roots of the closing residual, canonical ``alpha < theta``.

    More than ``continuum_count`` distinct roots is read as a curve of
    solutions and reported as ``"Continuum"``.
    """
    norm2, scale = _residual_fn(system)
    h = TWO_PI / n
    phis = np.arange(n) * h
    conic = system.conic
    pts = conic.angle_point(phis)
    w1 = first_integral(system.inner)(*pts)
    w2 = first_integral(system.outer)(*pts)
    grid = (w1[:, None] - w1[None, :]) ** 2 + (w2[:, None] - w2[None, :]) ** 2

    # 8-neighbour local minima (with wrap-around), off the diagonal band
    is_min = np.ones_like(grid, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= grid <= np.roll(grid, (di, dj), axis=(0, 1))
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None, :])
    sep = np.minimum(sep, n - sep)
    is_min &= (idx[:, None] < idx[None, :]) & (sep > band)
    ci, cj = np.nonzero(is_min)

    found: List[Tuple[float, float, float]] = []
    tol2 = (accept * scale) ** 2
    min_sep = (band + 0.5) * h
    for i, j in zip(ci, cj):
        a, t = _refine(norm2, float(phis[i]), float(phis[j]), h)
        res = float(norm2(a, t))
        if not res < tol2:
            continue
        a, t = a % TWO_PI, t % TWO_PI
        if a > t:
            a, t = t, a
        gap = min(t - a, TWO_PI - (t - a))
        if gap < min_sep:
            continue
        dup = [k for k, (b, s, _) in enumerate(found) if _close(a, t, b, s, merge)]
        if dup:
            # several grid minima can lead to one root: keep the best refinement
            k = dup[0]
            if res < found[k][2]:
                found[k] = (a, t, res)
            continue
        found.append((a, t, res))
        if len(found) > continuum_count:
            return OracleResult("Continuum", sorted((a, t) for a, t, _ in found))
    roots = sorted((a, t) for a, t, _ in found)
    return OracleResult("Finite" if roots else "Empty", roots)


def _close(a, t, b, s, tol):
    def circ(x, y):
        d = abs(x - y) % TWO_PI
        return min(d, TWO_PI - d)

    return circ(a, b) <= tol and circ(t, s) <= tol
