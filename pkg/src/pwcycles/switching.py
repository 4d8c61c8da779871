"""Switching conic, Lie derivatives and Filippov classification on it.

Orientation: the *inner* field acts on ``h <= 0`` and the *outer* field on
``h >= 0``.  With ``Xh``/``Yh`` the Lie derivatives of ``h`` along the inner
and outer fields, a point of the conic is

* crossing  when ``Xh * Yh > 0``;
* sliding   when ``Xh > 0`` and ``Yh < 0`` (both fields push onto the curve);
* escaping  when ``Xh < 0`` and ``Yh > 0`` (both fields push away from it).
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import (DegenerateField, DivisionDegenerate, NotSlidingPoint,
                     TooManyRoots)
from .fields import AffineField

__all__ = [
    "SwitchingConic",
    "UNIT_CIRCLE",
    "SigmaKind",
    "SigmaClassification",
    "TangencyKind",
    "TangencyOrder",
    "tang_tol",
    "lie_derivative",
    "lie_polynomial",
    "classify_on_sigma",
    "tangency_points",
    "sliding_field",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SwitchingConic:
    """``h(x, y) = inv_u2 * x^2 + inv_v2 * y^2 - level``."""

    inv_u2: float = 1.0
    inv_v2: float = 1.0
    level: float = 1.0

    def __post_init__(self):
        for name in ("inv_u2", "inv_v2", "level"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def ellipse(cls, u: float, v: float, radius_level: float = 1.0) -> "SwitchingConic":
        """``x^2/u^2 + y^2/v^2 - R``."""
        return cls(1.0 / (u * u), 1.0 / (v * v), radius_level)

    @property
    def radii(self) -> Tuple[float, float]:
        return math.sqrt(self.level / self.inv_u2), math.sqrt(self.level / self.inv_v2)

    @property
    def is_circle(self) -> bool:
        return self.inv_u2 == self.inv_v2

    def __call__(self, x, y):
        return self.inv_u2 * x * x + self.inv_v2 * y * y - self.level

    def gradient(self, x, y):
        return 2.0 * self.inv_u2 * x, 2.0 * self.inv_v2 * y

    def angle_point(self, phi):
        ru, rv = self.radii
        return ru * np.cos(phi), rv * np.sin(phi)

    def tangent(self, phi):
        """``d angle_point / d phi``."""
        ru, rv = self.radii
        return -ru * np.sin(phi), rv * np.cos(phi)

    def angle_of(self, x, y):
        """Inverse of :meth:`angle_point` (radial projection), in ``[0, 2pi)``."""
        ru, rv = self.radii
        return np.mod(np.arctan2(y / rv, x / ru), TWO_PI)

    @property
    def poly(self) -> np.ndarray:
        """Coefficient array ``c[i, j]`` of ``x^i y^j``."""
        c = np.zeros((3, 3))
        c[0, 0] = -self.level
        c[2, 0] = self.inv_u2
        c[0, 2] = self.inv_v2
        return c


UNIT_CIRCLE = SwitchingConic()


def tang_tol(field: AffineField) -> float:
    return 1e-9 * (1.0 + field.scale)


# --- exact polynomial Lie derivatives -------------------------------------

def _polymul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for i, j in zip(*np.nonzero(a)):
        out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


def _polyadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))
    out = np.zeros(shape)
    out[:a.shape[0], :a.shape[1]] += a
    out[:b.shape[0], :b.shape[1]] += b
    return out


def _apply_field(field: AffineField, poly: np.ndarray) -> np.ndarray:
    fx = np.array([[field.e0, field.e2], [field.e1, 0.0]])
    fy = np.array([[field.f0, field.f2], [field.f1, 0.0]])
    dx = np.polynomial.polynomial.polyder(poly, axis=0)
    dy = np.polynomial.polynomial.polyder(poly, axis=1)
    return _polyadd(_polymul(fx, dx), _polymul(fy, dy))


def lie_polynomial(field: AffineField, conic: SwitchingConic, order: int = 1) -> np.ndarray:
    """Coefficients of ``F^k h`` as a bivariate polynomial."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return _lie_polynomial_cached(field, conic, order).copy()


@functools.lru_cache(maxsize=256)
def _lie_polynomial_cached(field, conic, order):
    poly = conic.poly
    for _ in range(order):
        poly = _apply_field(field, poly)
    return poly


def lie_derivative(field: AffineField, conic: SwitchingConic, point, order: int = 1):
    """``F^k h`` evaluated at ``point`` (arrays broadcast)."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if order == 1:
        x, y = point[0], point[1]
        fx, fy = field(x, y)
        return 2.0 * conic.inv_u2 * x * fx + 2.0 * conic.inv_v2 * y * fy
    poly = _lie_polynomial_cached(field, conic, order)
    return np.polynomial.polynomial.polyval2d(point[0], point[1], poly)


# --- classification on the conic ----------------------------------------

class SigmaKind(enum.Enum):
    CROSSING = "Crossing"
    SLIDING = "Sliding"
    ESCAPE = "Escape"
    TANGENCY_INNER = "TangencyInner"
    TANGENCY_OUTER = "TangencyOuter"
    TANGENCY_BOTH = "TangencyBoth"


@dataclass(frozen=True)
class SigmaClassification:
    kind: SigmaKind
    lie_inner: float
    lie_outer: float


def classify_lie(lie_inner: float, lie_outer: float, tol_inner: float,
                 tol_outer: float) -> SigmaKind:
    t_in = abs(lie_inner) < tol_inner
    t_out = abs(lie_outer) < tol_outer
    if t_in and t_out:
        return SigmaKind.TANGENCY_BOTH
    if t_in:
        return SigmaKind.TANGENCY_INNER
    if t_out:
        return SigmaKind.TANGENCY_OUTER
    if lie_inner * lie_outer > 0:
        return SigmaKind.CROSSING
    if lie_inner > 0:
        return SigmaKind.SLIDING
    return SigmaKind.ESCAPE


def classify_point(system, point) -> SigmaClassification:
    xh = float(lie_derivative(system.inner, system.conic, point, 1))
    yh = float(lie_derivative(system.outer, system.conic, point, 1))
    kind = classify_lie(xh, yh, tang_tol(system.inner), tang_tol(system.outer))
    return SigmaClassification(kind, xh, yh)


def classify_on_sigma(system, phi: float) -> SigmaClassification:
    return classify_point(system, system.conic.angle_point(phi))


# --- tangencies -----------------------------------------------------------

class TangencyKind(enum.Enum):
    FOLD = "Fold"
    CUSP = "Cusp"
    HIGHER = "Higher"


@dataclass(frozen=True)
class TangencyOrder:
    order: TangencyKind
    values: Tuple[float, float, float]


def tangency_order(field: AffineField, conic: SwitchingConic, point) -> TangencyOrder:
    vals = tuple(float(lie_derivative(field, conic, point, k)) for k in (1, 2, 3))
    tol = tang_tol(field)
    if abs(vals[1]) >= tol * (1.0 + field.scale):
        kind = TangencyKind.FOLD
    elif abs(vals[2]) >= tol * (1.0 + field.scale) ** 2:
        kind = TangencyKind.CUSP
    else:
        kind = TangencyKind.HIGHER
    return TangencyOrder(kind, vals)


def _lie_on_conic(field, conic):
    poly = lie_polynomial(field, conic, 1)
    dpoly_x = np.polynomial.polynomial.polyder(poly, axis=0)
    dpoly_y = np.polynomial.polynomial.polyder(poly, axis=1)

    def f(phi):
        x, y = conic.angle_point(phi)
        return np.polynomial.polynomial.polyval2d(x, y, poly)

    def df(phi):
        x, y = conic.angle_point(phi)
        tx, ty = conic.tangent(phi)
        return (np.polynomial.polynomial.polyval2d(x, y, dpoly_x) * tx
                + np.polynomial.polynomial.polyval2d(x, y, dpoly_y) * ty)

    return f, df


def tangency_points(field: AffineField, conic: SwitchingConic = UNIT_CIRCLE,
                    nodes: int = 720) -> List[Tuple[float, TangencyOrder]]:
    """Angles where ``field`` is tangent to the conic, sorted in ``[0, 2pi)``.

    ``phi -> Fh(angle_point(phi))`` is a trigonometric polynomial of degree
    at most 2, so there are at most four roots unless it vanishes
    identically.
    """
    if field.is_zero():
        raise DegenerateField("tangency points of the zero field are undefined")
    nodes = max(int(nodes), 720)
    f, df = _lie_on_conic(field, conic)
    grid = np.linspace(0.0, TWO_PI, nodes + 1)
    vals = f(grid)
    tol = tang_tol(field)
    if np.all(np.abs(vals) < tol):
        raise TooManyRoots("Lie derivative vanishes identically on the conic")

    roots = []
    for i in range(nodes):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    # even-multiplicity roots do not change sign: look for touching minima of |f|
    absvals = np.abs(vals[:-1])
    for i in range(nodes):
        prev, nxt = absvals[i - 1], absvals[(i + 1) % nodes]
        if absvals[i] <= prev and absvals[i] <= nxt and absvals[i] > 0:
            lo, hi = grid[i] - TWO_PI / nodes, grid[i] + TWO_PI / nodes
            dlo, dhi = df(lo), df(hi)
            if dlo * dhi < 0:
                crit = brentq(df, lo, hi, xtol=1e-14)
                if abs(f(crit)) < tol:
                    roots.append(crit)

    unique: List[float] = []
    for r in sorted(np.mod(roots, TWO_PI)):
        if unique and _circ_dist(r, unique[-1]) < 1e-9:
            continue
        if unique and _circ_dist(r, unique[0]) < 1e-9:
            continue
        unique.append(float(r))
    if len(unique) > 4:
        raise TooManyRoots(f"found {len(unique)} tangencies; at most 4 are possible")
    return [(phi, tangency_order(field, conic, conic.angle_point(phi))) for phi in unique]


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


# --- sliding vector field ---------------------------------------------------

def sliding_field(system, phi: float) -> np.ndarray:
    """Filippov convex combination ``(Yh X - Xh Y) / (Yh - Xh)`` at ``phi``."""
    cls = classify_on_sigma(system, phi)
    if cls.kind not in (SigmaKind.SLIDING, SigmaKind.ESCAPE):
        raise NotSlidingPoint(f"point at angle {phi:.6g} is {cls.kind.value}")
    p = system.conic.angle_point(phi)
    return _convex_combination(system, p, cls.lie_inner, cls.lie_outer)


def _convex_combination(system, p, xh, yh) -> np.ndarray:
    denom = yh - xh
    scale = 1.0 + system.inner.scale + system.outer.scale
    if abs(denom) < 1e-14 * scale:
        raise DivisionDegenerate(f"Yh - Xh = {denom:.3g}")
    x_val = system.inner.at(p)
    y_val = system.outer.at(p)
    return (yh * x_val - xh * y_val) / denom
