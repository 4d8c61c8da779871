"""Crossing cycles from the closing equations on the torus of angles.

A crossing cycle meeting the conic at ``P(alpha)`` and ``P(theta)`` must
lie on one level set of each piece's first integral, so with
``g_i(phi) = H_i(P(phi))`` the closing equations become::

    g_1(alpha) - g_1(theta) = 0
    g_2(alpha) - g_2(theta) = 0

The two conic constraints are absorbed by the angle parametrisation.  Every
``g_i`` is a trigonometric polynomial of degree two, so residuals and their
Jacobian are exact and cheap; the torus is scanned on a grid, seeds are
polished by damped Newton and the survivors are classified.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np

from .errors import BoundViolation, FoldOnCycle, GenericityViolation
from .fields import (QuadraticIntegral, SingularityKind, classify_singularity,
                     first_integral)
from .flow import AffineFlow, next_switching_event
from .switching import (SigmaKind, SwitchingConic, classify_point,
                        lie_derivative, tang_tol)
from .system import ClassTag, PiecewiseSystem

log = logging.getLogger(__name__)

__all__ = [
    "PiecewiseSystem",
    "SolverConfig",
    "ConicRestriction",
    "ClosingResidual",
    "Stability",
    "CrossingCycle",
    "SolutionKind",
    "SolutionSetReport",
    "HomoclinicConnection",
    "restrictions",
    "closing_residual",
    "residual_jacobian",
    "find_cycles",
    "continuum_test",
    "poincare_derivative",
    "half_map",
    "detect_homoclinic",
    "theorem_a_closed_form",
    "trig_roots",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SolverConfig:
    grid: int = 720
    newton_tol: float = 1e-11
    min_sep: float = 1e-7
    rank_tol: float = 1e-8
    stab_tol: float = 1e-9
    dedupe_tol: float = 1e-7
    max_newton: int = 60
    # cells within this many grid steps of the diagonal are not seeded
    diagonal_band: int = 2
    enforce_bounds: bool = True
    validate_orbits: bool = True


DEFAULT_CONFIG = SolverConfig()


# --- g(phi) = H(P(phi)) ------------------------------------------------------

@dataclass(frozen=True)
class ConicRestriction:
    """``g(phi) = k0 + A cos(phi) + B sin(phi) + C cos(2phi) + D sin(2phi)``."""

    k0: float
    A: float
    B: float
    C: float
    D: float

    @classmethod
    def from_integral(cls, H: QuadraticIntegral, conic: SwitchingConic) -> "ConicRestriction":
        ru, rv = conic.radii
        return cls(
            k0=0.5 * (H.c20 * ru * ru + H.c02 * rv * rv),
            A=H.c10 * ru,
            B=H.c01 * rv,
            C=0.5 * (H.c20 * ru * ru - H.c02 * rv * rv),
            D=0.5 * H.c11 * ru * rv,
        )

    @property
    def scale(self) -> float:
        return abs(self.A) + abs(self.B) + abs(self.C) + abs(self.D)

    def __call__(self, phi):
        return (self.k0 + self.A * np.cos(phi) + self.B * np.sin(phi)
                + self.C * np.cos(2 * phi) + self.D * np.sin(2 * phi))

    def deriv(self, phi):
        return (-self.A * np.sin(phi) + self.B * np.cos(phi)
                - 2 * self.C * np.sin(2 * phi) + 2 * self.D * np.cos(2 * phi))

    def deriv2(self, phi):
        return (-self.A * np.cos(phi) - self.B * np.sin(phi)
                - 4 * self.C * np.cos(2 * phi) - 4 * self.D * np.sin(2 * phi))


def trig_roots(g: ConicRestriction, value: float, polish: bool = True) -> List[float]:
    """All ``phi`` in ``[0, 2pi)`` with ``g(phi) == value``.

    Substituting ``z = exp(i phi)`` turns the equation into a quartic whose
    unimodular roots are the solutions.
    """
    k = g.k0 - value
    # z^2 * (k + A cos + B sin + C cos2 + D sin2) with cos = (z + 1/z)/2 ...
    coeffs = np.array([
        0.5 * (g.C - 1j * g.D),          # z^4
        0.5 * (g.A - 1j * g.B),          # z^3
        k,                               # z^2
        0.5 * (g.A + 1j * g.B),          # z^1
        0.5 * (g.C + 1j * g.D),          # z^0
    ], dtype=complex)
    nz = np.nonzero(np.abs(coeffs) > 1e-300)[0]
    if nz.size == 0:
        return []
    coeffs = coeffs[nz[0]:]
    if coeffs.size < 2:
        return []
    roots = np.roots(coeffs)
    scale = max(g.scale, abs(k), 1e-300)
    out = []
    for z in roots:
        if abs(abs(z) - 1.0) > 1e-3:
            continue
        phi = float(np.mod(np.angle(z), TWO_PI))
        if polish:
            phi = _polish_root(g, value, phi)
        if abs(g(phi) - value) <= 1e-9 * scale:
            out.append(phi)
    out.sort()
    uniq = []
    for phi in out:
        if not uniq or _circ(phi, uniq[-1]) > 1e-9:
            uniq.append(phi)
    if len(uniq) > 1 and _circ(uniq[0], uniq[-1]) <= 1e-9:
        uniq.pop()
    return uniq


def _polish_root(g, value, phi, iters=8):
    for _ in range(iters):
        d = g.deriv(phi)
        if d == 0:
            break
        step = (g(phi) - value) / d
        if abs(step) > 0.1:
            break
        phi -= step
        if abs(step) < 1e-16:
            break
    return float(np.mod(phi, TWO_PI))


def _circ(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def restrictions(system: PiecewiseSystem) -> Tuple[ConicRestriction, ConicRestriction]:
    """``(g_inner, g_outer)``; raises :class:`NotDivergenceFree` if needed."""
    h1 = first_integral(system.inner)
    h2 = first_integral(system.outer)
    return (ConicRestriction.from_integral(h1, system.conic),
            ConicRestriction.from_integral(h2, system.conic))


# --- residual and Jacobian ------------------------------------------------------

@dataclass(frozen=True)
class ClosingResidual:
    d1: float
    d2: float

    @property
    def norm(self) -> float:
        return math.hypot(self.d1, self.d2)


def closing_residual(system: PiecewiseSystem, alpha: float, theta: float) -> ClosingResidual:
    g1, g2 = restrictions(system)
    return ClosingResidual(float(g1(alpha) - g1(theta)), float(g2(alpha) - g2(theta)))


def residual_jacobian(system: PiecewiseSystem, alpha: float, theta: float) -> np.ndarray:
    g1, g2 = restrictions(system)
    return np.array([[g1.deriv(alpha), -g1.deriv(theta)],
                     [g2.deriv(alpha), -g2.deriv(theta)]], dtype=float)


def _residuals(g1, g2, a, t):
    return np.stack([g1(a) - g1(t), g2(a) - g2(t)], axis=-1)


def _jacobians(g1, g2, a, t):
    J = np.empty(np.shape(a) + (2, 2))
    J[..., 0, 0] = g1.deriv(a)
    J[..., 0, 1] = -g1.deriv(t)
    J[..., 1, 0] = g2.deriv(a)
    J[..., 1, 1] = -g2.deriv(t)
    return J


# --- result types ------------------------------------------------------------------

class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    NEUTRAL = "Neutral"
    UNDETERMINED = "Undetermined"


@dataclass
class CrossingCycle:
    alpha: float
    theta: float
    point_a: Tuple[float, float]
    point_b: Tuple[float, float]
    crossing_ok: bool
    stability: Stability = Stability.UNDETERMINED
    poincare_derivative: float = float("nan")
    is_homoclinic: bool = False
    # both half-maps, followed with the exact flows, land on the partner point
    orbit_ok: Optional[bool] = None
    residual: float = 0.0

    @property
    def angles(self) -> Tuple[float, float]:
        return self.alpha, self.theta

    @property
    def is_limit_cycle(self) -> bool:
        """A crossing, flow-validated, non-homoclinic isolated closed orbit."""
        return self.crossing_ok and not self.is_homoclinic and self.orbit_ok is not False


class SolutionKind(enum.Enum):
    EMPTY = "Empty"
    FINITE = "Finite"
    CONTINUUM = "Continuum"


@dataclass
class HomoclinicConnection:
    piece: str
    saddle: Tuple[float, float]
    level: float
    alpha: float
    theta: float
    point_a: Tuple[float, float]
    point_b: Tuple[float, float]
    # saddle lies outside the closure of its own piece's domain
    advisory: bool = False


@dataclass
class SolutionSetReport:
    """Outcome of :func:`find_cycles`.

    ``cycles`` holds the isolated solutions whose two points both lie in the
    crossing region.  Isolated solutions failing that certificate go to
    ``non_crossing``; solutions touching a tangency go to ``tangential``.
    """

    kind: SolutionKind
    cycles: List[CrossingCycle] = dc_field(default_factory=list)
    continuum_witness: Optional[np.ndarray] = None
    non_crossing: List[CrossingCycle] = dc_field(default_factory=list)
    tangential: List[Tuple[float, float]] = dc_field(default_factory=list)
    homoclinic: List[HomoclinicConnection] = dc_field(default_factory=list)
    newton_failures: int = 0

    @property
    def limit_cycles(self) -> List[CrossingCycle]:
        return [c for c in self.cycles if c.is_limit_cycle]

    @property
    def solution_angles(self) -> List[Tuple[float, float]]:
        """Every isolated off-diagonal root of the closing residual, sorted."""
        pairs = [(c.alpha, c.theta) for c in self.cycles + self.non_crossing]
        return sorted(pairs + list(self.tangential))

    @property
    def bounded_count(self) -> int:
        """Closed crossing orbits counted against the class bound."""
        return sum(1 for c in self.cycles if c.orbit_ok is not False or c.is_homoclinic)


# --- Newton --------------------------------------------------------------------------

def _newton(g1, g2, a, t, tol, max_iter):
    a = np.array(a, dtype=float)
    t = np.array(t, dtype=float)
    r = _residuals(g1, g2, a, t)
    nr = np.linalg.norm(r, axis=-1)
    active = nr >= tol
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        J = _jacobians(g1, g2, a[idx], t[idx])
        step = np.einsum("nij,nj->ni", np.linalg.pinv(J, rcond=1e-13), r[idx])
        # cap the step so Newton does not jump across the torus
        big = np.linalg.norm(step, axis=-1)
        step *= np.minimum(1.0, 0.5 / np.maximum(big, 1e-300))[:, None]
        lam = np.ones(idx.size)
        best_a, best_t = a[idx].copy(), t[idx].copy()
        best_r, best_n = r[idx].copy(), nr[idx].copy()
        pending = np.ones(idx.size, dtype=bool)
        for _ in range(12):
            if not pending.any():
                break
            na = a[idx] - lam[:, None][:, 0] * step[:, 0]
            nt = t[idx] - lam[:, None][:, 0] * step[:, 1]
            rr = _residuals(g1, g2, na, nt)
            nn = np.linalg.norm(rr, axis=-1)
            ok = pending & (nn < best_n)
            best_a[ok], best_t[ok], best_r[ok], best_n[ok] = na[ok], nt[ok], rr[ok], nn[ok]
            pending &= ~ok
            lam[pending] *= 0.5
        stalled = pending
        a[idx], t[idx], r[idx], nr[idx] = best_a, best_t, best_r, best_n
        active[idx] = (best_n >= tol) & ~stalled
    return a, t, nr


def _canonical(a, t):
    a = np.mod(a, TWO_PI)
    t = np.mod(t, TWO_PI)
    lo = np.minimum(a, t)
    hi = np.maximum(a, t)
    return lo, hi


def _dedupe(lo, hi, tol):
    """Representatives of clusters of canonical pairs closer than ``tol``."""
    out: List[Tuple[float, float]] = []
    if lo.size == 0:
        return out
    # coarse bucketing keeps this linear for the (rare) huge candidate sets
    keys = np.round(lo / max(tol, 1e-300) / 8.0)
    order = np.lexsort((hi, keys))
    for i in order:
        a, t = float(lo[i]), float(hi[i])
        if any(_circ(a, b) <= tol and _circ(t, s) <= tol for b, s in out[-64:]):
            continue
        if any(_circ(a, b) <= tol and _circ(t, s) <= tol for b, s in out):
            continue
        out.append((a, t))
    out.sort()
    return out


# --- continuum test -------------------------------------------------------------------

def continuum_test(system: PiecewiseSystem, candidate, cfg: SolverConfig = DEFAULT_CONFIG,
                   return_curve: bool = False):
    """Is ``candidate`` part of a one-parameter family of solutions?

    Requires a numerically singular Jacobian *and* a successful continuation
    along its null direction (20 predictor-corrector steps of 0.05 rad).
    """
    g1, g2 = restrictions(system)
    tol = _tol(cfg, g1, g2)
    x = np.array(candidate, dtype=float)
    J = _jacobians(g1, g2, x[0], x[1])
    _, svals, vt = np.linalg.svd(J)
    norm_j = svals[0]
    curve = [x.copy()]
    if norm_j > 0 and svals[1] >= cfg.rank_tol * norm_j:
        return (False, None) if return_curve else False
    direction = vt[-1] if norm_j > 0 else np.array([1.0, 0.0])
    ok = True
    for _ in range(20):
        pred = x + 0.05 * direction
        y = pred.copy()
        for _ in range(15):
            r = _residuals(g1, g2, y[0], y[1])
            if np.linalg.norm(r) < tol:
                break
            Jy = _jacobians(g1, g2, y[0], y[1])
            y = y - np.linalg.pinv(Jy, rcond=1e-12) @ r
        r = _residuals(g1, g2, y[0], y[1])
        if not np.linalg.norm(r) < 10 * tol:
            ok = False
            break
        Jy = _jacobians(g1, g2, y[0], y[1])
        _, _, vt = np.linalg.svd(Jy)
        new_dir = vt[-1]
        if new_dir @ direction < 0:
            new_dir = -new_dir
        direction = new_dir
        x = y
        curve.append(x.copy())
    if return_curve:
        return ok, (np.array(curve) if ok else None)
    return ok


def _tol(cfg, g1, g2):
    return cfg.newton_tol * max(1.0, g1.scale, g2.scale)


# --- half-maps and stability ------------------------------------------------------------

def _entry_exit(system, g1, alpha, theta):
    """Order the two cycle angles as (entry into the inner region, exit)."""
    # for a Hamiltonian piece the Lie derivative of h has the sign of g'
    if g1.deriv(alpha) < 0:
        return alpha, theta
    if g1.deriv(theta) < 0:
        return theta, alpha
    # constant or degenerate inner piece: fall back to Lie derivatives
    p = system.conic.angle_point(alpha)
    if lie_derivative(system.inner, system.conic, p, 1) < 0:
        return alpha, theta
    return theta, alpha


def poincare_derivative(system: PiecewiseSystem, cycle: CrossingCycle,
                        cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Derivative of the return map at the cycle's entry into the inner region.

    The inner half-map ``phi -> psi`` keeps ``g_1`` constant, so its
    derivative is ``g_1'(phi) / g_1'(psi)``; same for the outer piece.
    """
    g1, g2 = restrictions(system)
    a, b = _entry_exit(system, g1, cycle.alpha, cycle.theta)
    d1a, d1b, d2a, d2b = g1.deriv(a), g1.deriv(b), g2.deriv(a), g2.deriv(b)
    tol1 = tang_tol(system.inner)
    tol2 = tang_tol(system.outer)
    if min(abs(d1a), abs(d1b)) < tol1 or min(abs(d2a), abs(d2b)) < tol2:
        raise FoldOnCycle("a first integral is stationary along the conic at a cycle point")
    return float((d1a / d1b) * (d2b / d2a))


def stability_of(derivative: float, stab_tol: float) -> Stability:
    if not math.isfinite(derivative):
        return Stability.UNDETERMINED
    mag = abs(derivative)
    if mag > 1.0 + stab_tol:
        return Stability.UNSTABLE
    if mag < 1.0 - stab_tol:
        return Stability.STABLE
    return Stability.NEUTRAL


def half_map(system: PiecewiseSystem, phi: float, piece: str = "inner",
             t_max: float = 200.0) -> Optional[float]:
    """Angle where the orbit of ``piece`` started at ``P(phi)`` returns to the conic.

    The landing point is found by following the exact flow (which fixes
    which intersection of the level set is reached first) and then polished
    as a root of ``g(psi) = g(phi)``.  ``None`` if the orbit does not come
    back within ``t_max`` or the field does not enter its region at ``phi``.
    """
    field = system.inner if piece == "inner" else system.outer
    side = -1 if piece == "inner" else 1
    conic = system.conic
    p = np.array(conic.angle_point(phi))
    lie = float(lie_derivative(field, conic, p, 1))
    if lie * side <= 0:
        return None
    ev = next_switching_event(field, conic, p, t_max, side=side, flow=AffineFlow(field))
    if ev is None:
        return None
    psi = ev[1]
    if field.e1 + field.f2 == 0.0:
        g = ConicRestriction.from_integral(first_integral(field), conic)
        psi = _polish_root(g, float(g(phi)), psi)
    return psi


def _orbit_closes(system, cycle, g1, tol=1e-6):
    a, b = _entry_exit(system, g1, cycle.alpha, cycle.theta)
    inner_land = half_map(system, a, "inner")
    if inner_land is None or _circ(inner_land, b) > tol:
        return False
    outer_land = half_map(system, b, "outer")
    return outer_land is not None and _circ(outer_land, a) <= tol


# --- homoclinic connections ----------------------------------------------------------------

def detect_homoclinic(system: PiecewiseSystem, cfg: SolverConfig = DEFAULT_CONFIG
                      ) -> List[HomoclinicConnection]:
    """Closed crossing orbits made of a saddle's separatrices and an arc of the other piece."""
    g1, g2 = restrictions(system)
    tol = _tol(cfg, g1, g2)
    conic = system.conic
    out: List[HomoclinicConnection] = []
    for name, field, g_own, g_other in (("inner", system.inner, g1, g2),
                                         ("outer", system.outer, g2, g1)):
        rep = classify_singularity(field)
        if rep.kind is not SingularityKind.SADDLE:
            continue
        s = np.array(rep.location)
        hs = float(conic(*s))
        htol = 1e-9 * conic.level
        in_domain = hs <= htol if name == "inner" else hs >= -htol
        level = float(first_integral(field)(*s))
        roots = trig_roots(g_own, level)
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                a, t = roots[i], roots[j]
                if abs(float(g_other(a) - g_other(t))) >= tol:
                    continue
                pa = np.array(conic.angle_point(a))
                pt = np.array(conic.angle_point(t))
                if not _through_saddle(s, pa, pt):
                    continue
                ca, ct = classify_point(system, pa), classify_point(system, pt)
                if ca.kind is not SigmaKind.CROSSING or ct.kind is not SigmaKind.CROSSING:
                    continue
                out.append(HomoclinicConnection(
                    piece=name, saddle=(float(s[0]), float(s[1])), level=level,
                    alpha=a, theta=t,
                    point_a=(float(pa[0]), float(pa[1])),
                    point_b=(float(pt[0]), float(pt[1])),
                    advisory=not in_domain))
    return out


def _through_saddle(s, pa, pt) -> bool:
    """Does the separatrix path from ``pa`` to ``pt`` pass through ``s``?"""
    da, dt = pa - s, pt - s
    na, nt = np.linalg.norm(da), np.linalg.norm(dt)
    if na < 1e-12 or nt < 1e-12:
        return True
    cross = (da[0] * dt[1] - da[1] * dt[0]) / (na * nt)
    if abs(cross) > 1e-9:
        return True  # the two points lie on different separatrices
    return float(da @ dt) < 0


# --- the solver ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=4)
def _upper_band(n, band):
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None, :])
    sep = np.minimum(sep, n - sep)
    upper = (idx[:, None] < idx[None, :]) & (sep > band)
    upper.setflags(write=False)
    return upper


def _seed_cells(g1, g2, n, band):
    """Centres of grid cells that may contain a root of the closing residual."""
    h = TWO_PI / n
    phis = np.arange(n + 1) * h
    v1, v2 = g1(phis), g2(phis)
    # d_k[i, j] = v_k[i] - v_k[j] is separable, so a cell's corner range is
    # [min_i - max_j, max_i - min_j] and "spans zero" is two comparisons
    m1, M1 = np.minimum(v1[:-1], v1[1:]), np.maximum(v1[:-1], v1[1:])
    m2, M2 = np.minimum(v2[:-1], v2[1:]), np.maximum(v2[:-1], v2[1:])

    def spans(eps1, eps2):
        return ((m1[:, None] <= M1[None, :] + eps1) & (M1[:, None] + eps1 >= m1[None, :])
                & (m2[:, None] <= M2[None, :] + eps2) & (M2[:, None] + eps2 >= m2[None, :]))

    upper = _upper_band(n, band)
    mask = spans(0.0, 0.0)
    i, j = np.nonzero(mask & upper)

    # near-tangential roots need not change sign: also seed small local minima
    e1 = 4.0 * h * np.abs(g1.deriv(phis)).max()
    e2 = 4.0 * h * np.abs(g2.deriv(phis)).max()
    ci, cj = np.nonzero(spans(e1, e2) & upper & ~mask)
    if ci.size:
        w1, w2 = v1[:-1], v2[:-1]

        def norm2(a, b):
            a, b = a % n, b % n
            return (w1[a] - w1[b]) ** 2 + (w2[a] - w2[b]) ** 2

        here = norm2(ci, cj)
        is_min = np.ones(ci.size, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    is_min &= here <= norm2(ci + di, cj + dj)
        ci, cj = ci[is_min], cj[is_min]
    ii = np.concatenate([i, ci])
    jj = np.concatenate([j, cj])
    return (ii + 0.5) * h, (jj + 0.5) * h


def find_cycles(system: PiecewiseSystem, cfg: SolverConfig = DEFAULT_CONFIG
                ) -> SolutionSetReport:
    """Solve the closing equations and classify the solution set.

    Raises
    ------
    NotDivergenceFree
        A piece has no quadratic first integral.
    BoundViolation
        More closed crossing orbits than the class bound allows (only when
        ``cfg.enforce_bounds``).
    """
    g1, g2 = restrictions(system)
    tol = _tol(cfg, g1, g2)
    seeds_a, seeds_t = _seed_cells(g1, g2, cfg.grid, cfg.diagonal_band)
    if seeds_a.size > 20000:
        stride = int(math.ceil(seeds_a.size / 20000))
        seeds_a, seeds_t = seeds_a[::stride], seeds_t[::stride]
    report = SolutionSetReport(SolutionKind.EMPTY)
    if seeds_a.size == 0:
        return report

    a, t, nr = _newton(g1, g2, seeds_a, seeds_t, tol, cfg.max_newton)
    conv = nr < tol
    report.newton_failures = int((~conv).sum())
    if report.newton_failures:
        log.debug("%d of %d seeds did not converge", report.newton_failures, conv.size)
    lo, hi = _canonical(a[conv], t[conv])
    sep = _circ(lo, hi)
    off_diag = sep > cfg.min_sep
    lo, hi = lo[off_diag], hi[off_diag]

    # continuum: any rank-deficient candidate that continues along its null direction
    sv = np.linalg.svd(_jacobians(g1, g2, lo, hi), compute_uv=False)
    deficient = np.nonzero((sv[:, 0] == 0) | (sv[:, 1] < cfg.rank_tol * sv[:, 0]))[0]
    for idx in deficient[:10]:
        ok, curve = continuum_test(system, (lo[idx], hi[idx]), cfg, return_curve=True)
        if ok:
            report.kind = SolutionKind.CONTINUUM
            report.continuum_witness = curve
            return report
    pairs = _dedupe(lo, hi, cfg.dedupe_tol)

    homoclinic = []
    if any(classify_singularity(f).kind is SingularityKind.SADDLE
           for f in (system.inner, system.outer)):
        homoclinic = detect_homoclinic(system, cfg)
    report.homoclinic = homoclinic

    conic = system.conic
    for alpha, theta in pairs:
        pa = conic.angle_point(alpha)
        pt = conic.angle_point(theta)
        ca, ct = classify_point(system, pa), classify_point(system, pt)
        tangent_kinds = (SigmaKind.TANGENCY_INNER, SigmaKind.TANGENCY_OUTER,
                         SigmaKind.TANGENCY_BOTH)
        if ca.kind in tangent_kinds or ct.kind in tangent_kinds:
            report.tangential.append((alpha, theta))
            continue
        res = _residuals(g1, g2, alpha, theta)
        cyc = CrossingCycle(
            alpha=alpha, theta=theta,
            point_a=(float(pa[0]), float(pa[1])),
            point_b=(float(pt[0]), float(pt[1])),
            crossing_ok=(ca.kind is SigmaKind.CROSSING and ct.kind is SigmaKind.CROSSING),
            residual=float(np.linalg.norm(res)),
        )
        cyc.is_homoclinic = any(
            _circ(h.alpha, alpha) <= 1e-7 and _circ(h.theta, theta) <= 1e-7
            or _circ(h.alpha, theta) <= 1e-7 and _circ(h.theta, alpha) <= 1e-7
            for h in homoclinic)
        if cyc.crossing_ok:
            if cfg.validate_orbits and not cyc.is_homoclinic:
                cyc.orbit_ok = _orbit_closes(system, cyc, g1)
            try:
                cyc.poincare_derivative = poincare_derivative(system, cyc, cfg)
            except FoldOnCycle:
                pass
            # no return map exists through a saddle or along an orbit that escapes
            if not cyc.is_homoclinic and cyc.orbit_ok is not False:
                cyc.stability = stability_of(cyc.poincare_derivative, cfg.stab_tol)
        (report.cycles if cyc.crossing_ok else report.non_crossing).append(cyc)

    report.kind = SolutionKind.FINITE if report.cycles else SolutionKind.EMPTY
    if cfg.enforce_bounds and report.bounded_count > system.bound:
        raise BoundViolation(
            f"{report.bounded_count} crossing cycles exceed the bound {system.bound} "
            f"for class {system.class_tag.value}", report)
    return report


# --- closed form for a constant inner field -------------------------------------------

def theorem_a_closed_form(system: PiecewiseSystem, tol: float = 1e-12
                          ) -> Optional[Tuple[Tuple[float, float], Tuple[float, float]]]:
    """Explicit cycle points for a constant inner field and a Hamiltonian outer field.

    Returns ``((p, q), (r, s))`` or ``None`` when the radicand is negative.

    Raises
    ------
    GenericityViolation
        ``zeta == 0``, ``eta == +-zeta`` or the degenerate ``l`` value.
    """
    if system.class_tag not in (ClassTag.CONSTANT_CENTER, ClassTag.CONSTANT_SADDLE):
        raise ValueError("closed form applies to a constant inner field only")
    if system.conic != SwitchingConic():
        raise ValueError("closed form is derived for the unit circle")
    eta, zeta = system.inner.e0, system.inner.f0
    delta, l, k = system.outer.e0, system.outer.e1, system.outer.e2
    eps, m = system.outer.f0, system.outer.f1
    if abs(zeta) <= tol:
        raise GenericityViolation("zeta != 0 fails")
    if abs(eta - zeta) <= tol or abs(eta + zeta) <= tol:
        raise GenericityViolation("eta != +-zeta fails")
    l_bad = (k + m) * zeta * eta / (zeta ** 2 - eta ** 2)
    if abs(l - l_bad) <= tol:
        raise GenericityViolation("l != (k+m) zeta eta / (zeta^2 - eta^2) fails")

    z2e2 = zeta ** 2 + eta ** 2
    den = zeta * eta * (k + m) + l * (eta ** 2 - zeta ** 2)
    inner_bracket = (-delta ** 2 * zeta ** 2 * z2e2
                     + 2 * delta * zeta * eta * eps * z2e2
                     + eta ** 2 * (zeta ** 2 * k ** 2 + 2 * zeta ** 2 * k * m
                                   + zeta ** 2 * m ** 2 - eps ** 2 * z2e2)
                     - 2 * zeta * eta * l * (zeta ** 2 - eta ** 2) * (k + m)
                     + l ** 2 * (zeta ** 2 - eta ** 2) ** 2)
    radicand = zeta ** 2 * z2e2 * den ** 2 * inner_bracket
    if radicand < 0:
        return None
    root = math.sqrt(radicand)
    P = (delta * zeta ** 6 * eta * k + delta * zeta ** 4 * eta ** 3 * k
         - zeta ** 5 * eta ** 2 * k * eps - zeta ** 3 * eta ** 4 * k * eps
         - delta * zeta ** 7 * l + delta * zeta ** 3 * eta ** 4 * l
         + zeta ** 6 * eta * l * eps - zeta ** 2 * eta ** 5 * l * eps
         + delta * zeta ** 6 * eta * m + delta * zeta ** 4 * eta ** 3 * m
         - zeta ** 5 * eta ** 2 * m * eps - zeta ** 3 * eta ** 4 * m * eps)
    Q = (-delta * zeta ** 4 * eta ** 2 * k - delta * zeta ** 2 * eta ** 4 * k
         + zeta ** 3 * eta ** 3 * k * eps + zeta * eta ** 5 * k * eps
         + delta * zeta ** 5 * eta * l - delta * zeta * eta ** 5 * l
         - zeta ** 4 * eta ** 2 * l * eps + eta ** 6 * l * eps
         - delta * zeta ** 4 * eta ** 2 * m - delta * zeta ** 2 * eta ** 4 * m
         + zeta ** 3 * eta ** 3 * m * eps + zeta * eta ** 5 * m * eps)
    base = z2e2 * den ** 2
    p = (P + eta * root) / (zeta * base)
    q = (Q + root) / base
    r = (P - eta * root) / (zeta * base)
    s = (Q - root) / base
    return (p, q), (r, s)
