"""Exact flows of affine fields and Filippov trajectories across the conic.

Each smooth piece is integrated in closed form (``x' = A x + b`` has an
explicit 2x2 matrix exponential), so the only numerical work left is
locating switching events and stepping along sliding segments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq, minimize_scalar

from .errors import EventLoopGuard, StallOnSigma
from .fields import AffineField
from .switching import (SigmaClassification, SigmaKind, SwitchingConic,
                        classify_lie, lie_derivative, tang_tol)

__all__ = [
    "FlowKind",
    "AffineFlow",
    "exact_flow",
    "next_switching_event",
    "ArcPiece",
    "Arc",
    "SwitchEvent",
    "FilippovTrajectory",
    "integrate_filippov",
]

MAX_EVENTS = 10_000
SIGMA_TOL = 1e-12


class FlowKind(enum.Enum):
    CONSTANT = "Constant"
    ROTATION = "Rotation"
    HYPERBOLIC = "Hyperbolic"
    SHEAR = "Shear"
    GENERAL = "General"


class AffineFlow:
    """Closed-form flow map of an affine field.

    ``AffineFlow(F)(p, t)`` accepts a scalar or an array of times and returns
    points with shape ``(2,)`` or ``(len(t), 2)``.
    """

    def __init__(self, field: AffineField):
        self.field = field
        self.A = field.matrix
        self.b = field.offset
        self.trace = float(np.trace(self.A))
        self.det = float(np.linalg.det(self.A)) if self.A.any() else 0.0
        if not self.A.any():
            self.kind = FlowKind.CONSTANT
        elif self.trace != 0.0:
            self.kind = FlowKind.GENERAL
        elif self.det > 0:
            self.kind = FlowKind.ROTATION
        elif self.det < 0:
            self.kind = FlowKind.HYPERBOLIC
        else:
            self.kind = FlowKind.SHEAR
        # spectral data: rotation frequency or hyperbolic rate for trace-zero parts
        self.rate = math.sqrt(abs(self.det)) if self.kind in (
            FlowKind.ROTATION, FlowKind.HYPERBOLIC) else 0.0
        # saddles: cosh/sinh cancel along the contracting direction, so well
        # conditioned saddles are advanced in eigen-coordinates instead
        self._eigen = None
        if self.kind is FlowKind.HYPERBOLIC and abs(self.det) >= 1e-6 * float(np.abs(self.A).sum()) ** 2:
            lam, V = np.linalg.eig(self.A)
            W = np.linalg.inv(V.real)
            self._eigen = (lam.real, V.real, W, W @ self.b)

    def _trace_free_coeffs(self, t):
        """(C, S, T) with exp(At) = C I + S A and int_0^t exp(As) ds = S I + T A."""
        # divide before squaring: w * w underflows for subnormal determinants
        if self.kind is FlowKind.ROTATION:
            w = self.rate
            return np.cos(w * t), np.sin(w * t) / w, 2.0 * (np.sin(0.5 * w * t) / w) ** 2
        if self.kind is FlowKind.HYPERBOLIC:
            m = self.rate
            with np.errstate(over="ignore", invalid="ignore"):
                return (np.cosh(m * t), np.sinh(m * t) / m,
                        2.0 * (np.sinh(0.5 * m * t) / m) ** 2)
        # shear (A nilpotent) and constant
        return np.ones_like(t), t, 0.5 * t * t

    def __call__(self, p, t):
        p = np.asarray(p, dtype=float)
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        A, b = self.A, self.b
        if self._eigen is not None:
            out = self._saddle(p, t_arr)
        elif self.kind is not FlowKind.GENERAL:
            C, S, T = self._trace_free_coeffs(t_arr)
            Ap, Ab = A @ p, A @ b
            out = (C[:, None] * p + S[:, None] * Ap
                   + S[:, None] * b + T[:, None] * Ab)
        else:
            out = self._augmented(p, t_arr)
        return out[0] if scalar else out

    def _saddle(self, p, t):
        # each coordinate solves c' = lam c + beta; expm1 avoids measuring
        # from a far-away equilibrium
        lam, V, W, beta = self._eigen
        lt = np.outer(t, lam)
        with np.errstate(over="ignore", invalid="ignore"):
            coords = np.exp(lt) * (W @ p) + np.expm1(lt) * (beta / lam)
        return coords @ V.T

    def _augmented(self, p, t):
        """Fields with nonzero trace: exponentiate the 3x3 augmented matrix
        ``[[A, b], [0, 0]]``, which never divides by ``det``."""
        M = np.zeros((3, 3))
        M[:2, :2] = self.A
        M[:2, 2] = self.b
        with np.errstate(over="ignore", invalid="ignore"):
            E = expm(t[:, None, None] * M)
        return E[:, :2, :2] @ p + E[:, :2, 2]

    def velocity(self, p, t):
        x = self(p, t)
        return x @ self.A.T + self.b


def exact_flow(field: AffineField, p, t):
    return AffineFlow(field)(p, t)


# --- switching events -------------------------------------------------------

def _step_size(flow: AffineFlow, x: np.ndarray, conic: SwitchingConic) -> float:
    r = min(conic.radii)
    speed = float(np.linalg.norm(flow.A @ x + flow.b))
    norm_a = float(np.abs(flow.A).sum())
    # move at most ~2% of the current distance scale per step
    reach = max(r, float(np.linalg.norm(x)))
    dt = 0.02 * reach / (speed + norm_a * r + 1e-300)
    if norm_a > 0:
        dt = min(dt, 0.05 / norm_a)
    return dt


def next_switching_event(field: AffineField, conic: SwitchingConic, p, t_max: float,
                         side: Optional[int] = None, flow: Optional[AffineFlow] = None
                         ) -> Optional[Tuple[float, float]]:
    """Earliest ``t in (0, t_max]`` at which the orbit of ``p`` meets the conic.

    ``side`` (+1 outside, -1 inside) overrides the side inferred from
    ``h(p)``; for ``p`` on the conic the side is taken from the direction of
    motion.  Returns ``(t, angle)`` or ``None``.
    """
    p = np.asarray(p, dtype=float)
    flow = flow or AffineFlow(field)
    hval = float(conic(*p))
    on_sigma = abs(hval) <= SIGMA_TOL * conic.level
    if side is None:
        if not on_sigma:
            side = 1 if hval > 0 else -1
        else:
            lie = float(lie_derivative(field, conic, p, 1))
            if abs(lie) < tang_tol(field):
                raise StallOnSigma("start point on the conic with tangential motion")
            side = 1 if lie > 0 else -1

    def hs(t):
        x = flow(p, t)
        return side * conic(x[..., 0], x[..., 1])

    t_prev = 0.0
    if on_sigma:
        # move off the curve: find a small time with the orbit on `side`
        dt0 = _step_size(flow, p, conic)
        t_try = dt0
        for _ in range(60):
            if hs(t_try) > 0:
                break
            t_try *= 0.5
        else:
            raise StallOnSigma("orbit does not leave the conic")
        t_prev = t_try
        if t_prev >= t_max:
            return None
        # the orbit may already have come back within the first step
        if hs(dt0) < 0 and dt0 > t_prev:
            t_star = brentq(hs, t_prev, dt0, xtol=1e-15, rtol=1e-15)
            return _polish(flow, conic, p, t_star)
    h_prev = float(hs(t_prev))
    if h_prev < 0:
        return _polish(flow, conic, p, t_prev) if abs(h_prev) <= SIGMA_TOL else None

    x_cur = flow(p, t_prev)
    far = 1e8 * (1.0 + conic.level + float(np.abs(flow.b).sum()) ** 2)
    while t_prev < t_max:
        dt = _step_size(flow, x_cur, conic)
        n = 64
        ts = t_prev + dt * np.arange(1, n + 1)
        ts = ts[ts < t_max]
        ts = np.append(ts, min(t_prev + dt * (n + 1), t_max))
        pts = flow(p, ts)
        if not np.all(np.isfinite(pts)):
            good = np.all(np.isfinite(pts), axis=1)
            if not good.any():
                return None
            ts, pts = ts[good], pts[good]
        hv = side * conic(pts[:, 0], pts[:, 1])
        all_t = np.concatenate(([t_prev], ts))
        all_h = np.concatenate(([h_prev], hv))
        neg = np.nonzero(all_h <= 0)[0]
        if neg.size:
            k = neg[0]
            t_star = brentq(hs, all_t[k - 1], all_t[k], xtol=1e-15, rtol=1e-15)
            return _polish(flow, conic, p, t_star)
        # grazing approach without sign change: check interior minima
        for k in range(1, all_h.size - 1):
            if all_h[k] <= all_h[k - 1] and all_h[k] <= all_h[k + 1]:
                res = minimize_scalar(lambda t: float(hs(t)), bounds=(all_t[k - 1], all_t[k + 1]),
                                      method="bounded", options={"xatol": 1e-14})
                if res.fun < 0:
                    t_star = brentq(hs, all_t[k - 1], res.x, xtol=1e-15, rtol=1e-15)
                    return _polish(flow, conic, p, t_star)
        t_prev, h_prev, x_cur = all_t[-1], all_h[-1], pts[-1]
        # far away and receding: an affine orbit this far out never comes back
        if h_prev > far and float(np.linalg.norm(flow.A @ x_cur + flow.b)) > 0:
            x_next = x_cur + 1e-6 * (flow.A @ x_cur + flow.b)
            if side * conic(x_next[0], x_next[1]) > h_prev:
                return None
    return None


def _polish(flow, conic, p, t):
    # Newton on h(flow(t)) to push |h| below 1e-12
    for _ in range(3):
        x = flow(p, t)
        hval = conic(x[0], x[1])
        if abs(hval) < 1e-15:
            break
        v = flow.A @ x + flow.b
        g = np.array(conic.gradient(x[0], x[1]))
        dh = float(g @ v)
        if dh == 0.0:
            break
        t_new = t - hval / dh
        if not np.isfinite(t_new) or t_new <= 0:
            break
        x_new = flow(p, t_new)
        if abs(conic(x_new[0], x_new[1])) >= abs(hval):
            break
        t = t_new
    x = flow(p, t)
    return float(t), float(conic.angle_of(x[0], x[1]))


# --- Filippov trajectories --------------------------------------------------

class ArcPiece(enum.Enum):
    INNER = "Inner"
    OUTER = "Outer"
    SLIDING = "Sliding"


@dataclass
class Arc:
    piece: ArcPiece
    t0: float
    t1: float
    start: np.ndarray
    end: np.ndarray
    times: np.ndarray
    samples: np.ndarray


@dataclass
class SwitchEvent:
    time: float
    angle: float
    classification: SigmaClassification
    # pieces that could equally continue the orbit (escape starts are not unique)
    alternatives: Tuple[str, ...] = ()


@dataclass
class FilippovTrajectory:
    arcs: List[Arc] = dc_field(default_factory=list)
    events: List[SwitchEvent] = dc_field(default_factory=list)
    stationary: bool = False

    @property
    def end_point(self) -> np.ndarray:
        return self.arcs[-1].end

    @property
    def end_time(self) -> float:
        return self.arcs[-1].t1

    def points(self) -> np.ndarray:
        return np.vstack([a.samples for a in self.arcs])


def _classify(system, p) -> SigmaClassification:
    xh = float(lie_derivative(system.inner, system.conic, p, 1))
    yh = float(lie_derivative(system.outer, system.conic, p, 1))
    kind = classify_lie(xh, yh, tang_tol(system.inner), tang_tol(system.outer))
    return SigmaClassification(kind, xh, yh)


def _piece_after(system, p, cls: SigmaClassification, arriving: Optional[ArcPiece]):
    """Which piece continues the orbit from a point of the conic."""
    kind = cls.kind
    if kind is SigmaKind.CROSSING:
        return ArcPiece.OUTER if cls.lie_inner > 0 else ArcPiece.INNER
    if kind in (SigmaKind.SLIDING, SigmaKind.ESCAPE):
        return ArcPiece.SLIDING
    conic = system.conic
    if kind is SigmaKind.TANGENCY_OUTER:
        if cls.lie_inner < 0:
            return ArcPiece.INNER
        # inner pushes out; the outer orbit grazes: visible fold leaves outward
        y2 = float(lie_derivative(system.outer, conic, p, 2))
        return ArcPiece.OUTER if y2 > 0 else ArcPiece.SLIDING
    if kind is SigmaKind.TANGENCY_INNER:
        if cls.lie_outer > 0:
            return ArcPiece.OUTER
        x2 = float(lie_derivative(system.inner, conic, p, 2))
        return ArcPiece.INNER if x2 < 0 else ArcPiece.SLIDING
    # both tangent: follow the piece whose second derivative leaves into its side
    x2 = float(lie_derivative(system.inner, conic, p, 2))
    y2 = float(lie_derivative(system.outer, conic, p, 2))
    if arriving is ArcPiece.INNER and y2 > 0:
        return ArcPiece.OUTER
    if arriving is ArcPiece.OUTER and x2 < 0:
        return ArcPiece.INNER
    if x2 < 0:
        return ArcPiece.INNER
    if y2 > 0:
        return ArcPiece.OUTER
    return None


def _sample_arc(flow, p, t0, t1, samples):
    taus = np.linspace(0.0, t1 - t0, max(int(samples), 2))
    return t0 + taus, flow(p, taus)


def _angle_rate(system, phi):
    """Angular speed of the sliding motion, or None outside the sliding set."""
    conic = system.conic
    p = np.array(conic.angle_point(phi))
    cls = _classify(system, p)
    if cls.kind not in (SigmaKind.SLIDING, SigmaKind.ESCAPE):
        return None, cls
    denom = cls.lie_outer - cls.lie_inner
    zs = (cls.lie_outer * system.inner.at(p) - cls.lie_inner * system.outer.at(p)) / denom
    tx, ty = conic.tangent(phi)
    return float((zs[0] * tx + zs[1] * ty) / (tx * tx + ty * ty)), cls


def _slide(system, phi0, t0, t_max, samples, step=1e-3):
    """RK4 on the angle ODE until the sliding condition fails or time runs out.

    Returns (times, angles, exit_angle_or_None, stationary).
    """
    times, angles = [t0], [phi0]
    phi, t = phi0, t0

    def rate(ph):
        r, _ = _angle_rate(system, ph)
        return r

    while t < t_max:
        r = rate(phi)
        if r is None:
            break
        speed = abs(r) * float(np.hypot(*system.conic.tangent(phi)))
        if speed < 1e-12:
            times.append(t_max)
            angles.append(phi)
            return np.array(times), np.array(angles), None, True
        # the time cap keeps RK4 stable while creeping up to a pseudo-equilibrium
        dt = min(step / abs(r), 0.02, t_max - t)
        k1 = r
        k2 = rate(phi + 0.5 * dt * k1)
        k3 = rate(phi + 0.5 * dt * k2) if k2 is not None else None
        k4 = rate(phi + dt * k3) if k3 is not None else None
        if k4 is None:
            # the sliding set ends inside this step: locate its boundary
            exit_phi = _sliding_boundary(system, phi, phi + dt * k1)
            frac = (exit_phi - phi) / (dt * k1)
            times.append(t + frac * dt)
            angles.append(exit_phi)
            return np.array(times), np.array(angles), exit_phi, False
        phi_new = phi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        r_new = rate(phi_new)
        if r_new is None:
            exit_phi = _sliding_boundary(system, phi, phi_new)
            frac = (exit_phi - phi) / (phi_new - phi)
            times.append(t + frac * dt)
            angles.append(exit_phi)
            return np.array(times), np.array(angles), exit_phi, False
        if r_new * r < 0:
            # the step jumped over a pseudo-equilibrium: the sliding motion
            # settles there (only attracting ones can be approached forward)
            rest = brentq(rate, phi, phi_new, xtol=1e-14)
            times.append(t_max)
            angles.append(rest)
            return np.array(times), np.array(angles), None, True
        phi, t = phi_new, t + dt
        times.append(t)
        angles.append(phi)
    return np.array(times), np.array(angles), None, False


def _sliding_boundary(system, phi_in, phi_out):
    conic = system.conic

    def lies(ph):
        p = conic.angle_point(ph)
        return (float(lie_derivative(system.inner, conic, p, 1)),
                float(lie_derivative(system.outer, conic, p, 1)))

    xa, ya = lies(phi_in)
    xb, yb = lies(phi_out)
    if xa * xb <= 0:
        return brentq(lambda ph: lies(ph)[0], phi_in, phi_out, xtol=1e-14)
    if ya * yb <= 0:
        return brentq(lambda ph: lies(ph)[1], phi_in, phi_out, xtol=1e-14)
    return phi_out


def integrate_filippov(system, p0, t_max: float, mode: str = "forward",
                       samples: int = 512, max_events: Optional[int] = None
                       ) -> FilippovTrajectory:
    """Filippov trajectory of ``system`` from ``p0`` over ``[0, t_max]``.

    ``mode="backward"`` integrates the time-reversed system; times are then
    elapsed backward time.  ``max_events`` stops after that many switching
    events, not counting a start on the conic (used to follow a fixed
    number of returns).
    """
    if mode not in ("forward", "backward"):
        raise ValueError("mode must be 'forward' or 'backward'")
    sys_ = system if mode == "forward" else system.reversed()
    conic = sys_.conic
    flows = {ArcPiece.INNER: AffineFlow(sys_.inner), ArcPiece.OUTER: AffineFlow(sys_.outer)}
    traj = FilippovTrajectory()
    p = np.asarray(p0, dtype=float)
    t = 0.0

    hval = float(conic(*p))
    if abs(hval) > SIGMA_TOL * conic.level:
        piece = ArcPiece.INNER if hval < 0 else ArcPiece.OUTER
    else:
        p = np.array(conic.angle_point(conic.angle_of(*p)))
        cls = _classify(sys_, p)
        piece = _piece_after(sys_, p, cls, None)
        alternatives = ("Inner", "Outer") if cls.kind is SigmaKind.ESCAPE else ()
        traj.events.append(SwitchEvent(0.0, float(conic.angle_of(*p)), cls, alternatives))
        if piece is None:
            traj.stationary = True
            traj.arcs.append(Arc(ArcPiece.SLIDING, 0.0, t_max, p, p,
                                 np.array([0.0, t_max]), np.vstack([p, p])))
            return traj

    initial_events = len(traj.events)
    while t < t_max:
        if len(traj.events) > MAX_EVENTS:
            raise EventLoopGuard(f"more than {MAX_EVENTS} switching events")
        if max_events is not None and len(traj.events) - initial_events >= max_events:
            break
        if piece in (ArcPiece.INNER, ArcPiece.OUTER):
            flow = flows[piece]
            field = flow.field
            side = -1 if piece is ArcPiece.INNER else 1
            if np.linalg.norm(field.at(p)) < 1e-12:
                traj.stationary = True
                ts, pts = np.array([t, t_max]), np.vstack([p, p])
                traj.arcs.append(Arc(piece, t, t_max, p, p, ts, pts))
                break
            on_sigma = abs(float(conic(*p))) <= SIGMA_TOL * conic.level
            event = next_switching_event(field, conic, p, t_max - t,
                                         side=side if on_sigma else None, flow=flow)
            if event is None:
                ts, pts = _sample_arc(flow, p, t, t_max, samples)
                traj.arcs.append(Arc(piece, t, t_max, p, pts[-1], ts, pts))
                break
            dt, angle = event
            ts, pts = _sample_arc(flow, p, t, t + dt, samples)
            q = np.array(conic.angle_point(angle))
            pts[-1] = q
            traj.arcs.append(Arc(piece, t, t + dt, p, q, ts, pts))
            t += dt
            cls = _classify(sys_, q)
            traj.events.append(SwitchEvent(t, angle, cls))
            nxt = _piece_after(sys_, q, cls, piece)
            if nxt is None:
                traj.stationary = True
                break
            piece, p = nxt, q
        else:
            phi0 = float(conic.angle_of(*p))
            ts, phis, exit_phi, stationary = _slide(sys_, phi0, t, t_max, samples)
            pts = np.column_stack(conic.angle_point(phis))
            q = pts[-1]
            traj.arcs.append(Arc(ArcPiece.SLIDING, t, float(ts[-1]), p, q, ts, pts))
            t = float(ts[-1])
            if stationary:
                traj.stationary = True
                break
            if exit_phi is None:
                break
            cls = _classify(sys_, q)
            traj.events.append(SwitchEvent(t, float(np.mod(exit_phi, 2 * np.pi)), cls))
            nxt = _exit_piece(sys_, q, cls)
            if nxt is None:
                traj.stationary = True
                break
            piece, p = nxt, q
    return traj


def _exit_piece(system, q, cls: SigmaClassification):
    """Continuation when a sliding segment reaches a tangency."""
    if cls.kind is SigmaKind.CROSSING:
        return ArcPiece.OUTER if cls.lie_inner > 0 else ArcPiece.INNER
    tol_in, tol_out = tang_tol(system.inner), tang_tol(system.outer)
    if abs(cls.lie_inner) < tol_in and cls.lie_outer < 0:
        # inner field turns inward at the fold
        return ArcPiece.INNER
    if abs(cls.lie_outer) < tol_out and cls.lie_inner > 0:
        return ArcPiece.OUTER
    if abs(cls.lie_inner) < tol_in and cls.lie_outer > 0:
        return ArcPiece.OUTER
    if abs(cls.lie_outer) < tol_out and cls.lie_inner < 0:
        return ArcPiece.INNER
    return None
