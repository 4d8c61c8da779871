"""Affine planar vector fields and their quadratic first integrals.

An affine field is stored as six coefficients::

    F(x, y) = (e0 + e1*x + e2*y,  f0 + f1*x + f2*y)

When ``e1 + f2 == 0`` the field is Hamiltonian with respect to a quadratic
polynomial ``H`` (``F = (H_y, -H_x)``), which is what makes the closing
equations of crossing cycles algebraic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NotDivergenceFree

__all__ = [
    "AffineField",
    "SingularityKind",
    "SingularityReport",
    "QuadraticIntegral",
    "divergence",
    "classify_singularity",
    "first_integral",
    "eval_integral",
    "grad_integral",
]

# relative tolerance used to decide "trace == 0" / "det == 0"
_CLASS_TOL = 1e-12


@dataclass(frozen=True)
class AffineField:
    e0: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    f0: float = 0.0
    f1: float = 0.0
    f2: float = 0.0

    def __post_init__(self):
        for name in ("e0", "e1", "e2", "f0", "f1", "f2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"coefficient {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def divergence_free(cls, e0, e1, e2, f0, f1):
        """Build a field with ``f2 := -e1`` so the divergence is exactly zero."""
        return cls(e0, e1, e2, f0, f1, -float(e1))

    @classmethod
    def from_coeffs(cls, coeffs):
        values = [float(c) for c in coeffs]
        if len(values) != 6:
            raise ValueError(f"an affine field needs 6 coefficients, got {len(values)}")
        return cls(*values)

    @property
    def coeffs(self) -> Tuple[float, ...]:
        return (self.e0, self.e1, self.e2, self.f0, self.f1, self.f2)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.e1, self.e2], [self.f1, self.f2]])

    @property
    def offset(self) -> np.ndarray:
        return np.array([self.e0, self.f0])

    @property
    def scale(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_constant(self) -> bool:
        return self.e1 == 0 and self.e2 == 0 and self.f1 == 0 and self.f2 == 0

    def is_divergence_free(self, tol: float = 0.0) -> bool:
        return abs(self.e1 + self.f2) <= tol * (1.0 + self.scale)

    def __call__(self, x, y):
        """Evaluate the field; ``x`` and ``y`` may be arrays."""
        return (self.e0 + self.e1 * x + self.e2 * y,
                self.f0 + self.f1 * x + self.f2 * y)

    def at(self, point) -> np.ndarray:
        return np.array(self(point[0], point[1]), dtype=float)

    def __add__(self, other: "AffineField") -> "AffineField":
        return AffineField(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "AffineField":
        return AffineField(*(-c for c in self.coeffs))

    def scaled(self, factor: float) -> "AffineField":
        return AffineField(*(factor * c for c in self.coeffs))

    def rotated(self, angle: float) -> "AffineField":
        """Conjugate by the rotation ``R(angle)``: returns ``R F(R^-1 x)``."""
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        a = rot @ self.matrix @ rot.T
        b = rot @ self.offset
        # the trace is invariant; keep it exact so zero divergence survives rounding
        f2 = a[1, 1] if divergence(self) != 0.0 else -a[0, 0]
        return AffineField(b[0], a[0, 0], a[0, 1], b[1], a[1, 0], f2)


def divergence(field: AffineField) -> float:
    return field.e1 + field.f2


class SingularityKind(enum.Enum):
    NO_SINGULARITY = "NoSingularity"
    CENTER = "Center"
    SADDLE = "Saddle"
    DEGENERATE_LINE = "DegenerateLine"
    DEGENERATE_PLANE = "DegeneratePlane"
    # isolated equilibrium of a field with nonzero divergence (node or focus,
    # or a dissipative saddle); outside every class handled by the solver
    OTHER = "Other"


@dataclass(frozen=True)
class SingularityReport:
    kind: SingularityKind
    location: Optional[Tuple[float, float]] = None


def classify_singularity(field: AffineField) -> SingularityReport:
    """Type the (unique, if any) equilibrium of an affine field."""
    a = field.matrix
    b = field.offset
    if not a.any():
        if not b.any():
            return SingularityReport(SingularityKind.DEGENERATE_PLANE)
        return SingularityReport(SingularityKind.NO_SINGULARITY)

    scale = float(np.abs(a).max())
    tr = float(np.trace(a))
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det) <= _CLASS_TOL * scale * scale:
        # rank-one linear part: a line of equilibria or none at all
        location = None
        sol, _, _, _ = np.linalg.lstsq(a, -b, rcond=None)
        with np.errstate(all="ignore"):
            resid = np.linalg.norm(a @ sol + b)
        if np.all(np.isfinite(sol)) and resid <= 1e-12 * (1.0 + field.scale):
            location = (float(sol[0]), float(sol[1]))
        return SingularityReport(SingularityKind.DEGENERATE_LINE, location)

    # Cramer's rule is exact enough for 2x2 and keeps the fixed-point residual tiny
    x = (-b[0] * a[1, 1] + b[1] * a[0, 1]) / det
    y = (-b[1] * a[0, 0] + b[0] * a[1, 0]) / det
    location = (float(x) + 0.0, float(y) + 0.0)  # no signed zeros
    if abs(tr) <= _CLASS_TOL * scale:
        kind = SingularityKind.CENTER if det > 0 else SingularityKind.SADDLE
    else:
        kind = SingularityKind.OTHER
    return SingularityReport(kind, location)


@dataclass(frozen=True)
class QuadraticIntegral:
    """``H(x, y) = c10 x + c01 y + c11 xy + c20 x^2 + c02 y^2``."""

    c10: float = 0.0
    c01: float = 0.0
    c11: float = 0.0
    c20: float = 0.0
    c02: float = 0.0

    @property
    def coeffs(self) -> Tuple[float, ...]:
        return (self.c10, self.c01, self.c11, self.c20, self.c02)

    def __call__(self, x, y):
        return (self.c10 * x + self.c01 * y + self.c11 * x * y
                + self.c20 * x * x + self.c02 * y * y)

    def gradient(self, x, y):
        return (self.c10 + self.c11 * y + 2.0 * self.c20 * x,
                self.c01 + self.c11 * x + 2.0 * self.c02 * y)

    def __add__(self, other: "QuadraticIntegral") -> "QuadraticIntegral":
        return QuadraticIntegral(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __str__(self):
        terms = []
        for coef, mono in zip(self.coeffs, ("x", "y", "x*y", "x^2", "y^2")):
            if coef != 0:
                terms.append(f"{coef:+.12g}*{mono}")
        return " ".join(terms) if terms else "0"


def first_integral(field: AffineField) -> QuadraticIntegral:
    """Quadratic first integral of a divergence-free affine field.

    Normalised so that the ``x^2`` coefficient is ``-f1/2``; with that choice
    ``F = (dH/dy, -dH/dx)``.

    Raises
    ------
    NotDivergenceFree
        If ``e1 + f2 != 0``.
    """
    if divergence(field) != 0.0:
        raise NotDivergenceFree(
            f"divergence {divergence(field):.3g} != 0; no quadratic first integral")
    return QuadraticIntegral(
        c10=-field.f0,
        c01=field.e0,
        c11=field.e1,
        c20=-field.f1 / 2.0,
        c02=field.e2 / 2.0,
    )


def eval_integral(integral: QuadraticIntegral, point) -> float:
    return float(integral(point[0], point[1]))


def grad_integral(integral: QuadraticIntegral, point) -> np.ndarray:
    return np.array(integral.gradient(point[0], point[1]), dtype=float)
