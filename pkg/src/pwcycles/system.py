"""The piecewise system: inner field, outer field and switching conic."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .fields import AffineField, SingularityKind, classify_singularity
from .switching import UNIT_CIRCLE, SwitchingConic

__all__ = ["ClassTag", "PiecewiseSystem", "infer_class", "CLASS_BOUNDS"]


class ClassTag(enum.Enum):
    CONSTANT_CENTER = "ConstantCenter"
    CONSTANT_SADDLE = "ConstantSaddle"
    SADDLE_CENTER = "SaddleCenter"
    CENTER_SADDLE = "CenterSaddle"
    SADDLE_SADDLE = "SaddleSaddle"
    OTHER = "Other"


# maximum number of crossing cycles meeting the conic in two points
CLASS_BOUNDS = {
    ClassTag.CONSTANT_CENTER: 1,
    ClassTag.CONSTANT_SADDLE: 1,
    ClassTag.SADDLE_CENTER: 2,
    ClassTag.CENTER_SADDLE: 2,
    ClassTag.SADDLE_SADDLE: 2,
    ClassTag.OTHER: 2,
}


def _piece_type(f: AffineField) -> str:
    if f.is_constant():
        return "constant" if not f.is_zero() else "zero"
    kind = classify_singularity(f).kind
    if f.e1 + f.f2 != 0.0:
        return "other"
    if kind is SingularityKind.CENTER:
        return "center"
    if kind is SingularityKind.SADDLE:
        return "saddle"
    return "other"


def infer_class(inner: AffineField, outer: AffineField) -> ClassTag:
    table = {
        ("constant", "center"): ClassTag.CONSTANT_CENTER,
        ("constant", "saddle"): ClassTag.CONSTANT_SADDLE,
        ("saddle", "center"): ClassTag.SADDLE_CENTER,
        ("center", "saddle"): ClassTag.CENTER_SADDLE,
        ("saddle", "saddle"): ClassTag.SADDLE_SADDLE,
    }
    return table.get((_piece_type(inner), _piece_type(outer)), ClassTag.OTHER)


@dataclass(frozen=True)
class PiecewiseSystem:
    """``inner`` acts on ``h <= 0``, ``outer`` on ``h >= 0``.

    ``class_tag`` is inferred from the two pieces when omitted; an explicit
    tag that disagrees with the pieces is rejected.
    """

    inner: AffineField
    outer: AffineField
    conic: SwitchingConic = UNIT_CIRCLE
    class_tag: Optional[ClassTag] = dc_field(default=None)

    def __post_init__(self):
        inferred = infer_class(self.inner, self.outer)
        if self.class_tag is None:
            object.__setattr__(self, "class_tag", inferred)
        elif self.class_tag is not inferred:
            raise ValueError(
                f"class tag {self.class_tag.value} inconsistent with pieces "
                f"(they form {inferred.value})")

    @property
    def is_integrable(self) -> bool:
        """Both pieces are divergence-free, so both have quadratic first integrals."""
        return (self.inner.e1 + self.inner.f2 == 0.0
                and self.outer.e1 + self.outer.f2 == 0.0)

    @property
    def bound(self) -> int:
        return CLASS_BOUNDS[self.class_tag]

    def reversed(self) -> "PiecewiseSystem":
        """Time reversal: both fields negated."""
        return PiecewiseSystem(-self.inner, -self.outer, self.conic)

    def rotated(self, angle: float) -> "PiecewiseSystem":
        if not self.conic.is_circle:
            raise ValueError("rotation equivariance only holds for circles")
        return PiecewiseSystem(self.inner.rotated(angle), self.outer.rotated(angle),
                               self.conic)

    def field_at(self, x, y):
        """Evaluate the piece owning ``(x, y)`` (inner on the curve itself)."""
        piece = self.inner if self.conic(x, y) <= 0 else self.outer
        return piece.at((x, y))
