import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pwcycles.errors import DegenerateField, NotSlidingPoint, TooManyRoots
from pwcycles.fields import AffineField
from pwcycles.switching import (UNIT_CIRCLE, SigmaKind, SwitchingConic, TangencyKind,
                                classify_on_sigma, classify_point, lie_derivative,
                                sliding_field, tangency_points)
from pwcycles.system import PiecewiseSystem

R5 = math.sqrt(5)


def test_conic_angle_point_lies_on_curve():
    for conic in (UNIT_CIRCLE, SwitchingConic.ellipse(2, 1, 1), SwitchingConic(0.3, 5.0, 2.0)):
        phi = np.linspace(0, 2 * np.pi, 1001)
        x, y = conic.angle_point(phi)
        assert np.abs(conic(x, y)).max() < 1e-14 * max(1, conic.level)
        assert np.allclose(conic.angle_of(x[:-1], y[:-1]), phi[:-1], atol=1e-13)


def test_conic_validation():
    with pytest.raises(ValueError):
        SwitchingConic(0, 1, 1)
    with pytest.raises(ValueError):
        SwitchingConic(1, 1, -1)


def test_lie_derivative_examples():
    X = AffineField(2, 0, 0, -1, 0, 0)
    p = (-2 / R5, 1 / R5)
    assert lie_derivative(X, UNIT_CIRCLE, p) == pytest.approx(-2 * R5, abs=1e-12)
    Y = AffineField(2, -1, 2, -1, -4, 1)
    assert lie_derivative(Y, UNIT_CIRCLE, (2 / R5, -1 / R5)) == pytest.approx(0.4 + 2 * R5, abs=1e-12)
    assert lie_derivative(AffineField(0, 0, 0, 1, 0, 0), UNIT_CIRCLE, (1.0, 0.0)) == 0.0


def test_higher_lie_derivatives_match_finite_differences():
    F = AffineField(0.3, 1.2, -0.7, 0.4, 0.9, -0.2)
    p = np.array([0.6, -0.5])
    for k in (2, 3):
        # F^k h(p) = d/dt F^{k-1} h(p + t F(p)) at t = 0
        h = 1e-6
        fwd = lie_derivative(F, UNIT_CIRCLE, p + h * F.at(p), k - 1)
        bwd = lie_derivative(F, UNIT_CIRCLE, p - h * F.at(p), k - 1)
        assert lie_derivative(F, UNIT_CIRCLE, p, k) == pytest.approx((fwd - bwd) / (2 * h), rel=1e-7)
    with pytest.raises(ValueError):
        lie_derivative(F, UNIT_CIRCLE, p, 4)


def test_classification_table():
    # inner acts inside the circle, outer outside
    pt = (1.0, 0.0)
    out_x = AffineField(1, 0, 0, 0, 0, 0)
    in_x = AffineField(-1, 0, 0, 0, 0, 0)
    tangent = AffineField(0, 0, 0, 1, 0, 0)
    kinds = {
        (out_x, out_x): SigmaKind.CROSSING,
        (in_x, in_x): SigmaKind.CROSSING,
        (out_x, in_x): SigmaKind.SLIDING,      # both push onto the curve
        (in_x, out_x): SigmaKind.ESCAPE,       # both push away from it
        (tangent, out_x): SigmaKind.TANGENCY_INNER,
        (out_x, tangent): SigmaKind.TANGENCY_OUTER,
        (tangent, tangent): SigmaKind.TANGENCY_BOTH,
    }
    for (X, Y), kind in kinds.items():
        assert classify_point(PiecewiseSystem(X, Y), pt).kind is kind


def test_classification_of_one_cycle_points():
    Z = PiecewiseSystem(AffineField(2, 0, 0, -1, 0, 0), AffineField(2, -1, 2, -1, -4, 1))
    for phi in (math.atan2(1, -2), math.atan2(-1, 2)):
        assert classify_on_sigma(Z, phi).kind is SigmaKind.CROSSING


def test_tangency_points_constant_field():
    tps = tangency_points(AffineField(0, 0, 0, 1, 0, 0))
    assert [round(phi, 12) for phi, _ in tps] == [0.0, round(math.pi, 12)]
    assert all(t.order is TangencyKind.FOLD for _, t in tps)


def test_tangency_cusp():
    # Y = (2 - x + 2y, -1 - 4x + y) has a cubic contact at (0, 1)
    tps = dict(tangency_points(AffineField(2, -1, 2, -1, -4, 1)))
    cusp = [phi for phi, t in tps.items() if t.order is TangencyKind.CUSP]
    assert len(cusp) == 1 and cusp[0] == pytest.approx(math.pi / 2, abs=1e-9)


def test_tangency_errors():
    with pytest.raises(DegenerateField):
        tangency_points(AffineField())
    # rigid rotation is tangent to every circle about the origin
    with pytest.raises(TooManyRoots):
        tangency_points(AffineField(0, 0, -1, 0, 1, 0))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_tangency_points_are_roots(c):
    F = AffineField(*c)
    if F.is_zero():
        return
    try:
        tps = tangency_points(F)
    except TooManyRoots:
        return
    assert len(tps) <= 4
    for phi, _ in tps:
        p = UNIT_CIRCLE.angle_point(phi)
        assert abs(lie_derivative(F, UNIT_CIRCLE, p)) < 1e-8 * (1 + F.scale)


def test_sliding_field_is_tangent():
    X = AffineField(1, 0, 0, 0.3, 0, 0)
    Y = AffineField(-1, 0, 0, 0.5, 0, 0)
    Z = PiecewiseSystem(X, Y)
    zs = sliding_field(Z, 0.0)
    p = np.array(UNIT_CIRCLE.angle_point(0.0))
    assert abs(zs @ np.array(UNIT_CIRCLE.gradient(*p))) < 1e-14
    # the convex combination of (1, .3) and (-1, .5) with equal weights
    assert np.allclose(zs, [0.0, 0.4])
    # symmetric in the two fields
    assert np.allclose(sliding_field(PiecewiseSystem(Y, X), math.pi), sliding_field(Z, 0.0) * [-1, 1] * [-1, 1])


def test_sliding_field_rejects_crossing_points():
    Z = PiecewiseSystem(AffineField(1, 0, 0, 0, 0, 0), AffineField(1, 0, 0, 0, 0, 0))
    with pytest.raises(NotSlidingPoint):
        sliding_field(Z, 0.0)
