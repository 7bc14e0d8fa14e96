import math

import pytest

from scalegeom import HoleProfile, hole_curve, hole_scaled_distance, outward_scaled_distance, scaled_speed
from scalegeom.errors import DomainError
from scalegeom.quadrature import QuadratureOptions
from scalegeom import oracles

WHITE_ORACLE = 0.40365263767680576
BLACK_085_ORACLE = 10.67686326952991


def test_oracle_constants_are_reproduced_by_the_midpoint_rule():
    assert oracles.hole_midpoint(-1.0, 1.0, 1.0) == pytest.approx(WHITE_ORACLE, rel=1e-9)
    assert oracles.hole_midpoint(1.0, 1.0, 0.85) == pytest.approx(BLACK_085_ORACLE, rel=1e-9)


def test_empty_distance():
    assert hole_scaled_distance(HoleProfile(1.0), 0.0).value == 0.0


def test_white_hole_to_the_center():
    res = hole_scaled_distance(HoleProfile(-1.0), 1.0)
    assert res.value == pytest.approx(WHITE_ORACLE, rel=1e-10)
    assert round(res.value, 1) == 0.4


def test_black_hole_at_85_percent():
    res = hole_scaled_distance(HoleProfile(1.0), 0.85)
    assert res.value == pytest.approx(BLACK_085_ORACLE, rel=1e-10)
    assert 12 * 0.8 <= res.value / 0.85 <= 12 * 1.2


def test_black_hole_diverges_near_the_center():
    near = hole_scaled_distance(HoleProfile(1.0), 0.999)
    assert near.diverged or near.value > 1e6
    assert hole_scaled_distance(HoleProfile(1.0), 1.0).diverged


def test_scaling_with_reference_radius():
    # the integral depends on K and r only through K/r, times r
    a = hole_scaled_distance(HoleProfile(2.0, 2.0), 0.6).value
    b = hole_scaled_distance(HoleProfile(1.0, 1.0), 0.6).value
    assert a == pytest.approx(2 * b, rel=1e-10)


def test_curve_shape():
    rows = hole_curve(HoleProfile(1.0), 2).rows
    assert [r[0] for r in rows] == [0.0, 0.99]
    white = hole_curve(HoleProfile(-2.0, 2.0), 50)
    assert white.column("unscaled") == pytest.approx([2.0 * w for w in white.column("w")])
    assert white.rows[-1][2] == pytest.approx(2 * WHITE_ORACLE, rel=1e-9)


def test_curve_is_monotone_and_diverges():
    col = hole_curve(HoleProfile(1.0), 200).column("scaled")
    finite = [v for v in col if math.isfinite(v)]
    assert all(b > a for a, b in zip(finite, finite[1:]))
    assert math.isinf(col[-1])
    white = hole_curve(HoleProfile(-1.0), 200).column("scaled")
    assert all(b >= a for a, b in zip(white, white[1:]))


def test_speed():
    assert scaled_speed(HoleProfile(1.0), 0.0) == 1.0
    assert scaled_speed(HoleProfile(1.0), 0.5) == pytest.approx(math.e, rel=1e-15)
    assert scaled_speed(HoleProfile(-1.0), 0.999) < 1e-300 or scaled_speed(HoleProfile(-1.0), 0.999) == 0.0
    with pytest.raises(DomainError):
        scaled_speed(HoleProfile(1.0), 1.0)


def test_outward_distance():
    assert outward_scaled_distance(HoleProfile(1.0), 0.0).value == 0.0
    # exp(K/(r+u) - K/r) < 1 for u > 0 with K > 0
    assert outward_scaled_distance(HoleProfile(1.0), 3.0).value < 3.0
    assert outward_scaled_distance(HoleProfile(-1.0), 3.0).value > 3.0


def test_divergence_threshold_is_configurable():
    h = HoleProfile(1.0)
    assert hole_scaled_distance(h, 0.95, QuadratureOptions(divergence_threshold=100.0)).diverged
    assert not hole_scaled_distance(h, 0.95).diverged


def test_invalid_arguments():
    with pytest.raises(DomainError):
        hole_scaled_distance(HoleProfile(1.0), 1.5)
    with pytest.raises(ValueError):
        HoleProfile(1.0, 0.0)
