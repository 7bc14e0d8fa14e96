import math

import numpy as np
import pytest

from scalegeom import (
    Metric,
    Path,
    coord_transport,
    line_element,
    line_element_scaled,
    path_length,
    path_length_scaled,
    reference_change,
)
from scalegeom.fields import constant_field, linear_field, radial_field
from scalegeom import oracles


def test_line_elements():
    assert line_element(Metric.euclidean(2), (0.0, 0.0), (3.0, 4.0)) == 25.0
    assert line_element(Metric.minkowski(), (0, 0, 0, 0), (1.0, 1.0, 0.0, 0.0)) == 0.0
    assert line_element(Metric.constant(2 * np.eye(2)), (5.0, 5.0), (1.0, 0.0)) == 2.0


def test_scaled_line_element():
    g = Metric.euclidean(2)
    assert line_element_scaled(g, constant_field(1.5), (1.0, 1.0), (0.0, 0.0), (3.0, 4.0)) == 25.0
    f = linear_field(math.log(2), (1, 0))
    assert line_element_scaled(g, f, (1.0, 0.0), (0.0, 0.0), (3.0, 4.0)) == pytest.approx(50.0, rel=1e-15)
    assert line_element_scaled(g, f, (1.0, 0.0), (1.0, 0.0), (3.0, 4.0)) == 25.0


def test_unscaled_lengths():
    assert path_length(Path.segment((0, 0), (1, 0))).value == pytest.approx(1.0, rel=1e-14)
    half = Path.circle((0.0, 0.0), 1.0, turns=0.5)
    assert path_length(half).value == pytest.approx(math.pi, rel=1e-9)
    squared = Path(lambda s: np.stack([s**2, 0 * s], axis=1), lambda s: np.stack([2 * s, 0 * s], axis=1))
    assert path_length(squared).value == pytest.approx(1.0, rel=1e-12)


def test_scaled_lengths():
    p = Path.polyline([(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
    assert path_length_scaled(p, constant_field(0.0), (0.0, 0.0)).value == pytest.approx(
        path_length(p).value, rel=1e-14)
    seg = Path.segment((0.0, 0.0), (1.0, 0.0))
    got = path_length_scaled(seg, linear_field(1.0, (1, 0)), (0.0, 0.0)).value
    assert got == pytest.approx(oracles.linear_segment_length(1.0), rel=1e-10)
    assert got == pytest.approx(math.e - 1, rel=1e-10)


def test_full_radius_toward_black_hole_diverges():
    res = path_length_scaled(Path.segment((1.0, 0.0), (0.0, 0.0)), radial_field(1.0, (0, 0)), (1.0, 0.0))
    assert res.diverged and not res.finite


def test_reference_change_examples():
    f = linear_field(math.log(3), (1, 0))
    assert reference_change(2.5, f, (0.0, 0.0), (0.0, 0.0)) == 2.5
    assert reference_change(2.5, f, (1.0, 0.0), (0.0, 0.0)) == pytest.approx(7.5, rel=1e-15)


def test_reference_change_moves_only_the_external_factor():
    f = radial_field(-0.7, (0.0, 0.0))
    p = Path.segment((1.0, 0.5), (-0.5, 1.0))
    x, z = np.array([1.0, 0.5]), np.array([2.0, -3.0])
    at_x = path_length_scaled(p, f, x).value
    at_z = path_length_scaled(p, f, z).value
    assert at_z == pytest.approx(reference_change(at_x, f, x, z), rel=1e-12)


def test_coordinate_transport():
    np.testing.assert_array_equal(coord_transport((1.0, 2.0), (3.0, 0.0), (0.0, 0.0)), [1.0, 2.0])
    f = linear_field(math.log(2), (1, 0))
    np.testing.assert_array_equal(coord_transport((0.0, 0.0), (1.0, 0.0), (0.0, 0.0), f), [0.0, 0.0])
    np.testing.assert_allclose(coord_transport((1.0, 2.0), (1.0, 0.0), (0.0, 0.0), f), [2.0, 4.0], rtol=1e-15)
