import math

import numpy as np
import pytest

from scalegeom import (
    DomainError,
    FieldCatalogEntry,
    Path,
    grad_theta,
    make_field,
    scale_factor_gradient,
    scale_factor_neighbor,
    scale_factor_path,
)
from scalegeom.fields import (
    VectorField,
    constant_field,
    cosmological_field,
    linear_field,
    radial_field,
    rotational_field,
)
from scalegeom import oracles


def test_gradients():
    np.testing.assert_array_equal(grad_theta(constant_field(3.0), (1.0, 2.0)), [0.0, 0.0])
    np.testing.assert_allclose(grad_theta(linear_field(2.0, (1, 0, 0)), (5.0, -1.0, 2.0)), [2.0, 0.0, 0.0])
    g = grad_theta(radial_field(1.0, (0, 0)), (2.0, 0.0))
    np.testing.assert_allclose(g, [-0.25, 0.0], rtol=1e-15)


def test_analytic_gradient_matches_finite_differences():
    f = radial_field(1.3, (0.2, -0.1, 0.4))
    pts = np.random.default_rng(5).uniform(-2, 2, (50, 3))
    np.testing.assert_allclose(f.gradient(pts), f.fd_gradient(pts), rtol=1e-6, atol=1e-8)


def test_neighbor_factor():
    zero = VectorField.from_scalar(constant_field(0.0))
    assert scale_factor_neighbor(zero, (1.0, 1.0), (1.0, 0.0), 0.3) == 1.0
    one = VectorField.from_scalar(linear_field(1.0, (1, 0)))
    assert scale_factor_neighbor(one, (0.0, 0.0), (1.0, 0.0), 1.0) == pytest.approx(math.e, rel=1e-15)
    half = VectorField.from_scalar(linear_field(-0.5, (0, 1)))
    assert scale_factor_neighbor(half, (0.0, 0.0), (0.0, 1.0), 2.0) == pytest.approx(math.exp(-1), rel=1e-15)
    with pytest.raises(ValueError):
        scale_factor_neighbor(one, (0.0, 0.0), (1.0, 1.0), 1.0)


def test_path_factor_of_gradient_field():
    f = linear_field(0.7, (0.6, 0.8))
    x, y = np.array([0.0, 1.0]), np.array([2.0, -1.5])
    assert scale_factor_path(f, Path.segment(x, y)) == pytest.approx(scale_factor_gradient(f, y, x), rel=1e-12)
    assert scale_factor_path(constant_field(4.0), Path.circle((0, 0), 2.0)) == pytest.approx(1.0, abs=1e-14)


def test_rotational_loop_against_green():
    loop = scale_factor_path(rotational_field(1.0), Path.circle((0.0, 0.0), 1.0))
    assert loop == pytest.approx(oracles.rotational_loop_factor(1.0), rel=1e-10)
    assert loop == pytest.approx(oracles.rotational_loop_riemann(1.0), rel=1e-10)


def test_gradient_factor_examples():
    assert scale_factor_gradient(constant_field(2.0), (0.0,), (5.0,)) == 1.0
    f = radial_field(1.0, (0.0, 0.0))
    assert scale_factor_gradient(f, (0.5, 0.0), (1.0, 0.0)) == pytest.approx(math.e, rel=1e-15)


def test_catalog_examples():
    cosmo = make_field(FieldCatalogEntry("cosmological", alpha=2.0, t_now=14e9))
    assert cosmo((14e9,)) == 0.0
    assert cosmo((7e9,)) == pytest.approx(2 * math.log(0.5), rel=1e-15)
    assert make_field(FieldCatalogEntry("radial", K=1.0, center=(0, 0, 0)))((0.0, 1.0, 0.0)) == 1.0
    assert make_field(FieldCatalogEntry("cosmo", alpha=1.0, t_now=2.0))((1.0,)) == pytest.approx(math.log(0.5))


def test_catalog_rejects_bad_parameters():
    with pytest.raises(ValueError):
        FieldCatalogEntry("spiral")
    with pytest.raises(ValueError):
        FieldCatalogEntry("cosmological", alpha=2.0, t_now=0.0)
    with pytest.raises(ValueError):
        FieldCatalogEntry("linear", kappa=1.0, direction=(0.0, 0.0))


def test_singularities_raise_instead_of_returning_infinity():
    f = radial_field(1.0, (1.0, 1.0))
    with pytest.raises(DomainError):
        f((1.0, 1.0))
    with pytest.raises(DomainError):
        f.gradient((1.0, 1.0 + 1e-13))
    with pytest.raises(DomainError):
        cosmological_field(2.0, 14e9)((0.0,))
