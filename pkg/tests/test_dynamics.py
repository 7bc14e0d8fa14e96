import math

import numpy as np
import pytest

from scalegeom import (
    DimensionError,
    Grid1D,
    LagrangianSpec,
    Path,
    covariant_time_derivative,
    scaled_action,
    scaled_derivative,
    wavepacket_rescale,
)
from scalegeom.fields import VectorField, constant_field, linear_field
from scalegeom import oracles


def const_A(a, dim=1):
    return VectorField(lambda p: np.full(p.shape, float(a)), dim=dim)


def test_derivative_of_constant_is_zero():
    g = Grid1D.sample(lambda x: np.full(x.shape, 3.0 + 0j), 0.0, 0.1, 20)
    np.testing.assert_allclose(scaled_derivative(g, const_A(0.0)).values, 0.0, atol=1e-12)


def test_plane_wave_derivative():
    k = 2.0
    errors = []
    for n in (100, 200):
        dx = 2 * math.pi / (n - 1)
        g = Grid1D.sample(lambda x: np.exp(1j * k * x), 0.0, dx, n)
        d = scaled_derivative(g, const_A(0.0)).values
        errors.append(np.max(np.abs(d[1:-1] - 1j * k * g.values[1:-1])))
    assert errors[1] < errors[0] / 3.5


def test_covariantly_constant_packet():
    a = 0.8
    g = Grid1D.sample(lambda x: np.exp(-a * x), -1.0, 0.01, 201)
    assert np.max(np.abs(scaled_derivative(g, const_A(a)).values)) < 1e-3


def test_short_grids_are_rejected():
    with pytest.raises(DimensionError):
        scaled_derivative(Grid1D(0.0, 0.1, [1.0, 2.0]), const_A(0.0))


def test_covariant_time_derivative():
    p = Path.segment((0.0, 0.0), (2.0, 1.0))
    np.testing.assert_allclose(covariant_time_derivative(p, const_A(0.0, 2), 0.3), [2.0, 1.0])
    still = Path.segment((1.5, -2.0), (1.5, -2.0))
    np.testing.assert_allclose(covariant_time_derivative(still, const_A(0.5, 2), 0.7), [0.75, -1.0])


def test_free_action_reduces():
    v, T, m = 1.7, 2.0, 3.0
    # the path runs over t in [0, 1]; the speed in t is v*T over an interval of length 1
    gamma = Path.segment((0.0, 0.0), (v * T, 0.0))
    got = scaled_action(gamma, LagrangianSpec.free(m), constant_field(0.0), (0.0, 0.0), 0.0, 1.0)
    assert got == pytest.approx(oracles.free_action(m, v * T, 1.0), rel=1e-12)


def test_action_scales_with_field():
    gamma = Path.segment((0.0, 0.0), (1.0, 0.0))
    f = linear_field(1.0, (1, 0))
    got = scaled_action(gamma, LagrangianSpec.free(2.0), f, (0.0, 0.0), 0.0, 1.0)
    assert got == pytest.approx(math.e - 1, rel=1e-10)


def test_potential_lagrangian():
    L = LagrangianSpec(1.0, potential=lambda x: np.sum(x * x, axis=-1))
    assert L.kind == "potential"
    assert L(np.array([[1.0, 0.0]]), np.array([[2.0, 0.0]]))[0] == pytest.approx(1.0)


def test_rescale():
    g = Grid1D.sample(lambda x: np.exp(-x**2) + 0j, -2.0, 0.1, 41)
    same = wavepacket_rescale(g, constant_field(0.4), (0.0,))
    np.testing.assert_array_equal(same.values, g.values)
    f = linear_field(1e-15, (1,))
    np.testing.assert_allclose(wavepacket_rescale(g, f, (0.0,)).values, g.values, rtol=1e-12)


def test_rescale_by_two():
    from scalegeom.fields import ScalarField
    f = ScalarField(lambda p: np.where(p[:, 0] == 100.0, 0.0, math.log(2)), dim=1)
    g = Grid1D.sample(lambda x: 1.0 + x, 0.0, 0.5, 5)
    np.testing.assert_allclose(wavepacket_rescale(g, f, (100.0,)).values, 2 * g.values, rtol=1e-15)
