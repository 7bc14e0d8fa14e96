import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from scalegeom import (
    ConvergenceError,
    DiscretePath,
    DomainError,
    OptimizerOptions,
    Path,
    discrete_scaled_length,
    distance_scaled,
    el_residual,
    minimize_scaled_length,
    path_length_scaled,
)
from scalegeom.fields import constant_field, linear_field, radial_field
from scalegeom.geodesics import discrete_scaled_length_gradient
from scalegeom import oracles

BLACK = radial_field(1.0, (0.0, 0.0))
X, Y = np.array([1.0, 0.0]), np.array([-1.0, 0.0])


def perturbation(n, modes, rng, scale):
    s = np.arange(n + 1) / n
    bump = sum(rng.normal() * np.sin(k * np.pi * s) / k for k in range(1, modes + 1))
    bump[0] = bump[-1] = 0.0
    return scale * bump


def test_discrete_length_examples():
    dp = DiscretePath.chord((0.0, 0.0), (1.0, 0.0), 8)
    assert discrete_scaled_length(dp, constant_field(0.0), (0.0, 0.0)) == pytest.approx(1.0, rel=1e-15)
    # midpoints at x1 = 0.5 and 1.5 give theta = 0 and ln 2
    f = linear_field(math.log(2), (1, 0))
    two = DiscretePath([(-0.5, 0.0), (0.5, 0.0), (1.5, 0.0)])
    assert discrete_scaled_length(two, f, (0.0, 0.0)) == pytest.approx(3.0, rel=1e-15)


def test_discrete_length_refines_at_second_order():
    f = radial_field(-0.6, (0.0, 1.5))
    circle = Path.circle((0.3, 0.0), 1.0, turns=0.5)
    exact = path_length_scaled(circle, f, (0.0, 0.0)).value
    errors = []
    for n in (16, 32, 64):
        nodes = circle(np.arange(n + 1) / n)
        errors.append(abs(discrete_scaled_length(DiscretePath(nodes), f, (0.0, 0.0)) - exact))
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert orders == pytest.approx([2.0, 2.0], abs=0.1)


def test_path_invariants():
    with pytest.raises(ValueError):
        DiscretePath([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])
    dp = DiscretePath.chord((0.0, 0.0), (1.0, 1.0), 4)
    with pytest.raises(ValueError):
        dp.nodes[1, 0] = 3.0
    with pytest.raises(ValueError):
        OptimizerOptions(nodes=3)


def test_analytic_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    f = radial_field(0.8, (0.0, -1.0))
    nodes = DiscretePath.chord((1.0, 0.0), (-1.0, 0.5), 12).nodes.copy()
    nodes[1:-1] += 0.05 * rng.normal(size=nodes[1:-1].shape)
    dp = DiscretePath(nodes)
    grad = discrete_scaled_length_gradient(dp, f, nodes[0])
    h = 1e-6
    for k in range(1, 12):
        for i in range(2):
            up, dn = nodes.copy(), nodes.copy()
            up[k, i] += h
            dn[k, i] -= h
            fd = (discrete_scaled_length(DiscretePath(up), f, nodes[0])
                  - discrete_scaled_length(DiscretePath(dn), f, nodes[0])) / (2 * h)
            assert grad[k, i] == pytest.approx(fd, rel=1e-4, abs=1e-9)


def test_constant_field_gives_the_chord():
    rng = np.random.default_rng(11)
    for _ in range(10):
        x, y = rng.uniform(-5, 5, (2, 3))
        f = constant_field(float(rng.normal()))
        res = minimize_scaled_length(x, y, f)
        d = y - x
        rel = res.path.nodes - x
        off = rel - np.outer(rel @ d / (d @ d), d)
        assert np.linalg.norm(off, axis=1).max() < 1e-6
        assert distance_scaled(x, y, f) == pytest.approx(np.linalg.norm(d), rel=1e-8)


def test_perturbed_start_relaxes_to_the_chord():
    rng = np.random.default_rng(2)
    x, y = np.array([0.0, 0.0, 0.0]), np.array([3.0, 1.0, -2.0])
    nodes = DiscretePath.chord(x, y, 64).nodes.copy()
    for i in range(3):
        nodes[:, i] += perturbation(64, 3, rng, 0.5)
    res = minimize_scaled_length(x, y, constant_field(0.0), initial=DiscretePath(nodes))
    assert res.value == pytest.approx(np.linalg.norm(y - x), rel=1e-10)


def test_linear_field_keeps_the_axis():
    kappa = 1.5
    f = linear_field(kappa, (1.0, 0.0))
    x, y = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    res = minimize_scaled_length(x, y, f)
    assert np.max(np.abs(res.path.nodes[:, 1])) < 1e-6
    # symmetric detours only add length
    rng = np.random.default_rng(3)
    for _ in range(20):
        detour = res.path.nodes.copy()
        detour[:, 1] += perturbation(64, 2, rng, 10.0 ** rng.uniform(-4, -1))
        assert discrete_scaled_length(DiscretePath(detour), f, x) > res.value
    # the converged value is the midpoint rule for the closed form
    assert res.value == pytest.approx(oracles.linear_segment_length(kappa), rel=kappa**2 / 24 / 64**2 * 1.1)


def test_black_hole_geodesic_bows_around_the_center():
    n = 64
    res = minimize_scaled_length(X, Y, BLACK, OptimizerOptions(nodes=n))
    interior = res.path.nodes[1:-1]
    assert np.all(np.linalg.norm(interior, axis=1) > 0.99)
    assert np.all(interior[:, 1] > 0) or np.all(interior[:, 1] < 0)
    # the chord's midpoints straddle the center at distance 1/n
    assert discrete_scaled_length(DiscretePath.chord(X, Y, n), BLACK, X) > 1e20 * res.value
    # brute force over equally spaced circular arcs
    def arc(b):
        return oracles.midpoint_polyline_length(oracles.arc_nodes(X, Y, b, n), BLACK, BLACK(X))
    best = minimize_scalar(arc, bounds=(0.05, 2.0), method="bounded", options={"xatol": 1e-10})
    assert best.x == pytest.approx(0.5, abs=1e-3)
    assert abs(res.value - best.fun) <= best.fun / n**2
    for b in (0.2, 0.35, 0.45, 0.55, 0.7, 1.0):
        assert res.value < arc(b)


def test_black_hole_distance_converges_to_the_unit_circle():
    # theta is constant on the unit circle and s * exp(1/s) is stationary at s = 1,
    # so the half circle is a geodesic of length pi
    gaps = [minimize_scaled_length(X, Y, BLACK, OptimizerOptions(nodes=n)).value - math.pi for n in (16, 32, 64)]
    assert all(g > 0 for g in gaps)
    assert [a / b for a, b in zip(gaps, gaps[1:])] == pytest.approx([4.0, 4.0], rel=0.05)


def test_off_axis_black_hole_geodesic():
    x, y = np.array([1.0, 0.3]), np.array([-1.0, 0.3])
    res = minimize_scaled_length(x, y, BLACK)
    chord = DiscretePath.chord(x, y, 64)
    assert res.value < discrete_scaled_length(chord, BLACK, x)
    assert np.all(res.path.nodes[1:-1, 1] > 0.3)


def test_white_hole_radial_distance():
    white = radial_field(-1.0, (0.0, 0.0, 0.0))
    x, y = np.array([1.0, 0.0, 0.0]), np.zeros(3)
    d = distance_scaled(x, y, white)
    assert d == pytest.approx(oracles.hole_midpoint(-1.0, 1.0, 1.0), rel=1e-3)
    assert round(d, 1) == 0.4


def test_history_is_nonincreasing_and_endpoints_stay():
    res = minimize_scaled_length(X, Y, BLACK)
    hist = np.asarray(res.history)
    assert np.all(np.diff(hist) <= 64 * np.finfo(float).eps * hist[:-1])
    assert hist[-1] == res.value
    np.testing.assert_array_equal(res.path.nodes[0], X)
    np.testing.assert_array_equal(res.path.nodes[-1], Y)
    assert res.gradient_norm <= 1e-9


def test_iteration_limit():
    with pytest.raises(ConvergenceError):
        minimize_scaled_length(X, Y, BLACK, OptimizerOptions(max_iterations=3))


def test_diving_into_a_white_hole_is_a_domain_error():
    white = radial_field(-1.0, (0.0, 0.0))
    with pytest.raises(DomainError):
        minimize_scaled_length(np.array([1.0, 0.3]), np.array([-1.0, 0.3]), white)


def test_el_residual_on_chords():
    chord = DiscretePath.chord((0.0, 0.0, 0.0), (2.0, -1.0, 0.5), 32)
    assert np.max(np.abs(el_residual(chord, constant_field(3.0)))) <= 1e-10
    off_axis = DiscretePath.chord((1.0, 0.3), (-1.0, 0.3), 64)
    r = np.linalg.norm(el_residual(off_axis, BLACK), axis=1)
    assert np.all(r[24:39] > 1e-2)


def test_el_residual_falls_under_refinement():
    f = linear_field(1.0, (0.6, 0.8))
    x, y = np.array([0.0, 0.0]), np.array([2.0, -1.0])
    peaks = []
    for n in (16, 32, 64):
        res = minimize_scaled_length(x, y, f, OptimizerOptions(nodes=n))
        peaks.append(np.max(np.linalg.norm(el_residual(res.path, f), axis=1)))
    assert peaks[0] > peaks[1] > peaks[2]
    assert peaks[1] / peaks[2] > 3.0


def test_respacing_never_lengthens():
    from scalegeom.geodesics import redistributed
    rng = np.random.default_rng(4)
    nodes = np.cumsum(rng.normal(size=(20, 3)) * rng.uniform(0.01, 1.0, (20, 1)), axis=0)
    out = redistributed(nodes)
    seg = np.linalg.norm(np.diff(out, axis=0), axis=1)
    assert DiscretePath(out).euclidean_length() <= DiscretePath(nodes).euclidean_length()
    np.testing.assert_array_equal(out[[0, -1]], nodes[[0, -1]])
    assert seg.max() / seg.min() < 1e6
