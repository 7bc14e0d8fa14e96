import os
import subprocess
import sys

import numpy as np
import pytest

from scalegeom import HoleProfile, _accel, _kernels, hole_curve, hole_scaled_distance, minimize_scaled_length
from scalegeom.fields import radial_field

needs_numba = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("K, w", [(1.0, 0.5), (1.0, 0.85), (1.0, 0.97), (-1.0, 1.0), (-3.0, 0.7), (0.2, 0.99)])
def test_hole_kernels_agree(K, w):
    h = HoleProfile(K)
    a = hole_scaled_distance(h, w, backend="numba")
    b = hole_scaled_distance(h, w, backend="numpy")
    assert a.diverged == b.diverged
    assert a.value == pytest.approx(b.value, rel=1e-13)


@needs_numba
def test_polyline_kernels_agree():
    rng = np.random.default_rng(0)
    nodes = rng.normal(size=(33, 3))
    theta = rng.normal(size=32)
    grad = rng.normal(size=(32, 3))
    va, ga = _kernels.scaled_polyline(nodes, theta, grad, 0.3, backend="numba")
    vb, gb = _kernels.scaled_polyline(nodes, theta, grad, 0.3, backend="numpy")
    assert va == pytest.approx(vb, rel=1e-14)
    np.testing.assert_allclose(ga, gb, rtol=1e-13, atol=1e-15)


@needs_numba
def test_optimizer_backends_agree():
    f = radial_field(1.0, (0.0, 0.0))
    x, y = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
    a = minimize_scaled_length(x, y, f, backend="numba")
    b = minimize_scaled_length(x, y, f, backend="numpy")
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_curves_agree_across_backends():
    backends = _kernels.BACKENDS if _accel.NUMBA_AVAILABLE else ("numpy",)
    cols = [hole_curve(HoleProfile(-1.0), 40, backend=b).column("scaled") for b in backends]
    for col in cols[1:]:
        assert col == pytest.approx(cols[0], rel=1e-13)


def test_unknown_backend():
    with pytest.raises(ValueError):
        hole_scaled_distance(HoleProfile(1.0), 0.5, backend="fortran")


def test_environment_flag_selects_numpy():
    env = dict(os.environ, SCALEGEOM_JIT="0")
    out = subprocess.run([sys.executable, "-c", "import scalegeom; print(scalegeom.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
