"""Time the numba kernels against their pure-numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from scalegeom import HoleProfile, _accel, _kernels, hole_curve, minimize_scaled_length
from scalegeom.fields import radial_field


def hole_curves(backend):
    for K in (1.0, -1.0):
        hole_curve(HoleProfile(K), 200, backend=backend)


def polyline(nodes, theta, grad):
    def call(backend):
        for _ in range(200):
            _kernels.scaled_polyline(nodes, theta, grad, 0.0, backend=backend)
    return call


def geodesic(backend):
    f = radial_field(1.0, (0.0, 0.0))
    minimize_scaled_length(np.array([1.0, 0.3]), np.array([-1.0, 0.3]), f, backend=backend)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    cases = [("hole curves, 2 x 200 rows", hole_curves), ("geodesic, 64 nodes", geodesic)]
    for n in (64, 1024, 16384):
        nodes = rng.normal(size=(n + 1, 3))
        cases.append((f"polyline x200, {n} segments", polyline(nodes, rng.normal(size=n), rng.normal(size=(n, 3)))))

    print(f"{'case':32s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, func in cases:
        func("numba")  # compile outside the timing
        t = {b: min(timeit.repeat(lambda: func(b), number=1, repeat=args.repeat)) for b in ("numpy", "numba")}
        print(f"{name:32s} {t['numpy']:10.4f} {t['numba']:10.4f} {t['numpy'] / t['numba']:8.1f}")


if __name__ == "__main__":
    main()
