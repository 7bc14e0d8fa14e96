"""Reference values computed independently of the package's integrators and optimizer."""
from __future__ import annotations

import math

import numpy as np

MIDPOINT_PANELS = 10**6


def hole_midpoint(K: float, r: float, w: float, panels: int = MIDPOINT_PANELS, chunk: int = 250_000) -> float:
    """``r * integral_0^w exp((K/r)(1/(1-z) - 1)) dz`` by the composite midpoint rule."""
    h = w / panels
    k = K / r
    total = 0.0
    for lo in range(0, panels, chunk):
        z = (np.arange(lo, min(lo + chunk, panels)) + 0.5) * h
        total += math.fsum(np.exp(k * (1.0 / (1.0 - z) - 1.0)))
    return r * h * total


def rotational_loop_factor(omega: float, radius: float = 1.0) -> float:
    """Green's theorem for ``A = omega/2 (-x2, x1)``: the loop exponent is ``omega * area``."""
    return math.exp(omega * math.pi * radius**2)


def rotational_loop_riemann(omega: float, radius: float = 1.0, n: int = 200_000) -> float:
    """The same loop integral as a periodic Riemann sum, exact for trigonometric integrands."""
    s = np.arange(n) / n
    phi = 2 * math.pi * s
    x1, x2 = radius * np.cos(phi), radius * np.sin(phi)
    v1, v2 = -2 * math.pi * radius * np.sin(phi), 2 * math.pi * radius * np.cos(phi)
    integrand = 0.5 * omega * (-x2 * v1 + x1 * v2)
    return math.exp(math.fsum(integrand) / n)


def linear_segment_length(kappa: float, length: float = 1.0) -> float:
    """``integral_0^L exp(kappa s) ds`` along the field direction from a ``theta = 0`` start."""
    if kappa == 0:
        return length
    return math.expm1(kappa * length) / kappa


def free_action(mass: float, speed: float, duration: float) -> float:
    return 0.5 * mass * speed**2 * duration


def arc_nodes(x, y, bulge: float, n: int) -> np.ndarray:
    """``n + 1`` equally spaced nodes on the circular arc from ``x`` to ``y`` through the
    point displaced ``bulge`` (signed, in chord lengths) from the chord midpoint, in the plane
    of the first two coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = y - x
    c = np.linalg.norm(d)
    mid = 0.5 * (x + y)
    perp = np.array([-d[1], d[0]]) / c
    s = np.arange(n + 1) / n
    if bulge == 0:
        return x + s[:, None] * d
    hgt = bulge * c
    radius = (hgt**2 + (c / 2) ** 2) / (2 * hgt)
    center = mid + (hgt - radius) * perp
    a0 = math.atan2(*(x - center)[::-1])
    a1 = math.atan2(*(y - center)[::-1])
    top = mid + hgt * perp
    am = math.atan2(*(top - center)[::-1])
    # choose the sweep direction that passes through the top point
    sweep = (a1 - a0) % (2 * math.pi)
    if not _angle_between(a0, am, sweep):
        sweep -= 2 * math.pi
    ang = a0 + s * sweep
    nodes = center + abs(radius) * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    nodes[0], nodes[-1] = x, y
    return nodes


def _angle_between(a0: float, a: float, sweep: float) -> bool:
    return (a - a0) % (2 * math.pi) <= sweep


def midpoint_polyline_length(nodes: np.ndarray, theta, theta_ref: float) -> float:
    """Midpoint-weighted polyline length, written directly from its definition."""
    total = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        m = 0.5 * (a + b)
        total.append(math.exp(theta(m) - theta_ref) * math.dist(a, b))
    return math.fsum(total)
