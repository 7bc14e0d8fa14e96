"""Line elements, path lengths and reference-point changes under scaling.

A scaled path length referenced to ``x`` is

    exp(-theta(x)) * integral_0^1 exp(theta(p(s))) |p'(s)| ds

The integral (internal scaling) depends only on the path; the prefactor
(external scaling) only on the reference point, so moving the reference
multiplies by ``exp(theta(x) - theta(z))`` and nothing else.  The integral is
computed once, independent of the reference, which keeps reference changes
exact to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, DomainError
from .fields import ScalarField
from .paths import Path, as_point
from .quadrature import DEFAULT_OPTIONS, QuadratureOptions, integrate


class Metric:
    """Symmetric metric tensor field ``g(y)``; symmetrized on evaluation."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], dim: int):
        self._func = func
        self.dim = int(dim)

    def __call__(self, y) -> np.ndarray:
        y = as_point(y, self.dim)
        g = np.asarray(self._func(y), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise DimensionError(f"metric must be {self.dim}x{self.dim}, got {g.shape}")
        return 0.5 * (g + g.T)

    def is_positive_definite(self, y) -> bool:
        try:
            np.linalg.cholesky(self(y))
        except np.linalg.LinAlgError:
            return False
        return True

    @classmethod
    def constant(cls, g) -> "Metric":
        g = np.array(g, dtype=float)
        return cls(lambda y: g, g.shape[0])

    @classmethod
    def euclidean(cls, dim: int) -> "Metric":
        return cls.constant(np.eye(dim))

    @classmethod
    def minkowski(cls) -> "Metric":
        return cls.constant(np.diag([1.0, -1.0, -1.0, -1.0]))


def line_element(g: Metric, y, dy) -> float:
    """``g_{mu nu}(y) dy^mu dy^nu``."""
    dy = np.asarray(dy, dtype=float)
    if dy.shape != (g.dim,):
        raise DimensionError(f"displacement must have dimension {g.dim}")
    return float(dy @ g(y) @ dy)


def line_element_scaled(g: Metric, f: ScalarField, y, x, dy) -> float:
    """Line element at ``y`` represented at reference ``x``."""
    return math.exp(f(as_point(y)) - f(as_point(x))) * line_element(g, y, dy)


@dataclass(frozen=True)
class ScaledLengthResult:
    """A length with its error estimate, or a divergence report.

    ``value`` is ``inf`` when ``diverged`` is set.
    """

    value: float
    abs_error: float
    evaluations: int
    diverged: bool = False

    @property
    def finite(self) -> bool:
        return not self.diverged

    def __float__(self):
        return float(self.value)


def _speed(p: Path, s):
    return np.linalg.norm(p.velocity(s), axis=-1)


def path_length(p: Path, opts: QuadratureOptions | None = None) -> ScaledLengthResult:
    """Euclidean length ``integral_0^1 |p'(s)| ds``."""
    res = integrate(lambda s: _speed(p, s), 0.0, 1.0, opts, breakpoints=p.breakpoints)
    return ScaledLengthResult(res.value, res.abs_error, res.evaluations, res.diverged)


def _theta_shift(p: Path, f: ScalarField) -> float:
    """A reference-independent offset that keeps ``exp(theta)`` in range."""
    for s in (0.0, 1.0, 0.5):
        try:
            value = f(p(s))
        except DomainError:
            continue
        if math.isfinite(value):
            return value
    return 0.0


def internal_integral(p: Path, f: ScalarField, opts: QuadratureOptions | None = None,
                      prefactor: float = 1.0):
    """Return ``(shift, result)`` with ``result ~ integral exp(theta(p) - shift) |p'| ds``.

    ``prefactor`` is the external factor the caller will apply; it scales the
    divergence threshold so that divergence is decided on the final value.
    """
    opts = opts or DEFAULT_OPTIONS
    shift = _theta_shift(p, f)

    def integrand(s):
        with np.errstate(over="ignore"):
            return np.exp(f(p(s)) - shift) * _speed(p, s)

    # Only the divergence threshold is rescaled: panel acceptance must not
    # depend on the reference point.
    with np.errstate(over="ignore"):
        scale = prefactor * np.exp(shift)
    limit = opts.divergence_threshold / scale if 0 < scale < math.inf else math.inf
    inner_opts = QuadratureOptions(
        rel_tol=opts.rel_tol,
        abs_tol=opts.abs_tol,
        max_subdivisions=opts.max_subdivisions,
        divergence_threshold=max(limit, 1.0 + 1e-9),
    )
    return shift, integrate(integrand, 0.0, 1.0, inner_opts, breakpoints=p.breakpoints)


def path_length_scaled(p: Path, f: ScalarField, ref, opts: QuadratureOptions | None = None) -> ScaledLengthResult:
    """Length of ``p`` with internal scaling by ``theta``, referenced to ``ref``."""
    ref_theta = f(as_point(ref))
    with np.errstate(over="ignore"):
        prefactor = math.exp(-ref_theta) if -ref_theta < 709 else math.inf
    shift, res = internal_integral(p, f, opts, prefactor)
    if res.diverged:
        return ScaledLengthResult(math.inf, math.inf, res.evaluations, True)
    factor = math.exp(shift - ref_theta)
    return ScaledLengthResult(factor * res.value, factor * res.abs_error, res.evaluations)


def reference_change(L_at_x: float, f: ScalarField, x, z) -> float:
    """Move the reference of a scaled length from ``x`` to ``z``."""
    return math.exp(f(as_point(x)) - f(as_point(z))) * L_at_x


def coord_transport(a, y, x, f: ScalarField | None = None) -> np.ndarray:
    """Coordinates ``a`` of a point at ``y`` represented at ``x``.

    Without scaling the tuple is unchanged; with scaling every component is
    multiplied by ``exp(theta(y) - theta(x))``.  The origin is invariant.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("coordinates must be finite")
    if f is None:
        return a.copy()
    return math.exp(f(as_point(y)) - f(as_point(x))) * a
