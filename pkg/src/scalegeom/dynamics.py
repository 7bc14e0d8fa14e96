"""Scaling inside derivatives, actions and wave packets.

Conventions: hbar = 1, so the momentum operator is ``-1j`` times
:func:`scaled_derivative`.  The covariant time derivative applies
``d/dt + A`` to the position itself, componentwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, QuadratureError
from .fields import ScalarField, VectorField, as_vector_field
from .paths import Path, as_point
from .quadrature import QuadratureOptions, integrate


@dataclass(frozen=True)
class Grid1D:
    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise ValueError("dx must be positive")
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("values must be a finite 1-D sequence")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func: Callable, x0: float, dx: float, n: int) -> "Grid1D":
        x = x0 + dx * np.arange(n)
        return cls(x0, dx, func(x))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    def with_values(self, values) -> "Grid1D":
        return Grid1D(self.x0, self.dx, values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class LagrangianSpec:
    """``L = m |v|^2 / 2 - V(x)``; ``potential`` is ``None`` for a free particle."""

    mass: float
    potential: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError("mass must be positive")

    @property
    def kind(self) -> str:
        return "free" if self.potential is None else "potential"

    @classmethod
    def free(cls, mass: float) -> "LagrangianSpec":
        return cls(mass)

    def __call__(self, pos: np.ndarray, vel: np.ndarray) -> np.ndarray:
        kinetic = 0.5 * self.mass * np.sum(vel * vel, axis=-1)
        if self.potential is None:
            return kinetic
        return kinetic - np.asarray(self.potential(pos), dtype=float)


def scaled_derivative(g: Grid1D, A) -> Grid1D:
    """``d psi/dx + A(x) psi``; central differences inside, second-order one-sided at the ends."""
    if len(g) < 3:
        raise DimensionError("scaled derivative needs at least 3 grid points")
    A = as_vector_field(A)
    a = np.asarray(A(g.x[:, None]), dtype=float).reshape(len(g), -1)
    if a.shape[1] != 1:
        raise DimensionError("a 1-D grid needs a 1-D vector field")
    d = np.gradient(g.values, g.dx, edge_order=2)
    return g.with_values(d + a[:, 0] * g.values)


def covariant_time_derivative(gamma: Path, A, t: float) -> np.ndarray:
    """``gamma'(t) + A(gamma(t)) * gamma(t)``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    A = as_vector_field(A)
    pos = gamma(t)
    return gamma.velocity(t) + np.asarray(A(pos), dtype=float) * pos


def _covariant_velocity(gamma: Path, A: Optional[VectorField], t: np.ndarray) -> np.ndarray:
    vel = gamma.velocity(t)
    if A is None:
        return vel
    pos = gamma(t)
    return vel + np.asarray(A(pos), dtype=float).reshape(pos.shape) * pos


def scaled_action(gamma: Path, L: LagrangianSpec, f: ScalarField, ref, t_i: float, t_f: float,
                  opts: QuadratureOptions | None = None, A=None) -> float:
    """``integral_{t_i}^{t_f} exp(theta(gamma) - theta(ref)) L(gamma, D_t gamma) dt``.

    ``A`` defaults to no connection, so ``D_t gamma`` is the plain velocity.
    """
    if not t_i < t_f:
        raise ValueError("need t_i < t_f")
    A = None if A is None else as_vector_field(A)
    theta_ref = f(as_point(ref))

    def integrand(t):
        pos = gamma(t)
        return np.exp(f(pos) - theta_ref) * L(pos, _covariant_velocity(gamma, A, t))

    res = integrate(integrand, t_i, t_f, opts, breakpoints=gamma.breakpoints)
    if res.diverged:
        raise QuadratureError("action integral diverged")
    return res.value


def wavepacket_rescale(g: Grid1D, f: ScalarField, ref) -> Grid1D:
    """Multiply each sample by ``exp(theta(z_k) - theta(ref))``; no renormalization."""
    factors = np.exp(f(g.x[:, None]) - f(as_point(ref)))
    return g.with_values(factors * g.values)
