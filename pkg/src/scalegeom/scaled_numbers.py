"""Scaled number structures.

A scaled structure keeps ordinary floating-point values but reinterprets the
operation table: addition and subtraction are unchanged, multiplication
becomes ``a*b/r``, division becomes ``r*a/b``, and ``r`` plays the role of the
multiplicative identity.  A value ``a`` at the source point corresponds to
``r*a`` in the scaled structure.  Everything here works for complex scalars
as well as real ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "ScaledStructure",
    "ScaledVectorSpace",
    "TransportMap",
    "scaled_add",
    "scaled_sub",
    "scaled_mul",
    "scaled_div",
    "correspond",
    "scaled_vector_scale",
    "scaled_inner",
    "check_equation_invariance",
]

EQUATION_RTOL = 1e-12


def _check_scale(scale):
    scale = float(scale)
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError(f"scale factor must be positive and finite, got {scale!r}")
    return scale


@dataclass(frozen=True)
class ScaledStructure:
    """Descriptor of a scaled real (or complex) number structure with factor ``scale``."""

    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scale", _check_scale(self.scale))

    @property
    def zero(self):
        return 0.0

    @property
    def one(self):
        return self.scale

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b / self.scale

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in scaled structure")
        return self.scale * a / b

    def correspond(self, a):
        """Representation in this structure of the value ``a`` at the source point."""
        return self.scale * a


def scaled_add(a, b, s: ScaledStructure):
    return s.add(a, b)


def scaled_sub(a, b, s: ScaledStructure):
    return s.sub(a, b)


def scaled_mul(a, b, s: ScaledStructure):
    return s.mul(a, b)


def scaled_div(a, b, s: ScaledStructure):
    return s.div(a, b)


def correspond(a, s: ScaledStructure):
    return s.correspond(a)


@dataclass(frozen=True)
class ScaledVectorSpace:
    """Finite-dimensional inner-product space with scaled scalar multiplication.

    Scalar multiplication is ``(c/r)*v`` and the inner product is
    ``<r*u, r*v>/r``, which equals ``r*<u, v>``.  The generic vector of the
    structure tuple carries no operational meaning here.
    """

    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dim must be a positive integer")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "scale", _check_scale(self.scale))

    def _vector(self, v):
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise DimensionError(f"expected a vector of dimension {self.dim}, got shape {v.shape}")
        return v

    def scale_vector(self, c, v):
        return (c / self.scale) * self._vector(v)

    def inner(self, u, v):
        u = self._vector(u)
        v = self._vector(v)
        r = self.scale
        return np.vdot(r * u, r * v) / r

    def norm_squared(self, v):
        return self.inner(v, v).real


def scaled_vector_scale(c, v, vs: ScaledVectorSpace):
    return vs.scale_vector(c, v)


def scaled_inner(u, v, vs: ScaledVectorSpace):
    return vs.inner(u, v)


@dataclass(frozen=True)
class TransportMap:
    """Value transport from ``source`` to ``target`` with scaling factor ``factor``.

    The map factors as ``Z o W``: ``W`` carries a value into the scaled
    structure (multiplication by ``factor``) and ``Z`` is the value-preserving
    identification of that structure with the target one.  With
    ``factor == 1``, ``W`` is the identity and the map preserves values.
    """

    source: tuple
    target: tuple
    factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(float(c) for c in np.ravel(self.source)))
        object.__setattr__(self, "target", tuple(float(c) for c in np.ravel(self.target)))
        object.__setattr__(self, "factor", _check_scale(self.factor))

    @classmethod
    def from_field(cls, field, source, target):
        """Transport map whose factor is ``exp(theta(target) - theta(source))``."""
        s = np.asarray(source, dtype=float)
        t = np.asarray(target, dtype=float)
        return cls(s, t, math.exp(float(field(t)) - float(field(s))))

    @property
    def structure(self) -> ScaledStructure:
        return ScaledStructure(self.factor)

    def w(self, a):
        return self.structure.correspond(a)

    def z(self, a):
        return a

    def __call__(self, a):
        return self.z(self.w(a))

    def then(self, other: "TransportMap") -> "TransportMap":
        """Compose ``self`` (x -> y) with ``other`` (y -> z) into x -> z."""
        if self.target != other.source:
            raise ValueError("transport maps do not chain: target of the first must be source of the second")
        return TransportMap(self.source, other.target, self.factor * other.factor)


def check_equation_invariance(c, g, s: ScaledStructure, rtol: float = EQUATION_RTOL) -> bool:
    """Check that ``lambda = c / g`` survives transport into the scaled structure.

    Both sides are transported, ``r*lambda`` against ``(r*c) r/ (r*g)``.
    """
    if g == 0:
        raise ZeroDivisionError("frequency must be nonzero")
    lhs = s.div(s.correspond(c), s.correspond(g))
    rhs = s.correspond(c / g)
    return bool(abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs)))

