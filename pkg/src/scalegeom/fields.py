"""Scaling fields and scaling factors.

``ScalarField`` wraps the potential ``theta`` (dimensionless) and
``VectorField`` the connection ``A`` (inverse length).  For a gradient field
the factor between two points is ``exp(theta(y) - theta(x))``; for a general
vector field it is ``exp(integral of A . dp)`` along a path.

Fields are vectorized: they accept a single point of shape ``(n,)`` or a
stack of points of shape ``(m, n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, QuadratureError
from .paths import Path, as_point
from .quadrature import QuadratureOptions, integrate

# Points closer than this to a point singularity are outside the domain.
SINGULAR_RADIUS = 1e-12
# Default exclusion ball, relative to |K|, used for node clamping by optimizers.
CLAMP_FRACTION = 1e-3


@dataclass(frozen=True)
class Singularity:
    center: tuple
    clamp_radius: float


class ScalarField:
    """The potential ``theta`` with an optional analytic gradient."""

    def __init__(
        self,
        theta: Callable[[np.ndarray], np.ndarray],
        gradient: Callable[[np.ndarray], np.ndarray] | None = None,
        *,
        dim: int | None = None,
        singularities: Sequence[Singularity] = (),
        domain: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str = "field",
    ):
        self._theta = theta
        self._gradient = gradient
        self.dim = dim
        self.singularities = tuple(singularities)
        self._domain = domain
        self.name = name

    @property
    def has_analytic_gradient(self) -> bool:
        return self._gradient is not None

    def _points(self, x) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        if self.dim is not None and pts.shape[-1] != self.dim:
            raise DimensionError(f"{self.name} is {self.dim}-dimensional, got points of dimension {pts.shape[-1]}")
        if not np.all(np.isfinite(pts)):
            raise DomainError(f"{self.name}: non-finite point")
        for sing in self.singularities:
            d = np.linalg.norm(pts - np.asarray(sing.center), axis=-1)
            if np.any(d < SINGULAR_RADIUS):
                raise DomainError(f"{self.name}: evaluation at the singular point {sing.center}")
        if self._domain is not None and not np.all(self._domain(pts)):
            raise DomainError(f"{self.name}: point outside the field's domain")
        return pts

    def __call__(self, x):
        pts = self._points(x)
        out = np.asarray(self._theta(pts), dtype=float).reshape(pts.shape[0])
        return float(out[0]) if np.ndim(x) == 1 else out

    def gradient(self, x):
        """Analytic gradient if available, otherwise central finite differences."""
        pts = self._points(x)
        if self._gradient is not None:
            out = np.asarray(self._gradient(pts), dtype=float).reshape(pts.shape)
        else:
            out = fd_gradient(self._theta, pts)
        return out[0] if np.ndim(x) == 1 else out

    def fd_gradient(self, x):
        pts = self._points(x)
        out = fd_gradient(self._theta, pts)
        return out[0] if np.ndim(x) == 1 else out

    def clamp_violation(self, pts) -> bool:
        """True if any point lies inside the clamp ball of a singularity."""
        pts = np.atleast_2d(pts)
        for sing in self.singularities:
            d = np.linalg.norm(pts - np.asarray(sing.center), axis=-1)
            if np.any(d < sing.clamp_radius):
                return True
        return False


def fd_step(pts: np.ndarray) -> np.ndarray:
    return np.maximum(1e-6, 1e-6 * np.abs(pts))


def fd_gradient(theta: Callable, pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(pts)
    h = fd_step(pts)
    grad = np.empty_like(pts)
    for i in range(pts.shape[1]):
        e = np.zeros(pts.shape[1])
        e[i] = 1.0
        up = np.asarray(theta(pts + h[:, i : i + 1] * e)).reshape(-1)
        dn = np.asarray(theta(pts - h[:, i : i + 1] * e)).reshape(-1)
        grad[:, i] = (up - dn) / (2 * h[:, i])
    return grad


class VectorField:
    """The connection ``A``; ``is_gradient`` records that it came from a potential."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], *, is_gradient: bool = False,
                 dim: int | None = None, name: str = "vector field"):
        self._func = func
        self.is_gradient = is_gradient
        self.dim = dim
        self.name = name

    @classmethod
    def from_scalar(cls, f: ScalarField) -> "VectorField":
        return cls(f.gradient, is_gradient=True, dim=f.dim, name=f"grad {f.name}")

    def __call__(self, x):
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        if self.dim is not None and pts.shape[-1] != self.dim:
            raise DimensionError(f"{self.name} is {self.dim}-dimensional")
        out = np.asarray(self._func(pts), dtype=float).reshape(pts.shape)
        return out[0] if np.ndim(x) == 1 else out


def as_vector_field(A) -> VectorField:
    if isinstance(A, VectorField):
        return A
    if isinstance(A, ScalarField):
        return VectorField.from_scalar(A)
    raise TypeError(f"expected a VectorField or ScalarField, got {type(A).__name__}")


def grad_theta(f: ScalarField, x) -> np.ndarray:
    return f.gradient(as_point(x))


def scale_factor_neighbor(A, x, direction, dx: float) -> float:
    """``exp(A(x) . mu dx)`` for a neighbor displaced by ``dx`` along unit vector ``mu``."""
    A = as_vector_field(A)
    x = as_point(x)
    mu = np.asarray(direction, dtype=float)
    if mu.shape != x.shape:
        raise DimensionError("direction and point dimensions differ")
    if abs(np.linalg.norm(mu) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    if not dx > 0:
        raise ValueError("dx must be positive")
    return math.exp(float(np.dot(A(x), mu)) * dx)


def connection_integral(A, p: Path, opts: QuadratureOptions | None = None):
    """``integral_0^1 A(p(s)) . p'(s) ds`` as a quadrature result."""
    A = as_vector_field(A)

    def integrand(s):
        return np.einsum("ij,ij->i", A(p(s)), p.velocity(s))

    res = integrate(integrand, 0.0, 1.0, opts, breakpoints=p.breakpoints)
    if res.diverged:
        raise QuadratureError("connection integrand is not finite along the path")
    return res


def scale_factor_path(A, p: Path, opts: QuadratureOptions | None = None) -> float:
    return math.exp(connection_integral(A, p, opts).value)


def scale_factor_gradient(f: ScalarField, y, x) -> float:
    """Path-independent factor ``exp(theta(y) - theta(x))``."""
    return math.exp(f(as_point(y)) - f(as_point(x)))


# -- catalog -----------------------------------------------------------------

CATALOG_KINDS = ("constant", "radial", "cosmological", "linear", "rotational")
_ALIASES = {"cosmo": "cosmological"}


@dataclass(frozen=True)
class FieldCatalogEntry:
    """Parameters of one catalog field.  Only the parameters of ``kind`` are used."""

    kind: str
    value: float = 0.0
    K: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    clamp_radius: float | None = None
    alpha: float = 1.0
    t_now: float = 14e9
    kappa: float = 1.0
    direction: tuple = (1.0, 0.0, 0.0)
    omega: float = 1.0
    dim: int | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in CATALOG_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}; expected one of {CATALOG_KINDS}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        object.__setattr__(self, "direction", tuple(float(c) for c in np.ravel(self.direction)))
        if kind == "constant" and not math.isfinite(self.value):
            raise ValueError("constant field value must be finite")
        if kind == "radial":
            if not math.isfinite(self.K):
                raise ValueError("radial field needs finite K")
            as_point(self.center)
        if kind == "cosmological":
            if not math.isfinite(self.alpha):
                raise ValueError("cosmological field needs real alpha")
            if not (math.isfinite(self.t_now) and self.t_now > 0):
                raise ValueError("cosmological field needs t_now > 0")
        if kind == "linear":
            d = as_point(self.direction)
            if not math.isfinite(self.kappa) or np.linalg.norm(d) == 0:
                raise ValueError("linear field needs finite kappa and a nonzero direction")
        if kind == "rotational" and not math.isfinite(self.omega):
            raise ValueError("rotational field needs finite omega")


def constant_field(value: float = 0.0, dim: int | None = None) -> ScalarField:
    return ScalarField(
        lambda p: np.full(p.shape[0], float(value)),
        lambda p: np.zeros_like(p),
        dim=dim,
        name=f"constant({value})",
    )


def radial_field(K: float, center, clamp_radius: float | None = None) -> ScalarField:
    """``theta(y) = K / |y - center|``: a black hole for ``K > 0``, white for ``K < 0``."""
    c = as_point(center)
    clamp = CLAMP_FRACTION * abs(K) if clamp_radius is None else clamp_radius

    def theta(p):
        return K / np.linalg.norm(p - c, axis=-1)

    def gradient(p):
        d = p - c
        s = np.linalg.norm(d, axis=-1)
        return -K * d / s[:, None] ** 3

    return ScalarField(
        theta,
        gradient,
        dim=c.size,
        singularities=(Singularity(tuple(c), clamp),),
        name=f"radial(K={K})",
    )


def cosmological_field(alpha: float, t_now: float, dim: int = 1) -> ScalarField:
    """``theta(t) = alpha * ln(t / t_now)`` with time as coordinate 0; zero at ``t_now``."""

    def theta(p):
        return alpha * np.log(p[:, 0] / t_now)

    def gradient(p):
        g = np.zeros_like(p)
        g[:, 0] = alpha / p[:, 0]
        return g

    return ScalarField(
        theta,
        gradient,
        dim=dim,
        domain=lambda p: p[:, 0] > 0,
        name=f"cosmological(alpha={alpha})",
    )


def linear_field(kappa: float, direction) -> ScalarField:
    d = as_point(direction)
    d = d / np.linalg.norm(d)

    def theta(p):
        return kappa * (p @ d)

    def gradient(p):
        return np.broadcast_to(kappa * d, p.shape).copy()

    return ScalarField(theta, gradient, dim=d.size, name=f"linear(kappa={kappa})")


def rotational_field(omega: float = 1.0, dim: int = 2) -> VectorField:
    """``A = omega/2 * (-x2, x1, 0, ...)``; curl ``omega``, no potential."""

    def func(p):
        out = np.zeros_like(p)
        out[:, 0] = -0.5 * omega * p[:, 1]
        out[:, 1] = 0.5 * omega * p[:, 0]
        return out

    return VectorField(func, is_gradient=False, dim=dim, name=f"rotational(omega={omega})")


def make_field(entry: FieldCatalogEntry):
    """Build the catalog field; ``rotational`` yields a :class:`VectorField`."""
    if entry.kind == "constant":
        return constant_field(entry.value)
    if entry.kind == "radial":
        return radial_field(entry.K, entry.center, entry.clamp_radius)
    if entry.kind == "cosmological":
        return cosmological_field(entry.alpha, entry.t_now, dim=entry.dim or 1)
    if entry.kind == "linear":
        return linear_field(entry.kappa, entry.direction)
    return rotational_field(entry.omega, dim=entry.dim or 2)
