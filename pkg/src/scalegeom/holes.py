"""Black and white scaling holes.

For ``theta(s) = K / s`` about a center ``x0`` and a reference point ``x`` at
distance ``r``, the ``x``-referenced scaled distance to the point a fraction
``w`` of the way from ``x`` to ``x0`` is

    r * integral_0^w exp((K/r) (1/(1-z) - 1)) dz.

``K > 0`` (black) diverges as ``w -> 1``; ``K < 0`` (white) stays bounded.
The integral is evaluated in log space; for ``K > 0`` the substitution
``u = 1/(1-z)`` turns the endpoint blow-up into a plain exponential on
``[1, 1/(1-w)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, QuadratureError
from .fields import ScalarField, radial_field
from .geometry import ScaledLengthResult
from .paths import Path, as_point
from .quadrature import DEFAULT_OPTIONS, QuadratureOptions, integrate
from .tables import Table

BLACK_W_MAX = 0.99


@dataclass(frozen=True)
class HoleProfile:
    """``K`` (length; > 0 black, < 0 white), reference radius ``r`` and center."""

    K: float
    r: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not math.isfinite(self.K):
            raise ValueError("K must be finite")
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError("r must be positive")
        object.__setattr__(self, "center", tuple(as_point(self.center)))

    @property
    def kind(self) -> str:
        return "black" if self.K > 0 else ("white" if self.K < 0 else "flat")

    @property
    def strength(self) -> float:
        """Dimensionless ``K / r``."""
        return self.K / self.r

    def field(self) -> ScalarField:
        return radial_field(self.K, self.center, clamp_radius=1e-3 * self.r)

    def reference_point(self) -> np.ndarray:
        """``x``: distance ``r`` from the center along the first axis."""
        x = np.array(self.center, dtype=float)
        x[0] += self.r
        return x

    def radial_path(self, w: float) -> Path:
        """Straight path from ``x`` toward the center, covering fraction ``w``."""
        x = self.reference_point()
        c = np.array(self.center, dtype=float)
        return Path.segment(x, x + w * (c - x))

    def integrand(self, z):
        """``exp((K/r)(1/(1-z) - 1))``, the scaled speed along the radius."""
        z = np.asarray(z, dtype=float)
        with np.errstate(over="ignore", divide="ignore"):
            return np.exp(self.strength * (1.0 / (1.0 - z) - 1.0))


def _log_integral(h: HoleProfile, z0: float, z1: float, opts: QuadratureOptions, backend=None):
    k = h.strength
    log_threshold = math.log(opts.divergence_threshold / h.r)
    if k > 0:
        if z1 >= 1.0:
            return math.inf, math.inf, 0, _kernels.STATUS_DIVERGED
        lo, hi, use_u = 1.0 / (1.0 - z0), 1.0 / (1.0 - z1), True
    else:
        lo, hi, use_u = z0, z1, False
    return _kernels.hole_log_integral(
        k, lo, hi, use_u, opts.rel_tol, opts.abs_tol / h.r, opts.max_subdivisions, log_threshold,
        backend=backend,
    )


def hole_partial_integral(h: HoleProfile, z0: float, z1: float, opts: QuadratureOptions | None = None,
                          backend=None) -> ScaledLengthResult:
    """``r * integral_{z0}^{z1}`` of the hole integrand, ``0 <= z0 <= z1``."""
    opts = opts or DEFAULT_OPTIONS
    if not 0.0 <= z0 <= z1:
        raise DomainError("need 0 <= z0 <= z1")
    if z1 > 1.0:
        raise DomainError("fractional distance beyond the center")
    if z0 == z1:
        return ScaledLengthResult(0.0, 0.0, 0)
    if h.K == 0:
        return ScaledLengthResult(h.r * (z1 - z0), 0.0, 0)
    log_value, log_err, evals, status = _log_integral(h, z0, z1, opts, backend)
    if status == _kernels.STATUS_DIVERGED:
        return ScaledLengthResult(math.inf, math.inf, int(evals), True)
    if status == _kernels.STATUS_DEPTH:
        raise QuadratureError("hole integral did not converge within the subdivision limit")
    return ScaledLengthResult(h.r * math.exp(log_value), h.r * math.exp(log_err), int(evals))


def hole_scaled_distance(h: HoleProfile, w: float, opts: QuadratureOptions | None = None,
                         backend=None) -> ScaledLengthResult:
    """``x``-referenced scaled distance to the point at fractional distance ``w``.

    ``w`` may be 1 (the center) for white holes; for black holes ``w = 1`` is
    reported as diverged.
    """
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"fractional distance must lie in [0, 1], got {w}")
    return hole_partial_integral(h, 0.0, w, opts, backend)


def hole_curve(h: HoleProfile, samples: int, opts: QuadratureOptions | None = None,
               w_max: float | None = None, backend=None) -> Table:
    """Rows ``(w, unscaled, scaled)`` on an even grid of ``w`` from 0 to ``w_max``.

    ``w_max`` defaults to 0.99 for black holes and 1 otherwise.  Rows past the
    divergence threshold carry ``inf`` in the scaled column.

    The scaled column accumulates the integrals between neighbouring rows, so
    it never decreases even where an increment is far below the quadrature
    tolerance of the running total.
    """
    opts = opts or DEFAULT_OPTIONS
    if samples < 2:
        raise ValueError("need at least two samples")
    if w_max is None:
        w_max = BLACK_W_MAX if h.K > 0 else 1.0
    ws = [i / (samples - 1) * w_max for i in range(samples)]
    rows = [(0.0, 0.0, 0.0)]
    pieces = []
    for w0, w1 in zip(ws, ws[1:]):
        if pieces is not None:
            pieces.append(hole_partial_integral(h, w0, w1, opts, backend).value)
            total = math.fsum(pieces)
            if total > opts.divergence_threshold:
                pieces = None
        rows.append((w1, h.r * w1, total if pieces is not None else math.inf))
    return Table(("w", "unscaled", "scaled"), rows)


def scaled_speed(h: HoleProfile, t: float) -> float:
    """Rate of change of the scaled distance at time ``t`` for uniform radial motion."""
    if not 0.0 <= t < 1.0:
        raise DomainError("t must lie in [0, 1)")
    with np.errstate(over="ignore"):
        return float(np.exp(h.strength * (1.0 / (1.0 - t) - 1.0)))


def outward_scaled_distance(h: HoleProfile, d: float, opts: QuadratureOptions | None = None) -> ScaledLengthResult:
    """``integral_0^d exp(K/(r+u) - K/r) du``: scaled distance outward from ``x``."""
    if not d >= 0:
        raise DomainError("outward distance must be nonnegative")
    if d == 0:
        return ScaledLengthResult(0.0, 0.0, 0)
    K, r = h.K, h.r
    res = integrate(lambda u: np.exp(K / (r + u) - K / r), 0.0, float(d), opts)
    return ScaledLengthResult(res.value, res.abs_error, res.evaluations, res.diverged)
