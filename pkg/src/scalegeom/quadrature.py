"""Adaptive Gauss-Legendre quadrature shared by the path-length machinery.

Each panel is integrated with a 15-point Gauss-Legendre rule; the difference
to the 7-point rule on the same panel is the error estimate.  Panels are
accepted or bisected independently of one another (local tolerance) until the
summed error estimate meets the tolerance on the whole integral, which stops
endpoint singularities from forcing bisection to the depth limit.  All
pending panels of one bisection level are evaluated in a single vectorized
call of the integrand, so the integrand must accept a 1-D array of abscissae.

Divergence is a result, not an exception: when the running estimate (accepted
panels plus current estimates of pending panels) exceeds the divergence
threshold, or the integrand produces ``+-inf``, the result is flagged
``diverged``.  NaN values raise :class:`QuadratureError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import QuadratureError

GAUSS15_NODES, GAUSS15_WEIGHTS = np.polynomial.legendre.leggauss(15)
GAUSS7_NODES, GAUSS7_WEIGHTS = np.polynomial.legendre.leggauss(7)

# Hard cap on the number of live panels per bisection level.
MAX_ACTIVE_PANELS = 1 << 18


@dataclass(frozen=True)
class QuadratureOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 60
    divergence_threshold: float = 1e12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if not self.divergence_threshold > 1:
            raise ValueError("divergence_threshold must exceed 1")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_OPTIONS = QuadratureOptions()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error: float
    evaluations: int
    diverged: bool = False


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    opts: QuadratureOptions | None = None,
    breakpoints: Iterable[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``.

    ``breakpoints`` are interior abscissae where ``f`` is known to be
    non-smooth (polyline kinks); they become initial panel edges.
    """
    opts = opts or DEFAULT_OPTIONS
    a = float(a)
    b = float(b)
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    width = b - a
    edges = [a] + sorted({float(t) for t in breakpoints if a < t < b}) + [b]
    lo = np.asarray(edges[:-1])
    hi = np.asarray(edges[1:])
    depth = 0
    evaluations = 0
    acc_lo: list[np.ndarray] = []
    acc_val: list[np.ndarray] = []
    acc_err: list[np.ndarray] = []
    accepted_total = 0.0
    accepted_error = 0.0

    def diverged_result():
        return QuadratureResult(sign * math.inf, math.inf, evaluations, True)

    while lo.size:
        if lo.size > MAX_ACTIVE_PANELS:
            raise QuadratureError("too many active panels; integrand is not resolvable")
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x15 = mid[:, None] + half[:, None] * GAUSS15_NODES
        x7 = mid[:, None] + half[:, None] * GAUSS7_NODES
        pts = np.concatenate([x15.ravel(), x7.ravel()])
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(f(pts), dtype=float).reshape(-1)
        if vals.shape != pts.shape:
            raise QuadratureError("integrand must return one value per abscissa")
        evaluations += pts.size
        if np.isnan(vals).any():
            raise QuadratureError("integrand returned NaN")
        if np.isinf(vals).any():
            return diverged_result()
        n15 = x15.size
        with np.errstate(over="ignore", invalid="ignore"):
            g15 = half * (vals[:n15].reshape(x15.shape) @ GAUSS15_WEIGHTS)
            g7 = half * (vals[n15:].reshape(x7.shape) @ GAUSS7_WEIGHTS)
            err = np.abs(g15 - g7)
        if not np.all(np.isfinite(g15)) or not np.all(np.isfinite(g7)):
            return diverged_result()

        tol = np.maximum(opts.abs_tol * (2.0 * half) / width, opts.rel_tol * np.abs(g15))
        ok = err <= tol
        # Global test: integrable endpoint singularities never meet the
        # per-panel test, but their total error does shrink below tolerance.
        estimate = accepted_total + float(np.sum(g15))
        if accepted_error + float(np.sum(err)) <= max(opts.abs_tol, opts.rel_tol * abs(estimate)):
            ok[:] = True
        if ok.any():
            acc_lo.append(lo[ok])
            acc_val.append(g15[ok])
            acc_err.append(err[ok])
            accepted_total += float(np.sum(g15[ok]))
            accepted_error += float(np.sum(err[ok]))
        pending = g15[~ok]
        if abs(accepted_total + float(np.sum(pending))) > opts.divergence_threshold:
            return diverged_result()
        if not pending.size:
            break
        depth += 1
        if depth > opts.max_subdivisions:
            raise QuadratureError(
                f"maximum subdivision depth {opts.max_subdivisions} reached without convergence"
            )
        plo = lo[~ok]
        phi = hi[~ok]
        pmid = 0.5 * (plo + phi)
        lo = np.concatenate([plo, pmid])
        hi = np.concatenate([pmid, phi])

    all_lo = np.concatenate(acc_lo)
    order = np.argsort(all_lo, kind="stable")
    values = np.concatenate(acc_val)[order]
    errors = np.concatenate(acc_err)[order]
    total = math.fsum(values.tolist())
    if abs(total) > opts.divergence_threshold:
        return diverged_result()
    return QuadratureResult(sign * total, math.fsum(errors.tolist()), evaluations)
