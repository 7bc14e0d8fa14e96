"""Time-dependent scaling along the past light cone.

The field family is ``theta(s) = alpha * ln(s / t_now)``, so the factor
``exp(theta(s)) = (s / t_now) ** alpha`` is 1 today and, for ``alpha > 0``,
crushes every magnitude toward 0 as ``s -> 0``.  ``alpha < 0`` gives the
divergent variant.  The family is a stand-in: only its two limits are fixed
by the model, the power law itself is a choice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fields import ScalarField, cosmological_field
from .paths import as_point
from .scaled_numbers import ScaledStructure, check_equation_invariance
from .tables import Table

T_NOW_YEARS = 14e9
RATIO_RTOL = 1e-15


@dataclass(frozen=True)
class CrushProfile:
    alpha: float
    t_now: float = T_NOW_YEARS
    c: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if not (math.isfinite(self.t_now) and self.t_now > 0):
            raise ValueError("t_now must be positive")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError("c must be positive")

    def field(self) -> ScalarField:
        return cosmological_field(self.alpha, self.t_now)


def lightcone_time(p: CrushProfile, t: float, x_spatial, z_spatial) -> float:
    """Emission time ``s = t - |x - z| / c`` of a signal seen at ``z`` at time ``t``."""
    if not t > 0:
        raise DomainError("observation time must be positive")
    x = as_point(x_spatial)
    z = as_point(z_spatial, x.size)
    travel = float(np.linalg.norm(x - z)) / p.c
    if travel >= t:
        raise DomainError(f"light-cone time {t - travel:.6g} is at or before the big bang")
    return t - travel


def crush_factor(p: CrushProfile, s: float) -> float:
    """``(s / t_now) ** alpha``, exactly 1 at ``s = t_now``."""
    if not s > 0:
        raise DomainError("emission time must be positive")
    if s > p.t_now:
        raise DomainError("emission time lies in the future of t_now")
    return math.pow(s / p.t_now, p.alpha)


def lightcone_crush(p: CrushProfile, t: float, x_spatial, z_spatial) -> float:
    """Factor seen at ``z`` for a quantity at ``x`` on the past light cone."""
    return crush_factor(p, lightcone_time(p, t, x_spatial, z_spatial))


def crush_curve(p: CrushProfile, samples: int) -> Table:
    """Rows ``(s, lookback_distance, factor)`` descending log-spaced from ``t_now``.

    ``s_i = t_now * 10**(-6 i / samples)``, so the grid stays inside
    ``(1e-6 t_now, t_now]``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    rows = []
    for i in range(samples):
        s = p.t_now * 10.0 ** (-6.0 * i / samples)
        rows.append((s, p.c * (p.t_now - s), crush_factor(p, s)))
    return Table(("s", "lookback_distance", "factor"), rows)


def uniform_scaling_check(p: CrushProfile, s: float, quantities) -> list:
    """Multiply every ``(name, value)`` by the one crush factor at ``s``."""
    factor = crush_factor(p, s)
    out = [(name, value * factor) for name, value in quantities]
    for (name, raw), (_, scaled) in zip(quantities, out):
        if raw != 0 and abs(scaled / raw - factor) > RATIO_RTOL * factor:
            raise AssertionError(f"{name} scaled by {scaled / raw!r}, expected {factor!r}")
    return out


def crush_preserves_equation(p: CrushProfile, s: float, c: float, g: float) -> bool:
    """Does ``lambda = c / gamma`` still hold in the structure scaled by the crush factor?"""
    return check_equation_invariance(c, g, ScaledStructure(crush_factor(p, s)))
