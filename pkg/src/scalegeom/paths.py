"""Parameterized curves on ``s in [0, 1]``."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate a point: 1-D, 1 to 4 finite coordinates."""
    p = np.atleast_1d(np.array(x, dtype=float))
    if p.ndim != 1 or not 1 <= p.size <= 4:
        raise DimensionError(f"a point needs 1 to 4 coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point coordinates must be finite, got {p}")
    if dim is not None and p.size != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {p.size}")
    return p


class Path:
    """A curve ``p(s)`` with velocity ``dp/ds``.

    ``func`` and ``velocity`` take a 1-D array of parameters and return an
    array of shape ``(len(s), n)``.  Without an analytic velocity a central
    difference with step ``1e-6`` is used.  ``breakpoints`` lists parameters
    where the velocity jumps (polyline corners).
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        velocity: Callable[[np.ndarray], np.ndarray] | None = None,
        breakpoints: Sequence[float] = (),
    ):
        self._func = func
        self._velocity = velocity
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if 0.0 < b < 1.0))
        self.dim = int(np.asarray(func(np.zeros(1))).shape[-1])

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.asarray(self._func(s_arr), dtype=float).reshape(s_arr.size, self.dim)
        return out[0] if np.ndim(s) == 0 else out

    def velocity(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if self._velocity is not None:
            out = np.asarray(self._velocity(s_arr), dtype=float).reshape(s_arr.size, self.dim)
        else:
            h = 1e-6
            out = (self(s_arr + h) - self(s_arr - h)) / (2 * h)
        return out[0] if np.ndim(s) == 0 else out

    @property
    def start(self) -> np.ndarray:
        return self(0.0)

    @property
    def end(self) -> np.ndarray:
        return self(1.0)

    @classmethod
    def segment(cls, x, y) -> "Path":
        x = as_point(x)
        y = as_point(y, x.size)
        d = y - x
        return cls(
            lambda s: x + s[:, None] * d,
            lambda s: np.broadcast_to(d, (s.size, d.size)),
        )

    @classmethod
    def polyline(cls, nodes) -> "Path":
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[0] < 2:
            raise DimensionError("a polyline needs at least two nodes of equal dimension")
        m = nodes.shape[0] - 1
        deltas = np.diff(nodes, axis=0)

        def index(s):
            return np.clip(np.floor(s * m).astype(int), 0, m - 1)

        def func(s):
            k = index(s)
            return nodes[k] + (s * m - k)[:, None] * deltas[k]

        def velocity(s):
            return m * deltas[index(s)]

        return cls(func, velocity, breakpoints=np.arange(1, m) / m)

    @classmethod
    def circle(cls, center, radius: float, start_angle: float = 0.0, turns: float = 1.0) -> "Path":
        """Counter-clockwise circular arc of ``turns`` revolutions in the first two coordinates."""
        c = as_point(center)
        if c.size < 2:
            raise DimensionError("a circle needs at least two coordinates")
        sweep = 2 * np.pi * turns

        def func(s):
            a = start_angle + sweep * s
            out = np.broadcast_to(c, (s.size, c.size)).copy()
            out[:, 0] += radius * np.cos(a)
            out[:, 1] += radius * np.sin(a)
            return out

        def velocity(s):
            a = start_angle + sweep * s
            out = np.zeros((s.size, c.size))
            out[:, 0] = -radius * sweep * np.sin(a)
            out[:, 1] = radius * sweep * np.cos(a)
            return out

        return cls(func, velocity)

    def reparameterize(self, phi: Callable, dphi: Callable, breakpoints: Sequence[float] = ()) -> "Path":
        """The same curve traversed as ``p(phi(s))``; ``phi`` must map [0,1] onto [0,1].

        ``breakpoints`` are the new parameters of any corners of ``self``.
        """

        def func(s):
            return self(np.asarray(phi(s), dtype=float))

        def velocity(s):
            return self.velocity(np.asarray(phi(s), dtype=float)) * np.asarray(dphi(s))[:, None]

        return Path(func, velocity, breakpoints)

    def concat(self, other: "Path") -> "Path":
        """Traverse ``self`` on [0, 1/2] and ``other`` on [1/2, 1]."""
        if other.dim != self.dim:
            raise DimensionError("cannot concatenate paths of different dimension")

        def split(s, fa, fb, scale):
            first = s <= 0.5
            out = np.empty((s.size, self.dim))
            if first.any():
                out[first] = scale * fa(2 * s[first])
            if (~first).any():
                out[~first] = scale * fb(2 * s[~first] - 1)
            return out

        bps = [b / 2 for b in self.breakpoints] + [0.5] + [0.5 + b / 2 for b in other.breakpoints]
        return Path(
            lambda s: split(s, self, other, 1.0),
            lambda s: split(s, self.velocity, other.velocity, 2.0),
            breakpoints=bps,
        )
