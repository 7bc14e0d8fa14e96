"""Scaled distances by direct minimization of the discretized scaled length.

The objective is the midpoint-weighted polyline length

    sum_k exp(theta(m_k) - theta(ref)) |n_{k+1} - n_k|,   m_k = (n_k + n_{k+1}) / 2

minimized over the interior nodes with the endpoints pinned.  Steps follow
the negative gradient with a Barzilai-Borwein trial length and an Armijo
backtracking search, so accepted iterates never increase the objective.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, DimensionError
from .fields import ScalarField
from .paths import as_point


@dataclass(frozen=True)
class OptimizerOptions:
    nodes: int = 64
    max_iterations: int = 10000
    gradient_tolerance: float = 1e-9
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        if self.nodes < 4:
            raise ValueError("need at least 4 segments")
        if not (self.gradient_tolerance > 0 and self.max_iterations > 0):
            raise ValueError("tolerances and iteration counts must be positive")
        if not (0 < self.shrink < 1 and 0 < self.sufficient_decrease < 1):
            raise ValueError("backtracking parameters must lie in (0, 1)")


class DiscretePath:
    """Nodes ``n_0 .. n_N`` at the implicit parameters ``s_k = k / N``."""

    def __init__(self, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[0] < 2:
            raise DimensionError("a discrete path needs at least two nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("nodes must be finite")
        if np.any(np.linalg.norm(np.diff(nodes, axis=0), axis=1) == 0):
            raise ValueError("consecutive nodes must be distinct")
        nodes.setflags(write=False)
        self.nodes = nodes

    @classmethod
    def chord(cls, x, y, n: int) -> "DiscretePath":
        x = as_point(x)
        y = as_point(y, x.size)
        s = np.arange(n + 1) / n
        nodes = x + s[:, None] * (y - x)
        nodes[-1] = y
        return cls(nodes)

    @property
    def n_segments(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    def euclidean_length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.nodes, axis=0), axis=1)))

    def __len__(self):
        return self.nodes.shape[0]


def _objective(nodes, f: ScalarField, theta_ref: float, backend=None):
    if not np.all(np.any(nodes[1:] != nodes[:-1], axis=1)):
        raise DomainError("consecutive nodes coincide")
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    return _kernels.scaled_polyline(nodes, f(mid), f.gradient(mid), theta_ref, backend=backend)


def discrete_scaled_length(dp: DiscretePath, f: ScalarField, ref) -> float:
    mid = dp.midpoints
    seg = np.linalg.norm(np.diff(dp.nodes, axis=0), axis=1)
    return float(np.sum(np.exp(f(mid) - f(as_point(ref))) * seg))


def discrete_scaled_length_gradient(dp: DiscretePath, f: ScalarField, ref, backend=None) -> np.ndarray:
    """Gradient of :func:`discrete_scaled_length` with respect to every node."""
    return _objective(dp.nodes, f, f(as_point(ref)), backend)[1]


@dataclass
class OptimizationResult:
    path: DiscretePath
    value: float
    gradient_norm: float
    iterations: int
    history: list = field(default_factory=list)


def _initial_nodes(x, y, f: ScalarField, n: int, theta_ref: float):
    """Straight chord; if it crosses a singularity, bow it out deterministically."""
    chord = DiscretePath.chord(x, y, n).nodes.copy()
    if _feasible(chord, f, theta_ref):
        return chord
    d = y - x
    perp = np.zeros_like(d)
    # first coordinate axis not parallel to the chord
    for i in range(d.size):
        e = np.zeros_like(d)
        e[i] = 1.0
        cand = e - np.dot(e, d) / np.dot(d, d) * d
        if np.linalg.norm(cand) > 1e-8:
            perp = cand / np.linalg.norm(cand)
            break
    s = np.arange(n + 1) / n
    bump = np.sin(np.pi * s)
    bump[0] = bump[-1] = 0.0
    length = np.linalg.norm(d)
    for amp in (0.25, 0.5, 1.0, 2.0):
        trial = chord + amp * length * bump[:, None] * perp
        if _feasible(trial, f, theta_ref):
            return trial
    raise DomainError("could not find a feasible initial path around the field singularities")


def _feasible(nodes, f: ScalarField, theta_ref: float) -> bool:
    if f.clamp_violation(nodes[1:-1]):
        return False
    try:
        value, grad = _objective(nodes, f, theta_ref)
    except DomainError:
        return False
    return math.isfinite(value) and bool(np.all(np.isfinite(grad)))


ROUNDING_SLACK = 64 * np.finfo(float).eps
# A pass ends early once some segment has shrunk to this fraction of its
# length at the start of the pass.
FRAME_REFRESH_SHRINK = 0.5


def _segment_lengths(nodes):
    return np.linalg.norm(np.diff(nodes, axis=0), axis=1)


def redistributed(nodes: np.ndarray) -> np.ndarray:
    """Nodes moved to equal arc-length spacing along the current polyline.

    The new polyline has its vertices on the old one, so it is never longer
    in the Euclidean sense.
    """
    arc = np.concatenate(([0.0], np.cumsum(_segment_lengths(nodes))))
    target = np.linspace(0.0, arc[-1], nodes.shape[0])
    out = np.stack([np.interp(target, arc, nodes[:, i]) for i in range(nodes.shape[1])], axis=1)
    out[0], out[-1] = nodes[0], nodes[-1]
    return out


def tangents(nodes: np.ndarray) -> np.ndarray:
    """Unit tangents at the interior nodes from the neighbouring nodes."""
    t = nodes[2:] - nodes[:-2]
    return t / np.linalg.norm(t, axis=1)[:, None]


def normal_gradient(grad: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """``grad`` with endpoints zeroed and the components along ``frame`` removed.

    ``frame`` holds one unit tangent per interior node.  Sliding nodes along
    the path only re-parameterizes it, and the midpoint rule rewards uneven
    spacing there, so that direction is excluded from descent and from the
    stationarity test.
    """
    out = np.zeros_like(grad)
    g = grad[1:-1]
    out[1:-1] = g - np.sum(g * frame, axis=1)[:, None] * frame
    return out


def _stiffness_inverse(n_interior: int) -> np.ndarray:
    k = 2.0 * np.eye(n_interior) - np.eye(n_interior, k=1) - np.eye(n_interior, k=-1)
    return np.linalg.inv(k)


def _stiffness_apply(v: np.ndarray) -> np.ndarray:
    out = 2.0 * v
    out[1:] -= v[:-1]
    out[:-1] -= v[1:]
    return out


class _Descent:
    """Mutable state of one optimization run."""

    def __init__(self, nodes, f, theta_ref, opts, backend):
        self.f, self.theta_ref, self.opts, self.backend = f, theta_ref, opts, backend
        self.nodes = nodes
        self.value, self.grad = _objective(nodes, f, theta_ref, backend)
        self.k_inv = _stiffness_inverse(nodes.shape[0] - 2)
        self.history = [self.value]
        self.iterations = 0
        self.clamped = False
        seg = np.linalg.norm(np.diff(nodes, axis=0), axis=1)
        # Inverse string tension: segment length over weight per unit length.
        self.initial_step = float(np.sum(seg)) / (self.value * (nodes.shape[0] - 1))

    def evaluate(self, trial):
        if self.f.clamp_violation(trial[1:-1]):
            self.clamped = True
            return math.inf, None
        try:
            return _objective(trial, self.f, self.theta_ref, self.backend)
        except DomainError:
            return math.inf, None

    def respace(self) -> bool:
        """Replace the nodes by :func:`redistributed` ones unless that raises the objective."""
        trial = redistributed(self.nodes)
        t_value, t_grad = self.evaluate(trial)
        if not t_value <= self.value + ROUNDING_SLACK * abs(self.value):
            return False
        self.iterations += 1
        self.nodes, self.value, self.grad = trial, t_value, t_grad
        self.history.append(t_value)
        return True

    def _settle(self, trial, t_value, t_grad, step, direction, slope, frame, slack):
        """Secant step on the directional derivative, for when values are all rounding.

        Falls back to ``trial`` unless the secant point has a smaller normal gradient.
        """
        t_slope = float(np.sum(direction * t_grad))
        if t_slope <= slope:
            return trial, t_value, t_grad
        alt = self.nodes + (step * slope / (slope - t_slope)) * direction
        a_value, a_grad = self.evaluate(alt)
        if not a_value <= self.value + slack:
            return trial, t_value, t_grad
        if np.linalg.norm(normal_gradient(a_grad, frame)) < np.linalg.norm(normal_gradient(t_grad, frame)):
            return alt, a_value, a_grad
        return trial, t_value, t_grad

    def fail(self, message):
        if self.clamped:
            raise DomainError(message + "; steps were blocked at a field singularity")
        raise ConvergenceError(message)

    def run_pass(self, frame):
        """Descend with the tangent frame frozen.

        Returns ``(gradient_norm, stale)``.  Nodes slide along fixed normal
        lines, which converge on the concave side of a bend; ``stale`` means a
        segment has shrunk enough that the pass stopped for a fresh frame.
        """
        opts = self.opts
        seg0 = _segment_lengths(self.nodes)
        pg = normal_gradient(self.grad, frame)
        gnorm = float(np.linalg.norm(pg))
        step = self.initial_step
        prev = None
        while gnorm > opts.gradient_tolerance:
            if self.iterations >= opts.max_iterations:
                self.fail(f"gradient norm {gnorm:.3e} above tolerance after {opts.max_iterations} iterations")
            self.iterations += 1
            direction = np.zeros_like(self.nodes)
            direction[1:-1] = self.k_inv @ pg[1:-1]
            direction = -normal_gradient(direction, frame)
            slope = float(np.sum(direction * self.grad))
            if prev is not None:
                s_vec = self.nodes[1:-1] - prev[0][1:-1]
                sy = float(np.sum(s_vec * (pg[1:-1] - prev[1][1:-1])))
                if sy > 0:
                    step = float(np.sum(s_vec * _stiffness_apply(s_vec))) / sy
            for _ in range(opts.max_backtracks):
                trial = self.nodes + step * direction
                t_value, t_grad = self.evaluate(trial)
                if math.isfinite(t_value):
                    required = -opts.sufficient_decrease * step * slope
                    if t_value <= self.value - required:
                        break
                    # Below the rounding level of the objective neither the Armijo
                    # margin nor the sign of the change can be measured; settle for
                    # a smaller gradient and no increase beyond rounding.
                    slack = ROUNDING_SLACK * abs(self.value)
                    if required <= slack and t_value <= self.value + slack:
                        trial, t_value, t_grad = self._settle(trial, t_value, t_grad, step, direction,
                                                              slope, frame, slack)
                        if np.linalg.norm(normal_gradient(t_grad, frame)) < gnorm:
                            break
                step *= opts.shrink
            else:
                return gnorm, False
            prev = (self.nodes, pg)
            self.nodes, self.value, self.grad = trial, t_value, t_grad
            self.history.append(t_value)
            pg = normal_gradient(self.grad, frame)
            gnorm = float(np.linalg.norm(pg))
            if np.min(_segment_lengths(self.nodes) / seg0) < FRAME_REFRESH_SHRINK:
                return gnorm, True
        return gnorm, False


def minimize_scaled_length(x, y, f: ScalarField, opts: OptimizerOptions | None = None,
                           initial: DiscretePath | None = None, backend=None) -> OptimizationResult:
    """Minimize the discrete scaled length between fixed endpoints ``x`` and ``y``.

    Each pass freezes the interior tangents and descends on the normal part of
    the gradient.  Steps are preconditioned by the discrete string stiffness
    ``tridiag(-1, 2, -1)`` and sized by Barzilai-Borwein with Armijo
    backtracking.  A pass whose nodes start to bunch up ends early, and the
    nodes are respaced along the path when that does not raise the objective.
    The run has converged once the normal gradient, measured against the
    tangents of the final path, is at most ``gradient_tolerance``.
    """
    opts = opts or OptimizerOptions()
    x = as_point(x)
    y = as_point(y, x.size)
    if np.array_equal(x, y):
        raise ValueError("endpoints must differ")
    theta_ref = f(x)
    if initial is not None:
        nodes = initial.nodes.copy()
        if not (np.array_equal(nodes[0], x) and np.array_equal(nodes[-1], y)):
            raise ValueError("initial path endpoints do not match x and y")
    else:
        nodes = _initial_nodes(x, y, f, opts.nodes, theta_ref)

    state = _Descent(nodes, f, theta_ref, opts, backend)
    while True:
        frame = tangents(state.nodes)
        gnorm = float(np.linalg.norm(normal_gradient(state.grad, frame)))
        if gnorm <= opts.gradient_tolerance:
            break
        pass_norm, stale = state.run_pass(frame)
        if stale:
            state.respace()
        elif pass_norm > opts.gradient_tolerance:
            state.fail(f"line search stalled at gradient norm {pass_norm:.3e} after {state.iterations} iterations")
    return OptimizationResult(DiscretePath(state.nodes), state.value, gnorm, state.iterations, state.history)


def distance_scaled(x, y, f: ScalarField, opts: OptimizerOptions | None = None, backend=None) -> float:
    """Scaled distance from ``x`` to ``y`` referenced to ``x``."""
    res = minimize_scaled_length(x, y, f, opts, backend=backend)
    return discrete_scaled_length(res.path, f, x)


def el_residual(dp: DiscretePath, f: ScalarField) -> np.ndarray:
    """Euler-Lagrange residual at every interior node.

    With ``T = p'/|p'|`` the residual is
    ``grad(theta)|p'| - (d theta/ds) T - dT/ds``, all ``s`` derivatives by
    central differences on the ``s_k = k/N`` grid.
    """
    nodes = dp.nodes
    n = dp.n_segments
    h = 1.0 / n
    interior = nodes[1:-1]
    theta = f(nodes[2:]) - f(nodes[:-2]) if n >= 2 else np.zeros(0)
    dtheta = theta / (2 * h)
    dp_ds = (nodes[2:] - nodes[:-2]) / (2 * h)
    speed = np.linalg.norm(dp_ds, axis=1)
    tangent_node = dp_ds / speed[:, None]
    seg = np.diff(nodes, axis=0)
    tangent_half = seg / np.linalg.norm(seg, axis=1)[:, None]
    dT = (tangent_half[1:] - tangent_half[:-1]) / h
    lhs = f.gradient(interior) * speed[:, None] - dtheta[:, None] * tangent_node
    return lhs - dT
