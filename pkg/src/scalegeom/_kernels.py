"""Hot numeric kernels, each in a vectorized numpy form and a numba loop form.

The public names at the bottom dispatch to one of the two according to
``_accel.USE_NUMBA``.  Both forms of a kernel run the same algorithm (same
panels, same acceptance tests) and agree to rounding.

hole integral
    ``integral exp(k (1/(1-z) - 1)) dz`` over ``[z0, z1]`` in log space,
    for ``k > 0`` after the substitution ``u = 1/(1-z)``.
scaled polyline length
    ``sum_k exp(theta(m_k) - theta_ref) |n_{k+1} - n_k|`` and its gradient
    with respect to every node.
"""
from __future__ import annotations

import math

import numpy as np

from . import _accel
from .quadrature import GAUSS7_NODES, GAUSS7_WEIGHTS, GAUSS15_NODES, GAUSS15_WEIGHTS

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_DEPTH = 2

BACKENDS = ("numba", "numpy")

NEG_INF = -np.inf


# -- hole integral: numpy form -------------------------------------------------

def _hole_log_f_np(k, t, use_u):
    if use_u:
        return k * (t - 1.0) - 2.0 * np.log(t)
    with np.errstate(divide="ignore"):
        return k * (1.0 / (1.0 - t) - 1.0)


def _panel_log_rule_np(logs, weights, half):
    m = np.max(logs, axis=1)
    finite = np.isfinite(m)
    safe_m = np.where(finite, m, 0.0)
    s = np.exp(logs - safe_m[:, None]) @ weights
    with np.errstate(divide="ignore"):
        out = safe_m + np.log(s) + np.log(half)
    return np.where(finite, out, NEG_INF)


def _logsumexp_np(a):
    if a.size == 0:
        return NEG_INF
    m = np.max(a)
    if not np.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(a - m))))


def hole_log_integral_numpy(k, lo, hi, use_u, rel_tol, abs_tol, max_depth, log_threshold):
    width = hi - lo
    plo = np.array([lo], dtype=float)
    phi = np.array([hi], dtype=float)
    acc_lo, acc_l, acc_e = [], [], []
    evaluations = 0
    depth = 0
    log_abs_scale = math.log(abs_tol / width)
    while plo.size:
        mid = 0.5 * (plo + phi)
        half = 0.5 * (phi - plo)
        l15 = _panel_log_rule_np(
            _hole_log_f_np(k, mid[:, None] + half[:, None] * GAUSS15_NODES, use_u), GAUSS15_WEIGHTS, half
        )
        l7 = _panel_log_rule_np(
            _hole_log_f_np(k, mid[:, None] + half[:, None] * GAUSS7_NODES, use_u), GAUSS7_WEIGHTS, half
        )
        evaluations += 22 * plo.size
        both_zero = np.isneginf(l15) & np.isneginf(l7)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            delta = np.where(both_zero, 0.0, l7 - l15)
            rel = np.abs(np.expm1(delta))
            top = np.maximum(l15, l7)
            lerr = np.where(both_zero, NEG_INF, top + np.log(-np.expm1(-np.abs(delta))))
            ok = (rel <= rel_tol) | (lerr <= log_abs_scale + np.log(2.0 * half))
        ok = ok | both_zero
        if ok.any():
            acc_lo.append(plo[ok])
            acc_l.append(l15[ok])
            acc_e.append(lerr[ok])
        total = _logsumexp_np(np.concatenate(acc_l + [l15[~ok]]))
        if total > log_threshold:
            return math.inf, math.inf, evaluations, STATUS_DIVERGED
        if ok.all():
            break
        depth += 1
        if depth > max_depth:
            return NEG_INF, NEG_INF, evaluations, STATUS_DEPTH
        rlo = plo[~ok]
        rhi = phi[~ok]
        rmid = 0.5 * (rlo + rhi)
        plo = np.concatenate([rlo, rmid])
        phi = np.concatenate([rmid, rhi])
    all_lo = np.concatenate(acc_lo)
    order = np.argsort(all_lo, kind="mergesort")
    return (
        _seq_logsumexp(np.concatenate(acc_l)[order]),
        _seq_logsumexp(np.concatenate(acc_e)[order]),
        evaluations,
        STATUS_OK,
    )


def _seq_logsumexp(a):
    """Log-sum-exp with a plain left-to-right sum (shared by both kernel forms)."""
    if a.size == 0:
        return NEG_INF
    m = a[0]
    for v in a:
        if v > m:
            m = v
    if not np.isfinite(m):
        return m
    s = 0.0
    for v in a:
        s += math.exp(v - m)
    return m + math.log(s)


# -- hole integral: numba form ---------------------------------------------------

def _hole_log_f_scalar(k, t, use_u):
    if use_u:
        return k * (t - 1.0) - 2.0 * math.log(t)
    d = 1.0 - t
    if d <= 0.0:
        return -np.inf if k < 0 else (np.inf if k > 0 else 0.0)
    return k * (1.0 / d - 1.0)


def _panel_log_rule_scalar(k, mid, half, nodes, weights, use_u):
    n = nodes.size
    logs = np.empty(n)
    m = -np.inf
    for j in range(n):
        logs[j] = _hole_log_f_scalar(k, mid + half * nodes[j], use_u)
        if logs[j] > m:
            m = logs[j]
    if not np.isfinite(m):
        return -np.inf
    s = 0.0
    for j in range(n):
        s += weights[j] * math.exp(logs[j] - m)
    return m + math.log(s) + math.log(half)


def hole_log_integral_loops(k, lo, hi, use_u, rel_tol, abs_tol, max_depth, log_threshold,
                            x15, w15, x7, w7):
    width = hi - lo
    log_abs_scale = math.log(abs_tol / width)
    plo = np.empty(1)
    phi = np.empty(1)
    plo[0] = lo
    phi[0] = hi
    cap = 64
    acc_lo = np.empty(cap)
    acc_l = np.empty(cap)
    acc_e = np.empty(cap)
    n_acc = 0
    evaluations = 0
    depth = 0
    while plo.size > 0:
        n = plo.size
        ok = np.zeros(n, dtype=np.bool_)
        l15s = np.empty(n)
        n_rej = 0
        for i in range(n):
            mid = 0.5 * (plo[i] + phi[i])
            half = 0.5 * (phi[i] - plo[i])
            l15 = _panel_log_rule_scalar(k, mid, half, x15, w15, use_u)
            l7 = _panel_log_rule_scalar(k, mid, half, x7, w7, use_u)
            l15s[i] = l15
            if l15 == -np.inf and l7 == -np.inf:
                accepted = True
                lerr = -np.inf
            else:
                delta = l7 - l15
                rel = abs(math.expm1(delta))
                top = max(l15, l7)
                ad = abs(delta)
                lerr = top + math.log(-math.expm1(-ad)) if ad > 0 else -np.inf
                accepted = rel <= rel_tol or lerr <= log_abs_scale + math.log(2.0 * half)
            if accepted:
                ok[i] = True
                if n_acc == cap:
                    cap *= 2
                    acc_lo = np.concatenate((acc_lo, np.empty(cap - n_acc)))
                    acc_l = np.concatenate((acc_l, np.empty(cap - n_acc)))
                    acc_e = np.concatenate((acc_e, np.empty(cap - n_acc)))
                acc_lo[n_acc] = plo[i]
                acc_l[n_acc] = l15
                acc_e[n_acc] = lerr
                n_acc += 1
            else:
                n_rej += 1
        evaluations += 22 * n
        pool = np.empty(n_acc + n_rej)
        pool[:n_acc] = acc_l[:n_acc]
        j = n_acc
        for i in range(n):
            if not ok[i]:
                pool[j] = l15s[i]
                j += 1
        m = -np.inf
        for v in pool:
            if v > m:
                m = v
        total = m
        if np.isfinite(m):
            s = 0.0
            for v in pool:
                s += math.exp(v - m)
            total = m + math.log(s)
        if total > log_threshold:
            return np.inf, np.inf, evaluations, 1
        if n_rej == 0:
            break
        depth += 1
        if depth > max_depth:
            return -np.inf, -np.inf, evaluations, 2
        nlo = np.empty(2 * n_rej)
        nhi = np.empty(2 * n_rej)
        j = 0
        for i in range(n):
            if not ok[i]:
                mid = 0.5 * (plo[i] + phi[i])
                nlo[j] = plo[i]
                nhi[j] = mid
                nlo[n_rej + j] = mid
                nhi[n_rej + j] = phi[i]
                j += 1
        plo = nlo
        phi = nhi
    order = np.argsort(acc_lo[:n_acc], kind="mergesort")
    return (
        _seq_logsumexp_loops(acc_l[:n_acc][order]),
        _seq_logsumexp_loops(acc_e[:n_acc][order]),
        evaluations,
        0,
    )


def _seq_logsumexp_loops(a):
    if a.size == 0:
        return -np.inf
    m = a[0]
    for v in a:
        if v > m:
            m = v
    if not np.isfinite(m):
        return m
    s = 0.0
    for v in a:
        s += math.exp(v - m)
    return m + math.log(s)


# -- scaled polyline length and gradient -------------------------------------------

def scaled_polyline_numpy(nodes, theta_mid, grad_mid, theta_ref):
    d = np.diff(nodes, axis=0)
    seg = np.sqrt(np.sum(d * d, axis=1))
    w = np.exp(theta_mid - theta_ref)
    value = float(np.sum(w * seg))
    tangent = d / seg[:, None]
    shared = 0.5 * (w * seg)[:, None] * grad_mid
    pull = w[:, None] * tangent
    grad = np.zeros_like(nodes)
    grad[:-1] += shared - pull
    grad[1:] += shared + pull
    return value, grad


def scaled_polyline_loops(nodes, theta_mid, grad_mid, theta_ref):
    n_seg = nodes.shape[0] - 1
    dim = nodes.shape[1]
    grad = np.zeros_like(nodes)
    value = 0.0
    for k in range(n_seg):
        seg2 = 0.0
        for i in range(dim):
            di = nodes[k + 1, i] - nodes[k, i]
            seg2 += di * di
        seg = math.sqrt(seg2)
        w = math.exp(theta_mid[k] - theta_ref)
        value += w * seg
        for i in range(dim):
            shared = 0.5 * w * seg * grad_mid[k, i]
            pull = w * (nodes[k + 1, i] - nodes[k, i]) / seg
            grad[k, i] += shared - pull
            grad[k + 1, i] += shared + pull
    return value, grad


# -- dispatch -------------------------------------------------------------------------

if _accel.NUMBA_AVAILABLE:
    _hole_log_f_scalar = _accel.njit(_hole_log_f_scalar)
    _panel_log_rule_scalar = _accel.njit(_panel_log_rule_scalar)
    _seq_logsumexp_loops = _accel.njit(_seq_logsumexp_loops)
    hole_log_integral_jit = _accel.njit(hole_log_integral_loops)
    scaled_polyline_jit = _accel.njit(scaled_polyline_loops)
else:  # pragma: no cover
    hole_log_integral_jit = None
    scaled_polyline_jit = None


def hole_log_integral(k, lo, hi, use_u, rel_tol, abs_tol, max_depth, log_threshold, backend=None):
    """Return ``(log_value, log_error, evaluations, status)``."""
    if _use_numba(backend):
        return hole_log_integral_jit(
            float(k), float(lo), float(hi), bool(use_u), float(rel_tol), float(abs_tol),
            int(max_depth), float(log_threshold),
            GAUSS15_NODES, GAUSS15_WEIGHTS, GAUSS7_NODES, GAUSS7_WEIGHTS,
        )
    return hole_log_integral_numpy(k, lo, hi, use_u, rel_tol, abs_tol, max_depth, log_threshold)


def scaled_polyline(nodes, theta_mid, grad_mid, theta_ref, backend=None):
    """Return ``(value, gradient)`` of the midpoint-scaled polyline length."""
    if _use_numba(backend):
        return scaled_polyline_jit(
            np.ascontiguousarray(nodes, dtype=np.float64),
            np.ascontiguousarray(theta_mid, dtype=np.float64),
            np.ascontiguousarray(grad_mid, dtype=np.float64),
            float(theta_ref),
        )
    return scaled_polyline_numpy(nodes, theta_mid, grad_mid, theta_ref)


def _use_numba(backend):
    if backend is None:
        return _accel.USE_NUMBA
    if backend == "numba":
        if not _accel.NUMBA_AVAILABLE:
            raise RuntimeError("numba is not installed")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")
