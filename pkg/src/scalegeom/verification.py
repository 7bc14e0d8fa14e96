"""Property suites behind ``scalegeom verify``.

Every suite takes a ``numpy.random.Generator`` and raises ``AssertionError``
on failure; the return value is a short summary for the report line.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import cosmology, dynamics, geodesics, geometry, holes, oracles
from .errors import DomainError
from .fields import (
    SINGULAR_RADIUS,
    VectorField,
    FieldCatalogEntry,
    constant_field,
    cosmological_field,
    linear_field,
    make_field,
    radial_field,
    rotational_field,
    scale_factor_gradient,
    scale_factor_path,
)
from .paths import Path
from .quadrature import QuadratureOptions, integrate
from .scaled_numbers import (
    ScaledStructure,
    ScaledVectorSpace,
    TransportMap,
    check_equation_invariance,
    correspond,
    scaled_add,
    scaled_div,
    scaled_inner,
    scaled_mul,
    scaled_vector_scale,
)

AXIOM_CASES = 10_000
ALGEBRA_RTOL = 1e-12


@dataclass(frozen=True)
class Suite:
    name: str
    func: Callable[[np.random.Generator], str]

    @property
    def module(self) -> str:
        return self.name.split(".", 1)[0]


REGISTRY: dict[str, Suite] = {}


def suite(name: str):
    def register(func):
        if name in REGISTRY:
            raise ValueError(f"duplicate suite {name}")
        REGISTRY[name] = Suite(name, func)
        return func

    return register


@dataclass(frozen=True)
class SuiteOutcome:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def run_suite(s: Suite, seed: int) -> SuiteOutcome:
    rng = np.random.default_rng([seed, _stable_hash(s.name)])
    try:
        detail = s.func(rng)
    except AssertionError as exc:
        return SuiteOutcome(s.name, False, str(exc) or "assertion failed")
    except Exception as exc:  # a crash is a failure of the property, reported by name
        return SuiteOutcome(s.name, False, f"{type(exc).__name__}: {exc}")
    return SuiteOutcome(s.name, True, detail)


def run_all(seed: int = 42, names=None) -> list[SuiteOutcome]:
    chosen = REGISTRY.values() if names is None else [REGISTRY[n] for n in names]
    return [run_suite(s, seed) for s in chosen]


def _stable_hash(name: str) -> int:
    # per-suite stream that does not depend on PYTHONHASHSEED
    return int.from_bytes(name.encode("ascii"), "little") % (2**63)


def _close(a, b, rtol, what=""):
    a = np.asarray(a)
    b = np.asarray(b)
    err = np.abs(a - b)
    bad = err > rtol * np.abs(b)
    if np.any(bad):
        i = np.flatnonzero(np.ravel(bad))[0]
        raise AssertionError(f"{what}: {np.ravel(a)[i]!r} vs {np.ravel(b)[i]!r} (rtol {rtol:g})")
    return float(np.max(err / np.maximum(np.abs(b), np.finfo(float).tiny), initial=0.0))


def _magnitudes(rng, n):
    """Signed values with magnitudes log-uniform in [1e-6, 1e6]."""
    return rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-6, 6, n)


def _scales(rng, n):
    return 10.0 ** rng.uniform(-3, 3, n)


# -- scaled_numbers -------------------------------------------------------------

@suite("scaled_numbers.field_axioms")
def _field_axioms(rng):
    n = AXIOM_CASES
    a, b, c = (_magnitudes(rng, n) for _ in range(3))
    r = _scales(rng, n)
    s = [ScaledStructure(float(x)) for x in r]
    mul = np.array([scaled_mul(x, y, st) for x, y, st in zip(a, b, s)])
    _close([scaled_mul(scaled_mul(x, y, st), z, st) for x, y, z, st in zip(a, b, c, s)],
           [scaled_mul(x, scaled_mul(y, z, st), st) for x, y, z, st in zip(a, b, c, s)],
           ALGEBRA_RTOL, "associativity")
    _close(mul, [scaled_mul(y, x, st) for x, y, st in zip(a, b, s)], ALGEBRA_RTOL, "commutativity")
    _close([scaled_mul(x, st.one, st) for x, st in zip(a, s)], a, ALGEBRA_RTOL, "identity r")
    _close([scaled_div(m, y, st) for m, y, st in zip(mul, b, s)], a, ALGEBRA_RTOL, "inverse")
    _close([scaled_mul(x, scaled_div(st.one, x, st), st) for x, st in zip(a, s)], r, ALGEBRA_RTOL,
           "reciprocal")
    # The sum b + c may cancel, so distributivity is measured against the size of the terms.
    lhs = np.array([scaled_mul(x, scaled_add(y, z, st), st) for x, y, z, st in zip(a, b, c, s)])
    t1 = np.array([scaled_mul(x, y, st) for x, y, st in zip(a, b, s)])
    t2 = np.array([scaled_mul(x, z, st) for x, z, st in zip(a, c, s)])
    dist_err = np.abs(lhs - (t1 + t2)) / (np.abs(t1) + np.abs(t2))
    assert np.all(dist_err <= ALGEBRA_RTOL), f"distributivity error {dist_err.max():.3g}"
    return f"{n} cases x 6 axioms"


@suite("scaled_numbers.zero_invariance")
def _zero_invariance(rng):
    for r in _scales(rng, 1000):
        assert correspond(0.0, ScaledStructure(float(r))) == 0.0
    return "correspond(0) = 0 for 1000 scales"


@suite("scaled_numbers.unscaled_reduction")
def _unscaled_reduction(rng):
    one = ScaledStructure(1.0)
    a, b = _magnitudes(rng, AXIOM_CASES), _magnitudes(rng, AXIOM_CASES)
    for x, y in zip(a, b):
        assert scaled_add(x, y, one) == x + y
        assert scaled_mul(x, y, one) == x * y
        assert scaled_div(x, y, one) == x / y
        assert correspond(x, one) == x
    vs = ScaledVectorSpace(3, 1.0)
    for _ in range(200):
        u, v = rng.normal(size=3), rng.normal(size=3)
        c = float(rng.normal())
        assert np.array_equal(scaled_vector_scale(c, v, vs), c * v)
        assert scaled_inner(u, v, vs) == np.vdot(u, v)
    return "bit-for-bit at r = 1"


@suite("scaled_numbers.square_scaling")
def _square_scaling(rng):
    a, r = _magnitudes(rng, AXIOM_CASES), _scales(rng, AXIOM_CASES)
    for x, sc in zip(a, r):
        s = ScaledStructure(float(sc))
        ra = correspond(x, s)
        _close(scaled_mul(ra, ra, s), correspond(x * x, s), ALGEBRA_RTOL, "square rule")
        _close(correspond(x * x, s), sc * x * x, ALGEBRA_RTOL, "r a^2")
    return f"{AXIOM_CASES} cases"


@suite("scaled_numbers.transport_composition")
def _transport_composition(rng):
    f = linear_field(0.8, (0.3, -0.5, 0.2))
    worst = 0.0
    for _ in range(500):
        x, y, z = rng.uniform(-3, 3, (3, 3))
        yx = TransportMap.from_field(f, x, y)
        zy = TransportMap.from_field(f, y, z)
        zx = TransportMap.from_field(f, x, z)
        worst = max(worst, _close(yx.then(zy).factor, zx.factor, ALGEBRA_RTOL, "composition"))
        a = float(rng.normal())
        _close(zy(yx(a)), zx(a), ALGEBRA_RTOL, "transported value")
    return f"worst rel {worst:.2e}"


@suite("scaled_numbers.scaled_norm")
def _scaled_norm(rng):
    for _ in range(1000):
        dim = int(rng.integers(1, 6))
        r = float(_scales(rng, 1)[0])
        vs = ScaledVectorSpace(dim, r)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        ip = scaled_inner(v, v, vs)
        _close(ip.real, r * np.vdot(v, v).real, ALGEBRA_RTOL, "r |v|^2")
        assert ip.real > 0
    assert scaled_inner(np.zeros(2), np.zeros(2), ScaledVectorSpace(2, 3.0)) == 0
    return "1000 complex vectors"


@suite("scaled_numbers.equation_invariance")
def _equation_invariance(rng):
    n = AXIOM_CASES
    c, g, r = _magnitudes(rng, n), _magnitudes(rng, n), _scales(rng, n)
    bad = [i for i in range(n) if not check_equation_invariance(c[i], g[i], ScaledStructure(float(r[i])))]
    assert not bad, f"{len(bad)} failures, first {c[bad[0]], g[bad[0]], r[bad[0]]}"
    return f"{n} random (c, gamma, r)"


# -- scaling_fields ---------------------------------------------------------------

def gradient_catalog(rng):
    """Random gradient fields paired with a sampler of points inside their regular region."""
    d = rng.normal(size=3)
    t_now = 14e9
    return [
        ("constant", constant_field(float(rng.normal())), lambda k: rng.uniform(-2, 2, (k, 3))),
        ("linear", linear_field(float(rng.uniform(-2, 2)), d), lambda k: rng.uniform(-2, 2, (k, 3))),
        ("radial", radial_field(float(rng.choice([-1, 1]) * rng.uniform(0.2, 2)), (0, 0, 0)),
         lambda k: rng.uniform(0.5, 2.0, (k, 3)) * rng.choice([-1, 1], (k, 3))),
        ("cosmological", cosmological_field(float(rng.uniform(-3, 3)), t_now),
         lambda k: rng.uniform(0.1 * t_now, t_now, (k, 1))),
    ]


def _random_polyline(rng, sampler, x, y, interior: int):
    nodes = np.vstack([x, sampler(interior), y])
    return Path.polyline(nodes)


@suite("scaling_fields.path_independence")
def _path_independence(rng):
    worst = 0.0
    for _ in range(25):
        for name, f, sampler in gradient_catalog(rng):
            x, y = sampler(2)
            A = VectorField.from_scalar(f)
            expected = scale_factor_gradient(f, y, x)
            for _ in range(2):  # a pair of paths per endpoint pair
                p = _random_polyline(rng, sampler, x, y, int(rng.integers(1, 5)))
                worst = max(worst, _close(scale_factor_path(A, p), expected, 1e-8, f"{name} path factor"))
    return f"100 polyline pairs, worst rel {worst:.2e}"


@suite("scaling_fields.loop_triviality")
def _loop_triviality(rng):
    worst = 0.0
    for _ in range(25):
        for name, f, sampler in gradient_catalog(rng):
            x = sampler(1)[0]
            p = _random_polyline(rng, sampler, x, x, int(rng.integers(2, 6)))
            worst = max(worst, _close(scale_factor_path(VectorField.from_scalar(f), p), 1.0, 1e-8, f"{name} loop"))
    return f"100 closed polylines, worst rel {worst:.2e}"


@suite("scaling_fields.multiplicativity")
def _multiplicativity(rng):
    worst = 0.0
    for _ in range(100):
        for name, f, sampler in gradient_catalog(rng):
            x, y, z = sampler(3)
            lhs = scale_factor_gradient(f, z, y) * scale_factor_gradient(f, y, x)
            worst = max(worst, _close(lhs, scale_factor_gradient(f, z, x), ALGEBRA_RTOL, name))
    return f"400 triples, worst rel {worst:.2e}"


@suite("scaling_fields.gradient_consistency")
def _gradient_consistency(rng):
    worst = 0.0
    fields = [
        ("linear", make_field(FieldCatalogEntry("linear", kappa=1.7, direction=(1, 2, -1))),
         lambda k: rng.uniform(-2, 2, (k, 3))),
        ("radial", make_field(FieldCatalogEntry("radial", K=1.3, center=(0.1, 0.0, -0.2))), None),
        ("cosmological", make_field(FieldCatalogEntry("cosmological", alpha=2.0, t_now=14e9)),
         lambda k: rng.uniform(1e6, 14e9, (k, 1))),
        ("constant", make_field(FieldCatalogEntry("constant", value=0.5)), lambda k: rng.uniform(-2, 2, (k, 3))),
    ]
    for name, f, sampler in fields:
        if sampler is None:
            c = np.array([0.1, 0.0, -0.2])
            pts = c + rng.uniform(-2, 2, (400, 3))
            pts = pts[np.linalg.norm(pts - c, axis=1) > 1e-3][:100]
        else:
            pts = sampler(100)
        ga, gf = f.gradient(pts), f.fd_gradient(pts)
        scale = np.maximum(np.linalg.norm(ga, axis=1), np.finfo(float).tiny)
        rel = np.linalg.norm(ga - gf, axis=1) / scale
        rel[np.linalg.norm(ga, axis=1) == 0] = np.linalg.norm(gf, axis=1)[np.linalg.norm(ga, axis=1) == 0]
        assert np.all(rel < 1e-5), f"{name}: relative gradient error {rel.max():.3g}"
        worst = max(worst, float(rel.max()))
    return f"100 points per field, worst rel {worst:.2e}"


@suite("scaling_fields.non_gradient_detection")
def _non_gradient(rng):
    A = rotational_field(1.0)
    factor = scale_factor_path(A, Path.circle((0, 0), 1.0))
    assert abs(factor - 1) > 10, f"loop factor {factor}"
    _close(factor, oracles.rotational_loop_factor(1.0), 1e-6, "Green's theorem")
    _close(factor, oracles.rotational_loop_riemann(1.0), 1e-6, "periodic Riemann sum")
    return f"unit-circle factor {factor:.12g}"


@suite("scaling_fields.singularity_policy")
def _singularity_policy(rng):
    f = radial_field(1.0, (0, 0, 0))
    for d in (0.0, 0.5 * SINGULAR_RADIUS):
        try:
            f(np.array([d, 0.0, 0.0]))
        except DomainError:
            continue
        raise AssertionError(f"no domain error at distance {d}")
    return "domain error inside the singular radius"


# -- geometry -----------------------------------------------------------------------

def _random_smooth_path(rng, dim=3):
    """A random cubic curve with analytic velocity."""
    coef = rng.uniform(-1, 1, (4, dim))

    def func(s):
        s = s[:, None]
        return coef[0] + coef[1] * s + coef[2] * s**2 + coef[3] * s**3

    def vel(s):
        s = s[:, None]
        return coef[1] + 2 * coef[2] * s + 3 * coef[3] * s**2

    return Path(func, vel)


def _smooth_fields(rng):
    return [
        linear_field(float(rng.uniform(-2, 2)), rng.normal(size=3)),
        radial_field(float(rng.uniform(-1, 1)), (5.0, 5.0, 5.0)),
    ]


@suite("geometry.reference_change")
def _reference_change(rng):
    worst = 0.0
    for _ in range(50):
        for f in _smooth_fields(rng):
            p = _random_smooth_path(rng)
            x, z = rng.uniform(-1, 1, (2, 3))
            at_x = geometry.path_length_scaled(p, f, x).value
            at_z = geometry.path_length_scaled(p, f, z).value
            worst = max(worst, _close(geometry.reference_change(at_x, f, x, z), at_z, 1e-12, "reference change"))
    return f"100 field/path pairs, worst rel {worst:.2e}"


@suite("geometry.external_factor_separability")
def _separability(rng):
    worst = 0.0
    for _ in range(50):
        f = linear_field(float(rng.uniform(-2, 2)), rng.normal(size=3))
        p = _random_smooth_path(rng)
        ref = rng.uniform(-1, 1, 3)
        base = geometry.path_length_scaled(p, f, np.zeros(3)).value  # theta(0) = 0
        lhs = geometry.path_length_scaled(p, f, ref).value
        worst = max(worst, _close(lhs, math.exp(-f(ref)) * base, 1e-12, "external factor"))
    return f"50 paths, worst rel {worst:.2e}"


@suite("geometry.reparameterization_invariance")
def _reparam(rng):
    worst = 0.0
    for _ in range(20):
        p = _random_smooth_path(rng)
        f = _smooth_fields(rng)[0]
        a = float(rng.uniform(0.1, 0.9))
        # phi(s) = s + a s (1 - s) / 2 is monotone on [0, 1] for |a| < 2
        q = p.reparameterize(lambda s: s + 0.5 * a * s * (1 - s), lambda s: 1 + 0.5 * a * (1 - 2 * s))
        r2 = p.reparameterize(lambda s: s * s, lambda s: 2 * s)
        for other in (q, r2):
            worst = max(worst, _close(geometry.path_length(other).value, geometry.path_length(p).value, 1e-9, "unscaled"))
            worst = max(worst, _close(geometry.path_length_scaled(other, f, p.start).value,
                                      geometry.path_length_scaled(p, f, p.start).value, 1e-9, "scaled"))
    return f"40 reparameterizations, worst rel {worst:.2e}"


@suite("geometry.additivity")
def _additivity(rng):
    worst = 0.0
    for _ in range(30):
        f = _smooth_fields(rng)[int(rng.integers(2))]
        p1 = _random_smooth_path(rng)
        p2 = _random_smooth_path(rng)
        shift = p1.end - p2.start
        p2 = Path(lambda s, p2=p2: p2(s) + shift, lambda s, p2=p2: p2.velocity(s))
        ref = rng.uniform(-1, 1, 3)
        total = geometry.path_length_scaled(p1.concat(p2), f, ref).value
        parts = geometry.path_length_scaled(p1, f, ref).value + geometry.path_length_scaled(p2, f, ref).value
        worst = max(worst, _close(total, parts, 1e-10, "concatenation"))
    return f"30 concatenations, worst rel {worst:.2e}"


@suite("geometry.monotone_divergence")
def _monotone_divergence(rng):
    h = holes.HoleProfile(1.0, 1.0)
    f = h.field()
    x = h.reference_point()
    prev = -1.0
    for w in np.linspace(0.0, 0.95, 20):
        val = geometry.path_length_scaled(h.radial_path(w), f, x).value if w > 0 else 0.0
        assert val >= prev, f"partial length decreased at w={w}"
        prev = val
    full = geometry.path_length_scaled(h.radial_path(1.0), f, x)
    assert full.diverged, f"full radius gave {full.value}"
    return "nondecreasing to w = 0.95, DIVERGED at w = 1"


def quadrature_cases():
    """(label, f, a, b, exact) with closed-form integrals."""
    return [
        ("x^2", lambda x: x**2, 0.0, 1.0, 1 / 3),
        ("x^7", lambda x: x**7, -1.0, 2.0, (2**8 - 1) / 8),
        ("exp", np.exp, 0.0, 1.0, math.e - 1),
        ("exp(-x)", lambda x: np.exp(-x), 0.0, 30.0, -math.expm1(-30.0)),
        ("sin", np.sin, 0.0, math.pi, 2.0),
        ("cos^2", lambda x: np.cos(x) ** 2, 0.0, 2 * math.pi, math.pi),
        ("sin 10x", lambda x: np.sin(10 * x), 0.0, 1.0, (1 - math.cos(10)) / 10),
        ("1/(1+x^2)", lambda x: 1 / (1 + x**2), 0.0, 1.0, math.pi / 4),
        ("1/(1+x^2) wide", lambda x: 1 / (1 + x**2), -50.0, 50.0, 2 * math.atan(50.0)),
        ("sqrt", np.sqrt, 0.0, 1.0, 2 / 3),
        ("log", np.log, 0.0, 1.0, -1.0),
        ("1/sqrt", lambda x: 1 / np.sqrt(x), 0.0, 1.0, 2.0),
        ("gauss", lambda x: np.exp(-(x**2)), -6.0, 6.0, math.sqrt(math.pi) * math.erf(6.0)),
        ("abs", np.abs, -1.0, 2.0, 2.5),
        ("1/x", lambda x: 1 / x, 1.0, 100.0, math.log(100.0)),
        ("x e^x", lambda x: x * np.exp(x), 0.0, 2.0, math.exp(2) + 1),
        ("peak", lambda x: 1 / (1e-4 + (x - 0.3) ** 2), 0.0, 1.0,
         (math.atan(0.7 / 1e-2) + math.atan(0.3 / 1e-2)) / 1e-2),
        ("cosh", np.cosh, -1.0, 1.0, 2 * math.sinh(1.0)),
        ("x^-1/3", lambda x: np.cbrt(x) ** -1, 0.0, 8.0, 6.0),
        ("exp(5x)", lambda x: np.exp(5 * x), 0.0, 4.0, math.expm1(20.0) / 5),
    ]


@suite("geometry.quadrature_correctness")
def _quadrature(rng):
    opts = QuadratureOptions()
    for label, f, a, b, exact in quadrature_cases():
        res = integrate(f, a, b, opts)
        tol = max(opts.rel_tol * abs(exact), opts.abs_tol)
        assert abs(res.value - exact) <= tol, f"{label}: {res.value!r} vs {exact!r}"
    return f"{len(quadrature_cases())} closed-form integrands"


# -- geodesics ----------------------------------------------------------------------

def _perturbed_nodes(rng, x, y, n, amp):
    base = geodesics.DiscretePath.chord(x, y, n).nodes.copy()
    s = np.arange(n + 1) / n
    for k in range(1, 4):
        base[1:-1] += amp / k * np.sin(k * np.pi * s[1:-1])[:, None] * rng.normal(size=x.size)
    return base


@suite("geodesics.analytic_gradient")
def _analytic_gradient(rng):
    worst = 0.0
    for f in (linear_field(1.3, (1, -1, 0.5)), radial_field(0.7, (3.0, 0.0, 0.0)), cosmological_field(1.5, 10.0, dim=3)):
        for _ in range(5):
            x = np.array([5.0, 0.5, -0.5])
            y = np.array([6.0, 1.5, 0.5])
            nodes = _perturbed_nodes(rng, x, y, 16, 0.2)
            dp = geodesics.DiscretePath(nodes)
            g = geodesics.discrete_scaled_length_gradient(dp, f, x)
            h = 1e-6
            fd = np.zeros_like(nodes)
            for k in range(1, nodes.shape[0] - 1):
                for j in range(nodes.shape[1]):
                    up, dn = nodes.copy(), nodes.copy()
                    up[k, j] += h
                    dn[k, j] -= h
                    fd[k, j] = (geodesics.discrete_scaled_length(geodesics.DiscretePath(up), f, x)
                                - geodesics.discrete_scaled_length(geodesics.DiscretePath(dn), f, x)) / (2 * h)
            inner = g[1:-1]
            rel = np.abs(inner - fd[1:-1]) / np.maximum(np.abs(inner), 1e-3 * np.abs(inner).max())
            assert np.all(rel < 1e-4), f"gradient mismatch {rel.max():.3g}"
            worst = max(worst, float(rel.max()))
    return f"15 configurations, worst rel {worst:.2e}"


def _geodesic_runs(rng):
    out = []
    for f, x, y in ((linear_field(1.0, (0, 1)), np.array([0.0, 0.0]), np.array([1.0, 0.0])),
                    (radial_field(1.0, (0, 0)), np.array([1.0, 0.3]), np.array([-1.0, 0.3])),
                    (radial_field(1.0, (0, 0)), np.array([1.0, 0.0]), np.array([-1.0, 0.0]))):
        out.append((f, x, y, geodesics.minimize_scaled_length(x, y, f)))
    return out


@suite("geodesics.descent_and_pinning")
def _descent(rng):
    for f, x, y, res in _geodesic_runs(rng):
        hist = np.asarray(res.history)
        slack = geodesics.ROUNDING_SLACK * np.abs(hist[:-1])
        assert np.all(np.diff(hist) <= slack), f"{f.name}: objective increased"
        assert np.array_equal(res.path.nodes[0], x) and np.array_equal(res.path.nodes[-1], y), "endpoint moved"
        assert res.gradient_norm <= geodesics.OptimizerOptions().gradient_tolerance
    return "3 runs nonincreasing, endpoints fixed"


@suite("geodesics.constant_field_consistency")
def _constant_consistency(rng):
    opts = geodesics.OptimizerOptions()
    worst_dev = worst_rel = 0.0
    for i in range(100):
        f = constant_field(float(rng.normal()))
        dim = int(rng.integers(2, 4))
        x, y = rng.uniform(-5, 5, (2, dim))
        initial = None
        if i % 10 == 0:  # some runs start away from the chord
            initial = geodesics.DiscretePath(_perturbed_nodes(rng, x, y, opts.nodes, 0.3))
        res = geodesics.minimize_scaled_length(x, y, f, opts, initial=initial)
        d = y - x
        rel = res.path.nodes - x
        off = rel - np.outer(rel @ d / (d @ d), d)
        worst_dev = max(worst_dev, float(np.linalg.norm(off, axis=1).max()))
        dist = geodesics.discrete_scaled_length(res.path, f, x)
        worst_rel = max(worst_rel, _close(dist, np.linalg.norm(d), 1e-8, "distance"))
    assert worst_dev < 1e-6, f"node deviation {worst_dev:.3g}"
    return f"100 pairs, deviation {worst_dev:.1e}, worst rel {worst_rel:.1e}"


@suite("geodesics.minimizer_optimality")
def _optimality(rng):
    count = 0
    for f, x, y, res in _geodesic_runs(rng):
        best = res.value
        chord = geodesics.DiscretePath.chord(x, y, res.path.n_segments)
        assert best <= geodesics.discrete_scaled_length(chord, f, x), "chord is shorter"
        frame = geodesics.tangents(res.path.nodes)
        s = np.arange(res.path.n_segments + 1) / res.path.n_segments
        for _ in range(20):
            bump = np.zeros_like(res.path.nodes)
            for k in range(1, 4):
                bump[1:-1] += np.sin(k * np.pi * s[1:-1])[:, None] * rng.normal(size=x.size) / k
            bump = geodesics.normal_gradient(bump, frame)
            amp = 10.0 ** rng.uniform(-3, -1)
            cand = res.path.nodes + amp * bump / np.abs(bump).max()
            if f.clamp_violation(cand[1:-1]):
                continue
            other = geodesics.discrete_scaled_length(geodesics.DiscretePath(cand), f, x)
            assert best <= other, f"{f.name}: perturbed path shorter by {best - other:.3g}"
            count += 1
    return f"chord and {count} perturbations longer"


@suite("geodesics.el_consistency")
def _el_consistency(rng):
    out = []
    for f, x, y in ((linear_field(1.0, (0, 1)), [0, 0], [1, 0]), (radial_field(1.0, (0, 0)), [1, 0.3], [-1, 0.3])):
        res_norms = []
        for n in (16, 32, 64):
            r = geodesics.minimize_scaled_length(x, y, f, geodesics.OptimizerOptions(nodes=n))
            res_norms.append(float(np.linalg.norm(geodesics.el_residual(r.path, f), axis=1).max()))
        assert res_norms[0] > res_norms[1] > res_norms[2], f"{f.name}: residuals {res_norms}"
        out.append(f"{res_norms[0]:.1e}->{res_norms[-1]:.1e}")
    chord = geodesics.DiscretePath.chord([0, 0], [1, 2], 32)
    assert np.abs(geodesics.el_residual(chord, constant_field(0.3))).max() <= 1e-10
    return "max residual " + ", ".join(out)


# -- holes --------------------------------------------------------------------------

@suite("holes.general_consistency")
def _hole_consistency(rng):
    worst = 0.0
    for K in (1.0, -1.0, 0.5, -2.0):
        for r in (1.0, 2.5):
            h = holes.HoleProfile(K, r, center=(0.0, 0.0, 0.0))
            for w in (0.2, 0.5, 0.85):
                a = holes.hole_scaled_distance(h, w).value
                b = geometry.path_length_scaled(h.radial_path(w), h.field(), h.reference_point()).value
                worst = max(worst, _close(a, b, 1e-8, f"K={K} r={r} w={w}"))
    return f"24 profiles, worst rel {worst:.2e}"


@suite("holes.duality")
def _duality(rng):
    z = rng.uniform(0, 0.99, 1000)
    for K in (0.3, 1.0, 2.0):
        black, white = holes.HoleProfile(K), holes.HoleProfile(-K)
        _close(black.integrand(z) * white.integrand(z), np.ones_like(z), 1e-13, f"K={K}")
    return "reciprocal integrands at 1000 points"


@suite("holes.monotonicity")
def _monotonicity(rng):
    opts = QuadratureOptions(divergence_threshold=1e300)
    strict = 0
    for h in (holes.HoleProfile(1.0), holes.HoleProfile(-1.0), holes.HoleProfile(2.0, 3.0), holes.HoleProfile(-0.5, 2.0)):
        table = holes.hole_curve(h, 100, opts)
        w, col = table.column("w"), table.column("scaled")
        for i in range(1, len(col)):
            assert col[i] >= col[i - 1], f"K={h.K}: decreased at w={w[i]}"
            # The white-hole integrand dies off like exp(-1/(1-z)); once the exact
            # increment is below rounding of the running value, strictness is unobservable.
            increment = h.r * (w[i] - w[i - 1]) * float(h.integrand(w[i]))
            if increment > 8 * np.spacing(col[i]):
                assert col[i] > col[i - 1], f"K={h.K}: flat at w={w[i]}"
                strict += 1
    return f"nondecreasing everywhere, strictly increasing at {strict} resolvable steps"


@suite("holes.divergence")
def _divergence(rng):
    res = holes.hole_scaled_distance(holes.HoleProfile(1.0, 1.0), 0.999)
    assert res.diverged or res.value > 1e6, f"w=0.999 gave {res.value}"
    return "DIVERGED" if res.diverged else f"{res.value:.3g}"


@suite("holes.speed_length_consistency")
def _speed_length(rng):
    opts = QuadratureOptions(abs_tol=1e-300)
    worst = 0.0
    for K in (1.0, -1.0):
        h = holes.HoleProfile(K, 1.0)
        for t in np.linspace(0.02, 0.9, 50):
            d = 1e-4 * (1 - t) ** 2
            slope = holes.hole_partial_integral(h, t - d, t + d, opts).value / (2 * d * h.r)
            worst = max(worst, _close(slope, holes.scaled_speed(h, t), 1e-6, f"K={K} t={t:.3f}"))
    return f"100 interior points, worst rel {worst:.2e}"


@suite("holes.outward_asymmetry")
def _outward(rng):
    for d in (0.5, 2.0, 10.0):
        assert holes.outward_scaled_distance(holes.HoleProfile(1.0), d).value < d
        assert holes.outward_scaled_distance(holes.HoleProfile(-1.0), d).value > d
    return "black compresses, white stretches outward"


# -- cosmology ----------------------------------------------------------------------

@suite("cosmology.factor_equality")
def _factor_equality(rng):
    for _ in range(200):
        p = cosmology.CrushProfile(float(rng.uniform(-3, 3)))
        s = p.t_now * 10.0 ** rng.uniform(-6, 0)
        qs = [(f"q{i}", float(v)) for i, v in enumerate(_magnitudes(rng, 5))]
        out = cosmology.uniform_scaling_check(p, s, qs)
        fac = cosmology.crush_factor(p, s)
        for (_, raw), (_, scaled) in zip(qs, out):
            assert scaled == raw * fac
            _close(scaled / raw, fac, 1e-15, "ratio")
    return "200 quantity lists share one factor"


@suite("cosmology.equation_invariance")
def _crush_equation(rng):
    for _ in range(2000):
        p = cosmology.CrushProfile(float(rng.uniform(0.1, 3)))
        s = p.t_now * 10.0 ** rng.uniform(-3, 0)
        c, g = _magnitudes(rng, 2)
        assert cosmology.crush_preserves_equation(p, s, c, g)
    return "2000 random (c, gamma, s)"


@suite("cosmology.boundary")
def _boundary(rng):
    for alpha in (0.5, 1.0, 2.0, -1.0):
        assert cosmology.crush_factor(cosmology.CrushProfile(alpha), 14e9) == 1.0
    p = cosmology.CrushProfile(2.0)
    f = [cosmology.crush_factor(p, p.t_now * 10.0**-k) for k in np.linspace(0, 12, 100)]
    assert all(b < a for a, b in zip(f, f[1:])) and f[-1] < 1e-23
    return "factor 1 at t_now, monotone to 0"


@suite("cosmology.lightcone_consistency")
def _lightcone(rng):
    p = cosmology.CrushProfile(1.0, c=1.0)
    z = np.zeros(3)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    times = [cosmology.lightcone_time(p, 10e9, z + r * d, z) for r in np.linspace(9.9e9, 0, 50)]
    assert all(b > a for a, b in zip(times, times[1:]))
    return "emission time rises as separation falls"


# -- scaled_dynamics ----------------------------------------------------------------

def _field_1d(a_func):
    return VectorField(lambda x: a_func(x[:, 0])[:, None], dim=1)


@suite("scaled_dynamics.linearity")
def _linearity(rng):
    A = _field_1d(np.cos)
    f = linear_field(0.3, (1.0,))
    for _ in range(50):
        n = int(rng.integers(3, 40))
        g1 = dynamics.Grid1D(0.0, 0.1, rng.normal(size=n) + 1j * rng.normal(size=n))
        g2 = dynamics.Grid1D(0.0, 0.1, rng.normal(size=n) + 1j * rng.normal(size=n))
        a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        mix = g1.with_values(a * g1.values + b * g2.values)
        for op in (lambda g: dynamics.scaled_derivative(g, A), lambda g: dynamics.wavepacket_rescale(g, f, [0.0])):
            lhs = op(mix).values
            rhs = a * op(g1).values + b * op(g2).values
            assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max())
    return "50 random superpositions"


@suite("scaled_dynamics.reduction")
def _reduction(rng):
    zero = _field_1d(np.zeros_like)
    g = dynamics.Grid1D.sample(lambda x: np.full(x.shape, 2.0 + 1j), 0.0, 0.1, 20)
    assert np.array_equal(dynamics.scaled_derivative(g, zero).values, np.zeros(20, complex))
    k, dx = 3.0, 1e-3
    g = dynamics.Grid1D.sample(lambda x: np.exp(1j * k * x), 0.0, dx, 1001)
    err = np.abs(dynamics.scaled_derivative(g, zero).values - 1j * k * g.values)[1:-1].max()
    assert err <= k**3 * dx**2, f"interior error {err:.3g}"
    seg = Path.segment([0.0, 0.0], [3.0, 4.0])
    act = dynamics.scaled_action(seg, dynamics.LagrangianSpec.free(2.0), constant_field(0.0), [0.0, 0.0], 0.0, 1.0)
    _close(act, oracles.free_action(2.0, 5.0, 1.0), 1e-10, "free action")
    gp = dynamics.Grid1D.sample(np.sin, 0.0, 0.1, 30)
    assert np.array_equal(dynamics.wavepacket_rescale(gp, constant_field(1.5), [0.0]).values, gp.values)
    zero2 = VectorField(lambda x: np.zeros_like(x), dim=2)
    assert np.array_equal(dynamics.covariant_time_derivative(seg, zero2, 0.3), seg.velocity(0.3))
    return "textbook forms recovered"


def derivative_convergence_slope(n_values=(100, 200, 400)):
    """Log-log slope of the max interior error of ``(d/dx + cos x)`` on ``sin(3x) e^x``."""
    A = _field_1d(np.cos)
    errs, hs = [], []
    for n in n_values:
        dx = 2.0 / n
        g = dynamics.Grid1D.sample(lambda x: np.sin(3 * x) * np.exp(x), 0.0, dx, n + 1)
        x = g.x
        exact = (3 * np.cos(3 * x) + np.sin(3 * x)) * np.exp(x) + np.cos(x) * np.sin(3 * x) * np.exp(x)
        errs.append(np.abs(dynamics.scaled_derivative(g, A).values - exact)[1:-1].max())
        hs.append(dx)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


@suite("scaled_dynamics.convergence_order")
def _convergence(rng):
    slope = derivative_convergence_slope()
    assert abs(slope - 2.0) <= 0.1, f"slope {slope:.4f}"
    return f"slope {slope:.4f}"


@suite("scaled_dynamics.action_sanity")
def _action_sanity(rng):
    L = dynamics.LagrangianSpec.free(1.0)
    f = constant_field(0.0)
    x, y = np.array([0.0, 0.0]), np.array([1.0, 2.0])
    base = dynamics.scaled_action(Path.segment(x, y), L, f, x, 0.0, 1.0)
    for _ in range(20):
        c = rng.normal(size=(3, 2)) * 0.2

        def func(s, c=c):
            bump = sum(np.sin((k + 1) * np.pi * s)[:, None] * c[k] for k in range(3))
            return x + s[:, None] * (y - x) + bump

        def vel(s, c=c):
            return (y - x) + sum((k + 1) * np.pi * np.cos((k + 1) * np.pi * s)[:, None] * c[k] for k in range(3))

        other = dynamics.scaled_action(Path(func, vel), L, f, x, 0.0, 1.0)
        assert base < other, "perturbation lowered the action"
    return "straight path beats 20 perturbations"


# -- cli ----------------------------------------------------------------------------

CLI_CASES = (
    ["holes", "--kind", "black", "--K", "1", "--r", "1", "--samples", "50"],
    ["holes", "--kind", "white", "--K", "1", "--r", "1", "--samples", "50"],
    ["cosmo", "--alpha", "2", "--samples", "40"],
    ["geodesic", "--field", "radial", "--K", "1", "--center", "0,0", "--from", "1,0.3", "--to=-1,0.3",
     "--nodes", "16"],
)


def _cli_outputs(argv, directory):
    from . import cli

    out = os.path.join(directory, "out.csv")
    extra = ["--out", out]
    svg = os.path.join(directory, "out.svg")
    if argv[0] in ("holes", "cosmo"):
        extra += ["--svg", svg]
    code = cli.run(list(argv) + extra)
    assert code == 0, f"{' '.join(argv)} exited {code}"
    files = [out] + ([svg] if argv[0] in ("holes", "cosmo") else [])
    blobs = []
    for path in files:
        with open(path, "rb") as fh:
            blobs.append(fh.read())
    return blobs


@suite("cli.determinism")
def _determinism(rng):
    with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
        for argv in CLI_CASES:
            assert _cli_outputs(argv, d1) == _cli_outputs(argv, d2), f"{argv[0]} output differs"
    return f"{len(CLI_CASES)} configurations byte-identical"


@suite("cli.no_partial_files")
def _no_partial(rng):
    from . import cli
    from .tables import write_atomic

    with tempfile.TemporaryDirectory() as d:
        target = os.path.join(d, "x.csv")
        try:
            write_atomic(target, "w,scaled\n0.5,café\n")
        except UnicodeEncodeError:
            pass
        # a computation error halfway through a geodesic run
        code = cli.run(["geodesic", "--field", "radial", "--K", "-1", "--center", "0,0",
                        "--from", "1,0.3", "--to=-1,0.3", "--nodes", "8", "--max-iter", "50",
                        "--out", target])
        assert code == 1, f"expected exit 1, got {code}"
        assert os.listdir(d) == [], f"left behind {os.listdir(d)}"
    return "failed writes leave nothing behind"


EXPECTED_SUITES = {
    "scaled_numbers": 7, "scaling_fields": 6, "geometry": 6, "geodesics": 5,
    "holes": 6, "cosmology": 4, "scaled_dynamics": 4, "cli": 3,
}


@suite("cli.verify_completeness")
def _completeness(rng):
    counts: dict[str, int] = {}
    for s in REGISTRY.values():
        counts[s.module] = counts.get(s.module, 0) + 1
    for module, expected in EXPECTED_SUITES.items():
        assert counts.get(module, 0) >= expected, f"{module}: {counts.get(module, 0)} suites, expected {expected}"
    return f"{len(REGISTRY)} suites over {len(counts)} modules"
