import math

import pytest

from scalegeom import CrushProfile, DomainError, crush_curve, crush_factor, lightcone_time, uniform_scaling_check
from scalegeom.cosmology import crush_preserves_equation, lightcone_crush

T = 14e9


def test_lightcone_times():
    p = CrushProfile(2.0)
    assert lightcone_time(p, T, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)) == T
    assert lightcone_time(p, T, (T / 2, 0.0, 0.0), (0.0, 0.0, 0.0)) == T / 2
    with pytest.raises(DomainError):
        lightcone_time(p, T, (T, 0.0, 0.0), (0.0, 0.0, 0.0))


def test_crush_factor_examples():
    p = CrushProfile(2.0)
    assert crush_factor(p, T) == 1.0
    assert crush_factor(p, T / 2) == 0.25
    assert crush_factor(p, T * 1e-3) == pytest.approx(1e-6, rel=1e-12)
    divergent = CrushProfile(-1.0)
    assert crush_factor(divergent, 1e-3) > 1e12


@pytest.mark.parametrize("s", [0.0, -1.0, 2 * T])
def test_crush_factor_domain(s):
    with pytest.raises(DomainError):
        crush_factor(CrushProfile(2.0), s)


def test_lightcone_crush_combines_the_two():
    p = CrushProfile(2.0)
    assert lightcone_crush(p, T, (T / 2, 0.0), (0.0, 0.0)) == 0.25


def test_crush_curve():
    t = crush_curve(CrushProfile(2.0), 100)
    s, look, factor = t.column("s"), t.column("lookback_distance"), t.column("factor")
    assert s[0] == T and factor[0] == 1.0 and look[0] == 0.0
    assert all(T * 1e-6 < v <= T for v in s)
    assert all(b < a for a, b in zip(factor, factor[1:]))
    assert factor[50] == pytest.approx(1e-6, rel=1e-12)


def test_uniform_scaling():
    out = uniform_scaling_check(CrushProfile(2.0), T / 2, [("wavelength", 5e-7), ("frequency", 6e14), ("speed", 3e8)])
    assert [name for name, _ in out] == ["wavelength", "frequency", "speed"]
    assert [v for _, v in out] == pytest.approx([1.25e-7, 1.5e14, 7.5e7], rel=1e-15)
    assert uniform_scaling_check(CrushProfile(2.0), T / 2, []) == []


def test_equation_preserved_under_crush():
    assert crush_preserves_equation(CrushProfile(2.0), T * 1e-4, 3e8, 6e14)


def test_profile_validation():
    with pytest.raises(ValueError):
        CrushProfile(math.nan)
    with pytest.raises(ValueError):
        CrushProfile(2.0, t_now=-1.0)
