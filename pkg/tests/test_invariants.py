"""Every registered property suite, as its own test."""
import pytest

from scalegeom.verification import REGISTRY, run_suite


@pytest.mark.parametrize("name", list(REGISTRY))
def test_suite(name):
    outcome = run_suite(REGISTRY[name], seed=42)
    assert outcome.passed, outcome.line()


def test_another_seed_still_passes():
    for name in ("scaled_numbers.field_axioms", "scaling_fields.path_independence", "geodesics.constant_field_consistency"):
        assert run_suite(REGISTRY[name], seed=7).passed, name
