from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from src.schemas import Verdict
from src.services.check_service import CheckService, random_rates

N1_ONLY = {"charpoly-form", "resolvent-displays", "perturbation", "quasi-equilibrium"}


def verdicts(scheme, **kwargs):
    return {v.name: v for v in CheckService(scheme, **kwargs).run()}


def test_d1q2_battery_passes(d1q2):
    results = verdicts(d1q2, trials=2)
    failed = {name: v.detail for name, v in results.items() if v.verdict == Verdict.FAIL}
    assert failed == {}
    assert results["rational-equivalence"].verdict == Verdict.PASS
    assert results["quasi-equilibrium"].verdict == Verdict.PASS


def test_two_conserved_moments_skip_single_moment_checks(d1q3):
    results = verdicts(d1q3, trials=1)
    assert {name for name, v in results.items() if v.verdict == Verdict.SKIP} == N1_ONLY
    assert all(v.verdict == Verdict.PASS for name, v in results.items() if name not in N1_ONLY)


def test_selected_checks(burgers):
    results = CheckService(burgers).run(["routes-order-2", "rational-equivalence"])
    assert [v.name for v in results] == ["routes-order-2", "rational-equivalence"]
    assert all(v.verdict == Verdict.PASS for v in results)
    assert results[1].detail == ["max deviation 0 on 16 cells x 8 steps"]


def test_unbound_parameters_skip_the_numeric_run(d1q2):
    unbound = replace(d1q2, bindings={})
    (result,) = CheckService(unbound).run(["rational-equivalence"])
    assert result.verdict == Verdict.SKIP


def test_unknown_check(d1q2):
    with pytest.raises(ValueError, match="Unknown checks: nope"):
        CheckService(d1q2).run(["nope"])


def test_random_rates():
    rates = random_rates(np.random.default_rng(3), 200)
    assert all(Fraction(0) < r <= 2 for r in rates)
