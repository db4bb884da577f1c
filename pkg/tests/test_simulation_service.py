from fractions import Fraction

import numpy as np
import pytest

from src.schemas import ArithmeticMode, InitialProfile, RunConfig
from src.services.fd_service import FDReductionService
from src.services.simulation_service import (Arithmetic, FDRunner, LBMSimulator, equivalence_compare, fd_run,
                                             initial_profile, lbm_run, simulate)
from src.utils.errors import HistoryError


@pytest.mark.parametrize("name", ["d1q2", "d1q3", "d1q3_n1"])
def test_rational_equivalence_is_exact(request, name):
    scheme = request.getfixturevalue(name)
    report = equivalence_compare(scheme, RunConfig(cells=16, steps=20))
    assert report.deviation == "0"
    assert report.passed


def test_rational_equivalence_with_nonlinear_equilibria(burgers):
    report = equivalence_compare(burgers, RunConfig(cells=8, steps=8, amplitude="1/2"))
    assert report.deviation == "0"


def test_double_equivalence(d1q2):
    report = equivalence_compare(d1q2, RunConfig(mode=ArithmeticMode.DOUBLE, cells=64, steps=100))
    assert report.passed
    assert float(report.deviation) <= 1e-10
    assert report.tolerance == 1e-10


def test_explicit_warmup(d1q3_n1):
    report = equivalence_compare(d1q3_n1, RunConfig(cells=8, steps=10, warmup=5))
    assert report.deviation == "0"


def test_constant_state_is_a_fixed_point(d1q3_n1):
    cfg = RunConfig(cells=8, steps=5, profile=InitialProfile.CONSTANT, amplitude="3/2")
    states = lbm_run(d1q3_n1, cfg)
    assert all(v == Fraction(3, 2) for v in states[-1].moments[0])


def test_mass_is_conserved(d1q3):
    report = simulate(d1q3, RunConfig(cells=12, steps=15))
    assert len(report.rows) == 16
    assert report.drift == ["0", "0"]


def test_double_mass_drift_is_roundoff(d1q2):
    report = simulate(d1q2, RunConfig(mode=ArithmeticMode.DOUBLE, cells=32, steps=40, profile=InitialProfile.SINE))
    assert float(report.drift[0]) < 1e-12


def test_initial_profiles():
    cfg = RunConfig(cells=4, profile=InitialProfile.DELTA, amplitude="2")
    (delta,) = initial_profile(cfg, 1, 1)
    assert list(delta) == [2, 0, 0, 0]
    (zero,) = initial_profile(RunConfig(cells=3, profile=InitialProfile.ZERO), 1, 1)
    assert list(zero) == [0, 0, 0]
    first, second = initial_profile(RunConfig(cells=5, seed=1), 1, 2)
    assert all(isinstance(v, Fraction) and abs(v) <= 1 for v in first)
    assert list(first) != list(second)
    (square,) = initial_profile(RunConfig(cells=3, mode=ArithmeticMode.DOUBLE, profile="constant"), 2, 1)
    assert square.shape == (3, 3) and square.dtype == float


def test_sine_profile_spans_the_unit_box():
    cfg = RunConfig(cells=4, mode=ArithmeticMode.DOUBLE, profile=InitialProfile.SINE)
    (wave,) = initial_profile(cfg, 1, 1)
    assert np.allclose(wave, [0.0, 1.0, 0.0, -1.0])
    assert "length" not in RunConfig.model_fields


def test_arithmetic_modes():
    exact = Arithmetic(ArithmeticMode.RATIONAL)
    assert exact.exact
    assert exact.array([1, 2]).dtype == object
    assert exact.number("1/3") == Fraction(1, 3)
    double = Arithmetic("double")
    assert double.zeros((2,)).dtype == float


def test_streaming_moves_populations(d1q2):
    simulator = LBMSimulator(d1q2)
    # f+ = 1 at cell 0, f- = 0 everywhere: m1 = m2 = 1 at cell 0
    moments = np.empty((2, 4), dtype=object)
    moments.fill(Fraction(0))
    moments[0, 0] = moments[1, 0] = Fraction(1)
    streamed = simulator.stream(moments)
    assert list(streamed[0]) == [0, 1, 0, 0]


def test_fd_runner_needs_enough_history(d1q2):
    reducer = FDReductionService(d1q2)
    stencils = [reducer.specialize_stencil(fd) for fd in reducer.reduce_multi()]
    runner = FDRunner(d1q2, stencils, ArithmeticMode.RATIONAL)
    level = [np.array([Fraction(1)] * 4, dtype=object)]
    with pytest.raises(HistoryError):
        runner.advance([level])
    with pytest.raises(HistoryError):
        fd_run(d1q2, stencils, RunConfig(cells=4, steps=3), [level])
    history = runner.run([level, level], 4)
    assert len(history) == 4
