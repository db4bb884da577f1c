from fractions import Fraction

import pytest

from src.algebra import CoeffField, LaurentPoly, OperatorPoly
from src.series import DiffOp, Series, expand_operator, expand_shift, expand_time_shift, series_matrix_coefficient
from src.services.expansion_service import ExpansionService
from src.utils.errors import PreconditionError


@pytest.fixture
def field():
    return CoeffField(["lam"])


def test_shift_expansion(field):
    series = expand_shift(field, (1,), 3)
    dx = lambda r: DiffOp.dx(field, 1, 0, r)  # noqa: E731
    assert series.coefficient(0) == DiffOp.scalar(field, 1)
    assert series.coefficient(1) == -dx(1)
    assert series.coefficient(2) == dx(2) / 2
    assert series.coefficient(3) == -dx(3) / 6


def test_two_dimensional_shift(field):
    series = expand_shift(field, (1, -1), 2)
    dxy = DiffOp(field, 3, {(0, 1, 1): 1})
    assert series.coefficient(1) == DiffOp.dx(field, 2, 1) - DiffOp.dx(field, 2, 0)
    assert series.coefficient(2) == (DiffOp.dx(field, 2, 0, 2) + DiffOp.dx(field, 2, 1, 2)) / 2 - dxy


def test_time_shift_uses_acoustic_scaling(field):
    lam = field.gen("lam")
    series = expand_time_shift(field, 1, lam, 2)
    assert series.coefficient(1) == DiffOp.dt(field, 1) * (1 / lam)
    assert series.coefficient(2) == DiffOp.dt(field, 1, 2) * (1 / (2 * lam ** 2))


def test_operator_expansion(field):
    lam = field.gen("lam")
    op = OperatorPoly.z(field, 1) * OperatorPoly.from_laurent(LaurentPoly.shift(field, (1,)))
    series = expand_operator(op, lam, 1)
    assert series.coefficient(0) == DiffOp.scalar(field, 1)
    assert series.coefficient(1) == DiffOp.dt(field, 1) * (1 / lam) - DiffOp.dx(field, 1, 0)


def test_series_arithmetic_truncates(field):
    one = DiffOp.scalar(field, 1)
    dx = DiffOp.dx(field, 1, 0)
    s = Series([one, dx], 2)
    assert (s * s).coefficient(2) == dx * dx
    assert (s * Series([one], 1)).truncation == 1
    assert s.valuation() == 0
    assert Series.monomial(dx, 1, 2).divide_by_dx().coefficient(0) == dx


@pytest.mark.parametrize("name", ["d1q2", "d1q3", "d1q3_n1"])
def test_stream_series_link_with_G(request, name):
    scheme = request.getfixturevalue(name)
    expansions = ExpansionService(scheme.canonical(), 3)
    assert expansions.link_check() == []
    assert expansions.conj_stream_check()


def test_resolvent_closed_form_matches_expansion(d1q3_n1):
    expansions = ExpansionService(d1q3_n1.canonical(), 2)
    resolvent = expansions.expand_resolvent()
    for r in range(3):
        assert series_matrix_coefficient(resolvent, r) == expansions.resolvent_closed_form(r)


@pytest.mark.parametrize("name", ["d1q2", "d1q3_n1", "burgers"])
def test_resolvent_displays(request, name):
    scheme = request.getfixturevalue(name)
    assert ExpansionService(scheme, 2).display_check() == []


def test_perturbation_route_on_random_schemes(random_schemes):
    single = [s for s in random_schemes if s.conserved == 1]
    assert len(single) >= 8
    for scheme in single[:8]:
        assert ExpansionService(scheme, 2).perturbation_check() == [], scheme.name


def test_displays_need_one_conserved_moment(d1q3):
    with pytest.raises(PreconditionError):
        ExpansionService(d1q3, 2).closed_form_displays()


def random_operator(rng, field, dim):
    terms = {}
    for _ in range(int(rng.integers(1, 5))):
        key = (int(rng.integers(0, 3)),) + tuple(int(v) for v in rng.integers(-2, 3, size=dim))
        terms[key] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return OperatorPoly(field, dim + 1, terms)


@pytest.mark.parametrize("dim", [1, 2])
def test_expansion_is_a_ring_homomorphism(field, rng, dim):
    lam = field.gen("lam")
    for _ in range(8):
        a, b = random_operator(rng, field, dim), random_operator(rng, field, dim)
        expand = lambda op: expand_operator(op, lam, 3)  # noqa: E731
        assert expand(a * b) == expand(a) * expand(b)
        assert expand(a + b) == expand(a) + expand(b)
    assert expand_operator(OperatorPoly.one(field, dim), lam, 3) == Series.constant(DiffOp.scalar(field, dim), 3)
