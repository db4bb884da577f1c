from dataclasses import replace
from fractions import Fraction

import pytest

from src.jets import JetPoly, JetVar, pde_equal
from src.services.derivation_service import DerivationService, residual_to_pde
from src.services.maxwell_service import MaxwellService
from src.services.scheme_file_service import load_scheme

DX = ((JetVar(0, 0, (1,)), 1),)
DXX = ((JetVar(0, 0, (2,)), 1),)


def test_d1q2_equivalent_equation(d1q2):
    field = d1q2.field
    lam, c, s2 = field.gen("lam"), field.gen("C"), field.gen("s2")
    eq = DerivationService(d1q2).derive_via_series(2).equation(0)
    assert eq.fluxes[0] == JetPoly.var(field, 1, 0, 0, (1,)) * c
    assert list(eq.fluxes[1].keys()) == [DXX]
    expected = -lam * (1 / s2 - field.one / 2) * (1 - c ** 2 / lam ** 2)
    assert not (eq.fluxes[1].coeff(DXX) - expected)


def test_order_one_is_the_equilibrium_flux(d1q2):
    system = DerivationService(d1q2).derive_order1()
    assert system.equation(0).fluxes[0].coeff(DX) == d1q2.field.gen("C")


def test_gamma1_is_the_first_order_flux(d1q2, burgers):
    field = d1q2.field
    assert DerivationService(d1q2).gamma1(0) == JetPoly.var(field, 1, 0, 0, (1,)) * field.gen("C")
    scheme = burgers.specialized()
    u = JetPoly.var(scheme.field, 1, 0)
    ux = JetPoly.var(scheme.field, 1, 0, 0, (1,))
    assert DerivationService(scheme).gamma1(0) == u * ux
    with pytest.raises(ValueError):
        DerivationService(d1q2).gamma1(1)


@pytest.mark.parametrize("bindings", [{"s2": 2}, {"C": 1}])
def test_vanishing_diffusion(scheme_path, bindings):
    scheme = load_scheme(scheme_path("d1q2"), bindings).specialized()
    eq = DerivationService(scheme).derive_via_series(2).equation(0)
    assert not eq.fluxes[1]


def test_burgers_equation(burgers):
    """d_t u + d_x(u^2/2) = dx lam (1/s2 - 1/2) d_x((1 - u^2/lam^2) d_x u) + O(dx^2)."""
    scheme = burgers.specialized()
    eq = DerivationService(scheme).derive_via_series(2).equation(0)
    u = JetPoly.var(scheme.field, 1, 0)
    ux = JetPoly.var(scheme.field, 1, 0, 0, (1,))
    uxx = JetPoly.var(scheme.field, 1, 0, 0, (2,))
    assert eq.fluxes[0] == u * ux
    # lam = 2, s2 = 3/2: lam (1/s2 - 1/2) = 1/3
    nu = Fraction(1, 3)
    expected = -(uxx - uxx * u * u / 4) * nu + ux * ux * u * nu / 2
    assert eq.fluxes[1] == expected


@pytest.mark.parametrize("name", ["d1q2", "d1q3", "d1q3_n1", "burgers"])
def test_routes_agree_on_sample_schemes(request, name):
    scheme = request.getfixturevalue(name)
    derivations = DerivationService(scheme)
    for order in (1, 2):
        series = derivations.derive_via_series(order)
        closed = derivations.derive_closed(order)
        maxwell = MaxwellService(scheme.canonical()).maxwell_pde(order)
        assert pde_equal(series, closed).equal, pde_equal(series, closed).describe()
        assert pde_equal(closed, maxwell).equal, pde_equal(closed, maxwell).describe()


def test_routes_agree_on_random_schemes(random_schemes):
    assert len(random_schemes) >= 20
    for scheme in random_schemes:
        derivations = DerivationService(scheme, 2)
        maxwell = MaxwellService(scheme.canonical(), 2)
        for order in (1, 2):
            series = derivations.derive_via_series(order)
            closed = derivations.derive_closed(order)
            by_maxwell = maxwell.maxwell_pde(order)
            assert pde_equal(series, closed).equal, (scheme.name, order, pde_equal(series, closed).describe())
            assert pde_equal(series, by_maxwell).equal, (scheme.name, order, pde_equal(series, by_maxwell).describe())


def test_unreduced_route_keeps_time_derivatives(d1q2):
    system = DerivationService(d1q2).derive_unreduced(2)
    assert system.equation(0).fluxes[1].has_time_jets()
    assert system.route == "series-unreduced"


@pytest.mark.parametrize("name", ["d1q2", "d1q3", "d1q3_n1", "burgers"])
def test_relaxation_pattern(request, name):
    derivations = DerivationService(request.getfixturevalue(name))
    ok, details = derivations.relaxation_pattern_check(derivations.derive_order2_closed())
    assert ok, details


@pytest.mark.parametrize("name", ["d1q2", "d1q3", "d1q3_n1"])
def test_series_residuals_ignore_conserved_rates(request, name):
    scheme = request.getfixturevalue(name)
    derivations = DerivationService(scheme, 2)
    reference = derivations.series_residuals(2)
    for rate in (1, Fraction(17, 10)):
        trial = scheme.with_conserved_rates([rate] * scheme.conserved)
        assert derivations.series_residuals(2, trial) == reference
        assert pde_equal(residual_to_pde(derivations.series_residuals(2, trial), 2, "series"),
                         derivations.derive_via_series(2)).equal


def test_order_out_of_range(d1q2):
    with pytest.raises(ValueError):
        DerivationService(d1q2).derive_via_series(3)


def test_zero_velocities_give_no_fluxes(make_random_scheme, rng):
    for q in (2, 3):
        scheme = replace(make_random_scheme(rng, q), velocities=((0,),) * q)
        derivations = DerivationService(scheme, 2)
        for order in (1, 2):
            for system in (derivations.derive_via_series(order), derivations.derive_closed(order)):
                assert all(not flux for eq in system.equations for flux in eq.fluxes), (q, order, system.route)


def test_two_dimensional_routes_agree(d2q4):
    scheme = d2q4.specialized()
    derivations = DerivationService(scheme, 2)
    maxwell = MaxwellService(scheme.canonical(), 2)
    for order in (1, 2):
        series = derivations.derive_via_series(order)
        assert pde_equal(series, derivations.derive_closed(order)).equal
        assert pde_equal(series, maxwell.maxwell_pde(order)).equal
    mx = JetPoly.var(scheme.field, 2, 0, 0, (1, 0))
    my = JetPoly.var(scheme.field, 2, 0, 0, (0, 1))
    assert derivations.gamma1(0) == mx / 4 + my / 8
