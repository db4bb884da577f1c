import pytest

from src.jets import JetPoly, pde_equal
from src.services.derivation_service import DerivationService
from src.services.maxwell_service import MaxwellService
from src.utils.errors import PreconditionError


def test_zero_conserved_rate_is_replaced(d1q2):
    service = MaxwellService(d1q2)
    assert service.scheme.rates[0] == d1q2.field.one
    assert service.notes == ["conserved rate s1 was 0; Maxwell iteration uses 1"]
    assert service.maxwell_pde(2).notes == service.notes


def test_d1q2_matches_closed_form(d1q2):
    maxwell = MaxwellService(d1q2).maxwell_pde(2)
    closed = DerivationService(d1q2).derive_order2_closed()
    assert maxwell.route == "maxwell"
    assert pde_equal(maxwell, closed).equal


def test_two_conserved_moments(d1q3):
    maxwell = MaxwellService(d1q3).maxwell_pde(2)
    assert len(maxwell.equations) == 2
    assert pde_equal(maxwell, DerivationService(d1q3).derive_closed(2)).equal


def test_moment_row(d1q2):
    service = MaxwellService(d1q2)
    field = d1q2.field
    m1 = JetPoly.var(field, 1, 0)
    assert service.maxwell_moment_row(1, 0) == [m1 * field.gen("C")]
    row = service.maxwell_moment_row(1, 1)
    assert len(row) == 2
    assert row[0] == m1 * field.gen("C")
    assert row[1]


@pytest.mark.parametrize("k", [-1, 3])
def test_iterations_out_of_range(d1q2, k):
    with pytest.raises(ValueError):
        MaxwellService(d1q2).maxwell_iterate(k)


@pytest.mark.parametrize("rate", [1, "s1"])
def test_quasi_equilibrium(d1q3_n1, rate):
    ok, details = MaxwellService(d1q3_n1).quasi_equilibrium_check(rate)
    assert ok, details


def test_quasi_equilibrium_needs_a_rate(d1q2):
    with pytest.raises(PreconditionError):
        MaxwellService(d1q2).quasi_equilibrium_check()


def test_quasi_equilibrium_needs_one_conserved_moment(d1q3):
    with pytest.raises(PreconditionError):
        MaxwellService(d1q3).quasi_equilibrium_check(1)
