from fractions import Fraction

import pytest

from src.services.convergence_service import ConvergenceService, observed_order
from src.services.scheme_file_service import load_scheme
from src.utils.errors import PreconditionError


@pytest.mark.parametrize("s2,reference,expected", [
    ("3/2", "advection-diffusion", 2.0),
    ("2", "advection", 2.0),
    ("3/2", "advection", 1.0),
])
def test_observed_orders(scheme_path, s2, reference, expected):
    scheme = load_scheme(scheme_path("d1q2"), {"s2": Fraction(s2)})
    report = ConvergenceService(scheme).study(reference, expected_order=expected)
    assert [row.cells for row in report.rows] == [64, 128, 256, 512]
    assert report.observed_order == pytest.approx(expected, abs=0.3)
    assert report.passed


def test_transport_coefficients(d1q2):
    assert ConvergenceService(d1q2).transport_coefficients() == (Fraction(1, 2), Fraction(1, 8))


def test_no_diffusion_at_unit_courant(scheme_path):
    scheme = load_scheme(scheme_path("d1q2"), {"C": 1})
    assert ConvergenceService(scheme).transport_coefficients() == (Fraction(1), Fraction(0))


def test_errors_shrink_with_the_grid(d1q2):
    service = ConvergenceService(d1q2)
    report = service.convergence_order(service.exact_solution("advection-diffusion"), grids=[32, 64])
    assert report.rows[1].error < report.rows[0].error
    assert report.warnings == []
    assert report.passed is None


def test_observed_order_of_synthetic_errors():
    assert observed_order([0.5, 0.25, 0.125], [0.25, 0.0625, 0.015625]) == pytest.approx(2.0)


def test_needs_one_conserved_moment(d1q3):
    with pytest.raises(PreconditionError):
        ConvergenceService(d1q3)


def test_bad_inputs(d1q2):
    service = ConvergenceService(d1q2)
    with pytest.raises(ValueError):
        service.exact_solution("burgers")
    exact = service.exact_solution("advection")
    with pytest.raises(PreconditionError):
        service.grid_error(exact, 64, Fraction(1, 3))
    with pytest.raises(PreconditionError):
        service.convergence_order(exact, grids=[64])
