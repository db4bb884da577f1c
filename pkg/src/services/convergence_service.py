"""Convergence service: observed order of the LBM scheme against single-mode solutions."""
import math
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.algebra import coeff_to_fraction
from src.config import settings
from src.jets import JetVar
from src.models import LBMScheme
from src.schemas import ArithmeticMode, ConvergenceReport, ConvergenceRow
from src.services.derivation_service import DerivationService
from src.services.scheme_service import SchemeService
from src.services.simulation_service import LBMSimulator
from src.utils.errors import PreconditionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# u(x, t, dx) on the periodic unit interval
ExactSolution = Callable[[np.ndarray, float, float], np.ndarray]

REFERENCES = ("advection", "advection-diffusion")


def advection_mode(speed: float, wavenumber: float) -> ExactSolution:
    def solution(x: np.ndarray, t: float, dx: float) -> np.ndarray:
        return np.sin(wavenumber * (x - speed * t))
    return solution


def advection_diffusion_mode(speed: float, viscosity: float, wavenumber: float) -> ExactSolution:
    """Mode of d_t u + C d_x u = nu dx d_xx u; the diffusion shrinks with the grid."""
    def solution(x: np.ndarray, t: float, dx: float) -> np.ndarray:
        decay = math.exp(-viscosity * dx * wavenumber ** 2 * t)
        return decay * np.sin(wavenumber * (x - speed * t))
    return solution


def observed_order(dxs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    slope, _ = np.polyfit(np.log(np.asarray(dxs, dtype=float)), np.log(np.asarray(errors, dtype=float)), 1)
    return float(slope)


class ConvergenceService:
    def __init__(self, scheme: LBMScheme):
        if scheme.dim != 1 or scheme.conserved != 1:
            raise PreconditionError("Convergence study needs a one-dimensional scheme with one conserved moment")
        self.scheme = scheme
        self.lam = SchemeService(scheme).lattice_speed()

    def transport_coefficients(self) -> Tuple[Fraction, Fraction]:
        """(C, nu) read off d_t m1 + C d_x m1 - dx nu d_xx m1 = O(dx^2)."""
        pde = DerivationService(self.scheme.specialized()).derive_order2_closed()
        eq = pde.equation(0)
        first = JetVar(0, 0, (1,))
        second = JetVar(0, 0, (2,))
        if set(eq.fluxes[0].variables()) - {first} or set(eq.fluxes[1].variables()) - {second}:
            raise PreconditionError(f"Equation is not of advection-diffusion type: {eq.text()}")
        speed = coeff_to_fraction(eq.fluxes[0].coeff(((first, 1),)))
        viscosity = -coeff_to_fraction(eq.fluxes[1].coeff(((second, 1),)))
        logger.info(f"Transport coefficients: C = {speed}, nu = {viscosity}")
        return speed, viscosity

    def exact_solution(self, reference: str, wavenumber: int = 1) -> ExactSolution:
        if reference not in REFERENCES:
            raise ValueError(f"Unknown reference solution {reference!r}, expected one of {REFERENCES}")
        speed, viscosity = self.transport_coefficients()
        k = 2 * math.pi * wavenumber
        if reference == "advection":
            return advection_mode(float(speed), k)
        return advection_diffusion_mode(float(speed), float(viscosity), k)

    def grid_error(self, exact: ExactSolution, cells: int, final_time: Fraction) -> float:
        """Max-norm error of m1 at final_time on a grid of ``cells`` cells."""
        dx = Fraction(1, cells)
        steps = final_time * self.lam / dx
        if steps.denominator != 1:
            raise PreconditionError(f"Final time {final_time} is not a whole number of steps on {cells} cells")
        x = np.arange(cells) * float(dx)
        simulator = LBMSimulator(self.scheme, ArithmeticMode.DOUBLE)
        states = simulator.run([exact(x, 0.0, float(dx))], int(steps))
        return float(np.max(np.abs(states[-1].moments[0] - exact(x, float(final_time), float(dx)))))

    def convergence_order(self, exact: ExactSolution, label: str = "",
                          expected_order: Optional[float] = None,
                          grids: Optional[Sequence[int]] = None,
                          final_time: Optional[Fraction] = None) -> ConvergenceReport:
        grids = list(settings.convergence_grid_list if grids is None else grids)
        final_time = settings.final_time if final_time is None else Fraction(final_time)
        if len(grids) < 2:
            raise PreconditionError("At least two grids are needed to measure an order")

        rows: List[ConvergenceRow] = []
        for cells in grids:
            error = self.grid_error(exact, cells, final_time)
            rows.append(ConvergenceRow(cells=cells, dx=1 / cells, error=error))
            logger.info(f"{label or 'convergence'}: {cells} cells, error {error:.3e}")

        warnings = []
        for coarse, fine in zip(rows, rows[1:]):
            if fine.error >= coarse.error:
                warnings.append(f"error does not decrease from {coarse.cells} to {fine.cells} cells")
        for w in warnings:
            logger.warning(f"{label or 'convergence'}: {w}")

        order = observed_order([r.dx for r in rows], [r.error for r in rows])
        tolerance = passed = None
        if expected_order is not None:
            tolerance = settings.convergence_tolerance
            passed = abs(order - expected_order) <= tolerance
        logger.info(f"{label or 'convergence'}: observed order {order:.3f}")
        return ConvergenceReport(label=label, rows=rows, observed_order=order, expected_order=expected_order,
                                 tolerance=tolerance, passed=passed, warnings=warnings)

    def study(self, reference: str, expected_order: Optional[float] = None, wavenumber: int = 1,
              grids: Optional[Sequence[int]] = None) -> ConvergenceReport:
        exact = self.exact_solution(reference, wavenumber)
        label = f"{self.scheme.name or 'scheme'} vs {reference}"
        return self.convergence_order(exact, label, expected_order, grids)
