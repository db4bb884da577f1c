"""Check service: the cross-check battery run by the ``check`` command."""
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.algebra import OperatorPoly
from src.config import settings
from src.jets import pde_equal
from src.matrix import RingMatrix, cayley_hamilton_residual
from src.models import LBMScheme
from src.schemas import ArithmeticMode, CheckVerdict, RunConfig, Verdict
from src.services.derivation_service import DerivationService
from src.services.fd_service import FDReductionService
from src.services.maxwell_service import MaxwellService
from src.services.scheme_service import SchemeService
from src.services.simulation_service import equivalence_compare
from src.utils.errors import BindingError, LBMFDError, PreconditionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

Outcome = Tuple[bool, List[str]]

NONLINEAR_STEPS = 8


def random_rates(rng: np.random.Generator, count: int) -> List[Fraction]:
    """Nonzero rationals in (0, 2]."""
    return [Fraction(int(rng.integers(1, 41)), 20) for _ in range(count)]


class CheckService:
    def __init__(self, scheme: LBMScheme, truncation: Optional[int] = None, trials: int = 3,
                 seed: Optional[int] = None):
        self.scheme = scheme
        self.truncation = truncation
        self.trials = trials
        self.rng = np.random.default_rng(settings.random_seed if seed is None else seed)
        self.reducer = FDReductionService(scheme)
        self.derivations = DerivationService(scheme, truncation)

    def checks(self) -> Dict[str, Callable[[], Outcome]]:
        return {
            "validation": self.check_validation,
            "cayley-hamilton": self.check_cayley_hamilton,
            "adjugate-identity": self.check_adjugate_identity,
            "faddeev-leverrier": self.check_faddeev_leverrier,
            "charpoly-form": self.check_charpoly_form,
            "invariance": self.check_invariance,
            "time-levels": self.check_time_levels,
            "stream-link": self.check_stream_link,
            "routes-order-1": lambda: self.check_routes(1),
            "routes-order-2": lambda: self.check_routes(2),
            "relaxation-pattern": self.check_relaxation_pattern,
            "resolvent-displays": self.check_displays,
            "perturbation": self.check_perturbation,
            "quasi-equilibrium": self.check_quasi_equilibrium,
            "rational-equivalence": self.check_equivalence,
        }

    def run(self, names: Optional[Sequence[str]] = None) -> List[CheckVerdict]:
        table = self.checks()
        selected = list(table) if names is None else list(names)
        unknown = [n for n in selected if n not in table]
        if unknown:
            raise ValueError(f"Unknown checks: {', '.join(unknown)}")

        verdicts = []
        for name in selected:
            try:
                ok, detail = table[name]()
                verdict = Verdict.PASS if ok else Verdict.FAIL
            except PreconditionError as exc:
                verdict, detail = Verdict.SKIP, [str(exc)]
            except LBMFDError as exc:
                verdict, detail = Verdict.FAIL, [f"{type(exc).__name__}: {exc}"]
            if verdict == Verdict.FAIL:
                logger.warning(f"Check {name} failed: {'; '.join(detail[:3])}")
            verdicts.append(CheckVerdict(name=name, verdict=verdict, detail=detail))
        failed = sum(1 for v in verdicts if v.verdict == Verdict.FAIL)
        logger.info(f"Check battery on {self.scheme.name or 'scheme'}: {len(verdicts)} checks, {failed} failed")
        return verdicts

    # Scheme and algebra

    def check_validation(self) -> Outcome:
        report = SchemeService(self.scheme).validate()
        return report.valid, [f"{i.level.value}: {i.component}: {i.message}" for i in report.issues]

    def _operator_resolvent(self) -> RingMatrix:
        a, _ = SchemeService(self.scheme.canonical()).operator_matrices()
        z = OperatorPoly.z(self.scheme.field, self.scheme.dim)
        return RingMatrix.identity(a.size, a.zero, a.one).scale(z) - a

    def check_cayley_hamilton(self) -> Outcome:
        a, _ = SchemeService(self.scheme.canonical()).scheme_matrices()
        residual = cayley_hamilton_residual(a)
        bad = [f"entry ({i + 1},{j + 1}) = {e!r}" for i, j, e in residual.entries() if e]
        return not bad, bad

    def check_adjugate_identity(self) -> Outcome:
        c = self._operator_resolvent()
        det = c.det()
        product = c @ c.adjugate()
        expected = RingMatrix.identity(c.size, c.zero, c.one).scale(det)
        bad = [f"entry ({i + 1},{j + 1})" for i, j, e in (product - expected).entries() if e]
        return not bad, bad

    def check_faddeev_leverrier(self) -> Outcome:
        a, _ = SchemeService(self.scheme.canonical()).scheme_matrices()
        coeffs, _ = a.faddeev_leverrier()
        charpoly = OperatorPoly.zero(self.scheme.field, self.scheme.dim)
        for k, c in enumerate(coeffs):
            charpoly = charpoly + OperatorPoly.from_laurent(c, k)
        det = self._operator_resolvent().det()
        if charpoly != det:
            return False, [f"trace recursion gives {charpoly!r}, cofactor expansion gives {det!r}"]
        return True, []

    def check_charpoly_form(self) -> Outcome:
        if self.scheme.conserved != 1:
            raise PreconditionError("Characteristic-polynomial form is only defined for N=1")
        diff = self.reducer.reduce_charpoly_form().diff(self.reducer.reduce_single())
        return not diff, diff

    # FD reduction

    def check_invariance(self) -> Outcome:
        trials = [random_rates(self.rng, self.scheme.conserved) for _ in range(self.trials)]
        trials.append([1] * self.scheme.conserved)
        return self.reducer.invariance_check(trials)

    def check_time_levels(self) -> Outcome:
        specialized = self.scheme.specialized()
        predicted = self.reducer.time_level_prediction()
        schemes = self.reducer.reduce_multi(specialized.canonical())
        bad = [f"m{fd.index + 1}: {fd.steps} time levels, predicted {predicted}"
               for fd in schemes if fd.steps != predicted]
        return not bad, bad

    # Expansions and routes

    def check_stream_link(self) -> Outcome:
        expansions = self.derivations.expansions
        diffs = expansions.link_check()
        if not expansions.conj_stream_check():
            diffs.append("T times its conjugate is not the identity")
        return not diffs, diffs

    def check_routes(self, order: int) -> Outcome:
        series = self.derivations.derive_via_series(order)
        closed = self.derivations.derive_closed(order)
        maxwell = MaxwellService(self.scheme.canonical(), self.truncation).maxwell_pde(order)
        details = []
        for label, a, b in (("series/closed", series, closed), ("closed/maxwell", closed, maxwell),
                            ("series/maxwell", series, maxwell)):
            comparison = pde_equal(a, b)
            details += [f"{label}: {d}" for d in comparison.describe()]
        return not details, details

    def check_relaxation_pattern(self) -> Outcome:
        return self.derivations.relaxation_pattern_check(self.derivations.derive_order2_closed())

    def check_displays(self) -> Outcome:
        if self.scheme.conserved != 1:
            raise PreconditionError("Resolvent displays are defined for N=1")
        diffs = self.derivations.expansions.display_check()
        return not diffs, diffs

    def check_perturbation(self) -> Outcome:
        if self.scheme.conserved != 1:
            raise PreconditionError("Perturbation expansion is defined for N=1")
        diffs = self.derivations.expansions.perturbation_check()
        return not diffs, diffs

    def check_quasi_equilibrium(self) -> Outcome:
        return MaxwellService(self.scheme, self.truncation).quasi_equilibrium_check(conserved_rate=1)

    # Numerics

    def check_equivalence(self) -> Outcome:
        steps = settings.default_steps
        if not self.scheme.equilibria_linear():
            # exact fractions grow geometrically through nonlinear equilibria
            steps = min(steps, NONLINEAR_STEPS)
        cfg = RunConfig(mode=ArithmeticMode.RATIONAL, cells=settings.default_cells, steps=steps,
                        seed=settings.random_seed)
        try:
            report = equivalence_compare(self.scheme, cfg)
        except BindingError as exc:
            raise PreconditionError(f"Numeric run needs every parameter bound: {exc}") from exc
        detail = [f"max deviation {report.deviation} on {cfg.cells} cells x {cfg.steps} steps"]
        return report.passed, detail
