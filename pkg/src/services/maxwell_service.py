"""Maxwell iteration and quasi-equilibrium check."""
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from src.algebra import coeff_text
from src.config import settings
from src.jets import JetPoly, PDESystem
from src.matrix import RingMatrix
from src.models import LBMScheme
from src.series import Series, expand_operator
from src.services.derivation_service import check_order, moment_fields, residual_to_pde
from src.services.expansion_service import ExpansionService
from src.services.fd_service import FDReductionService
from src.utils.errors import PreconditionError, SingularRelaxationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAX_ITERATIONS = 2


@dataclass(frozen=True)
class MaxwellState:
    """Moment approximations m^(k) as series in dx with jet-polynomial coefficients."""

    iteration: int
    moments: Tuple[Series, ...]
    truncation: int

    def row(self, index: int) -> List[JetPoly]:
        return list(self.moments[index].coeffs)


def apply_operator_series(op: Series, target: Series) -> Series:
    """Cauchy product of an operator series with a jet-polynomial series."""
    n = min(op.truncation, target.truncation)
    zero = target.coefficient(0).zero_like()
    out = [zero] * (n + 1)
    for a in range(n + 1):
        if not op.coeffs[a]:
            continue
        for b in range(n + 1 - a):
            if target.coeffs[b]:
                out[a + b] = out[a + b] + target.coeffs[b].apply_diffop(op.coeffs[a])
    return Series(out, n, zero)


class MaxwellService:
    def __init__(self, scheme: LBMScheme, truncation: Optional[int] = None):
        self.notes: List[str] = []
        rates = list(scheme.rates)
        for i in range(scheme.conserved):
            if not rates[i]:
                rates[i] = scheme.field.one
                note = f"conserved rate {scheme.rate_name(i)} was 0; Maxwell iteration uses 1"
                self.notes.append(note)
                logger.warning(note)
        self.original = scheme
        self.scheme = scheme.with_rates(rates)
        self.truncation = settings.truncation_order if truncation is None else truncation
        self.expansions = ExpansionService(self.scheme, self.truncation)

    def expand_conj_stream(self, truncation: Optional[int] = None) -> RingMatrix:
        """zeta Tbar - I as a matrix of series."""
        truncation = self.truncation if truncation is None else truncation
        zeta, _, _ = self.expansions.scheme_series(self.scheme, truncation)
        tbar = self.expansions.conj_stream_series(self.scheme, truncation)
        identity = RingMatrix.identity(self.scheme.q, tbar.zero, tbar.one)
        return tbar.scale(zeta) - identity

    def _iteration_matrix(self, truncation: int) -> RingMatrix:
        s = self.scheme
        for i, rate in enumerate(s.rates):
            if not rate:
                raise SingularRelaxationError(f"relaxation rate {s.rate_name(i)} is zero; S is not invertible")
        conj = self.expand_conj_stream(truncation)
        return RingMatrix.build(s.q, lambda i, j: conj[i, j] * (-1 / s.rates[i]), conj.zero, conj.one)

    def maxwell_iterate(self, k: int, truncation: Optional[int] = None) -> MaxwellState:
        """m^(k) = sum_{r <= k} (-S^-1 (zeta Tbar - I))^r m^eq."""
        if not 0 <= k <= MAX_ITERATIONS:
            raise ValueError(f"Maxwell iteration is available for k = 0..{MAX_ITERATIONS}, got {k}")
        truncation = k if truncation is None else truncation
        kmat = self._iteration_matrix(truncation)
        fields = moment_fields(self.scheme)
        term = [Series([f], truncation, f.zero_like()) for f in fields]
        total = list(term)
        for _ in range(k):
            nxt = []
            for i in range(self.scheme.q):
                acc = Series([], truncation, fields[0].zero_like())
                for j in range(self.scheme.q):
                    if kmat[i, j]:
                        acc = acc + apply_operator_series(kmat[i, j], term[j])
                nxt.append(acc)
            term = nxt
            total = [a + b for a, b in zip(total, term)]
        return MaxwellState(k, tuple(total), truncation)

    def maxwell_moment_row(self, index: int, k: int, truncation: Optional[int] = None) -> List[JetPoly]:
        """Per-order expansion of row ``index`` of m^(k)."""
        return self.maxwell_iterate(k, truncation).row(index)

    def maxwell_pde(self, order: int) -> PDESystem:
        check_order(order)
        state = self.maxwell_iterate(order)
        residuals = {}
        for i in range(self.scheme.conserved):
            m_i = JetPoly.var(self.scheme.field, self.scheme.dim, i)
            residuals[i] = state.moments[i] - Series([m_i], state.truncation, m_i.zero_like())
        return residual_to_pde(residuals, order, "maxwell", notes=self.notes)

    def quasi_equilibrium_check(self, conserved_rate: Any = None) -> Tuple[bool, List[str]]:
        """At order 0, row i > N of the FD relation reads s1 Pi m_i = s1 Pi m_i^eq."""
        scheme = self.original
        if scheme.conserved != 1:
            raise PreconditionError("Quasi-equilibrium check is defined for N=1")
        if conserved_rate is not None:
            name = str(conserved_rate)
            if name.isidentifier():
                scheme = scheme.with_symbolic_rate(0, name)
            else:
                scheme = scheme.with_conserved_rates([conserved_rate])
        s1 = scheme.rates[0]
        if not s1:
            raise PreconditionError("Quasi-equilibrium needs a nonzero conserved rate s1")

        expected = s1 * scheme.pi
        reducer = FDReductionService(scheme)
        details = []
        for i in range(scheme.conserved, scheme.q):
            det, row = reducer.non_conserved_relation(i, scheme)
            det0 = expand_operator(det, scheme.lam, 0).coefficient(0).constant_term()
            if det0 != expected:
                details.append(f"m{i + 1}: order-0 determinant is {coeff_text(det0)}, expected s1*Pi")
            for j, op in enumerate(row):
                value = expand_operator(op, scheme.lam, 0).coefficient(0).constant_term()
                target = expected if j == i else scheme.field.zero
                if value != target:
                    details.append(f"m{i + 1}: order-0 weight of m{j + 1}^eq is {coeff_text(value)}")
        logger.info(f"Quasi-equilibrium check: {len(details)} mismatches")
        return not details, details
