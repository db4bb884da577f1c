"""FD reduction service: corresponding multi-step schemes on the conserved moments."""
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from src.algebra import OperatorPoly, coeff_is_constant, coeff_substitute
from src.matrix import RingMatrix, resolvent_adjugate_coefficients
from src.models import FDScheme, LBMScheme, Stencil
from src.services.scheme_service import SchemeService
from src.utils.errors import BindingError, InternalConsistencyError, PreconditionError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def normalize_relation(index: int, lhs: OperatorPoly, rhs: Mapping[int, OperatorPoly],
                       conserved: int) -> FDScheme:
    """Shift a relation so that its lowest level is z^0 and make lhs monic."""
    parts = [lhs] + [op for op in rhs.values() if op]
    shift = min(op.min_time_degree for op in parts if op)
    lhs = lhs.shift_time(-shift)
    rhs = {j: op.shift_time(-shift) for j, op in rhs.items() if op}
    steps = lhs.time_degree
    lead = lhs.coefficient(steps)
    if not lead.is_constant() or not lead:
        raise InternalConsistencyError(f"Leading coefficient of the m{index + 1} relation is not a constant: {lead!r}")
    lead = lead.constant_term()
    if lead != 1:
        lhs = lhs / lead
        rhs = {j: op / lead for j, op in rhs.items()}
    for j, op in rhs.items():
        if op.time_degree >= steps:
            raise InternalConsistencyError(f"Right-hand side term on index {j + 1} is not explicit")
    return FDScheme(
        index=index,
        lhs=lhs,
        rhs_conserved=tuple((rhs[j], j) for j in sorted(rhs) if j < conserved),
        rhs_equilibrium=tuple((rhs[j], j) for j in sorted(rhs) if j >= conserved),
        steps=steps,
    )


class FDReductionService:
    def __init__(self, scheme: LBMScheme):
        self.scheme = scheme

    def _matrices(self, scheme: LBMScheme) -> Tuple[RingMatrix, RingMatrix]:
        return SchemeService(scheme).operator_matrices()

    def reduce_index(self, index: int, scheme: Optional[LBMScheme] = None) -> FDScheme:
        """Scheme for conserved moment ``index`` from det/adj of z I - A_i."""
        scheme = scheme or self.scheme.canonical()
        n, q = scheme.conserved, scheme.q
        if not 0 <= index < n:
            raise PreconditionError(f"m{index + 1} is not a conserved moment")
        a, b = self._matrices(scheme)
        keep = [index] + list(range(n, q))
        a_i = a.cut(keep)
        a_diamond = a - a_i
        z = OperatorPoly.z(scheme.field, scheme.dim)
        resolvent = RingMatrix.identity(q, a.zero, a.one).scale(z) - a_i
        det = resolvent.det()
        adj = resolvent.adjugate()
        ad_row = (adj @ a_diamond).row(index)
        b_row = (adj @ b).row(index)

        lhs = det - ad_row[index] - b_row[index]
        rhs: Dict[int, OperatorPoly] = {}
        for j in range(q):
            if j == index:
                continue
            rhs[j] = ad_row[j] + b_row[j] if j < n else b_row[j]
        fd = normalize_relation(index, lhs, rhs, n)
        logger.info(f"Reduced {scheme.name or 'scheme'} for m{index + 1}: {fd.steps} time levels")
        return fd

    def reduce_single(self, scheme: Optional[LBMScheme] = None) -> FDScheme:
        scheme = scheme or self.scheme.canonical()
        if scheme.conserved != 1:
            raise PreconditionError(f"Single-moment reduction needs N=1, scheme has N={scheme.conserved}")
        return self.reduce_index(0, scheme)

    def reduce_multi(self, scheme: Optional[LBMScheme] = None) -> List[FDScheme]:
        scheme = scheme or self.scheme.canonical()
        return [self.reduce_index(i, scheme) for i in range(scheme.conserved)]

    def reduce_charpoly_form(self) -> FDScheme:
        """Same scheme built from charpoly(A) and sum_l c_{k+l+1} A^l, never from det(zI - A)."""
        scheme = self.scheme.canonical()
        if scheme.conserved != 1:
            raise PreconditionError("Characteristic-polynomial form is only defined for N=1")
        a, b = SchemeService(scheme).scheme_matrices()
        coeffs, _ = a.faddeev_leverrier()
        blocks = resolvent_adjugate_coefficients(a, coeffs)
        lhs = OperatorPoly.zero(scheme.field, scheme.dim)
        for k, c in enumerate(coeffs):
            lhs = lhs + OperatorPoly.from_laurent(c, k)
        rhs: Dict[int, OperatorPoly] = {j: OperatorPoly.zero(scheme.field, scheme.dim) for j in range(1, scheme.q)}
        for k, block in enumerate(blocks):
            row = (block @ b).row(0)
            lhs = lhs - OperatorPoly.from_laurent(row[0], k)
            for j in range(1, scheme.q):
                rhs[j] = rhs[j] + OperatorPoly.from_laurent(row[j], k)
        return normalize_relation(0, lhs, rhs, 1)

    def non_conserved_relation(self, index: int, scheme: Optional[LBMScheme] = None
                               ) -> Tuple[OperatorPoly, List[OperatorPoly]]:
        """Row ``index`` of det(zI - A) m = adj(zI - A) B m^eq."""
        scheme = scheme or self.scheme
        if not scheme.conserved <= index < scheme.q:
            raise PreconditionError(f"m{index + 1} is not a non-conserved moment")
        a, b = self._matrices(scheme)
        z = OperatorPoly.z(scheme.field, scheme.dim)
        resolvent = RingMatrix.identity(scheme.q, a.zero, a.one).scale(z) - a
        adj = resolvent.adjugate()
        return resolvent.det(), list((adj @ b).row(index))

    def time_level_prediction(self, scheme: Optional[LBMScheme] = None) -> int:
        """1 + number of non-conserved rates different from 1."""
        scheme = scheme or self.scheme
        rates = [coeff_substitute(r, scheme.bindings) for r in scheme.rates[scheme.conserved:]]
        return 1 + sum(1 for r in rates if r != 1)

    def invariance_check(self, trials: Sequence[Sequence[Any]]) -> Tuple[bool, List[str]]:
        """Compare the canonical reduction with reductions under trial conserved rates."""
        reference = self.reduce_multi()
        diffs: List[str] = []
        for rates in trials:
            trial = self.scheme.with_conserved_rates(list(rates))
            for ref, other in zip(reference, self.reduce_multi(trial)):
                for line in ref.diff(other):
                    diffs.append(f"conserved rates {list(map(str, rates))}: {line}")
        logger.info(f"Invariance check over {len(trials)} trial rate sets: {len(diffs)} differences")
        return not diffs, diffs

    def specialize_stencil(self, fd: FDScheme, bindings: Optional[Mapping[str, Any]] = None) -> Stencil:
        """Bind every parameter and return an executable stencil."""
        bindings = dict(self.scheme.bindings if bindings is None else bindings)

        def bind(op: OperatorPoly) -> OperatorPoly:
            bound = op.map_coeffs(lambda c: coeff_substitute(c, bindings))
            for _, c in bound.items():
                if not coeff_is_constant(c):
                    free = sorted(str(s) for s in c.as_expr().free_symbols)
                    raise BindingError(f"Unbound parameters {', '.join(free)} in the m{fd.index + 1} stencil")
            return bound

        rhs = {j: bind(op) for op, j in fd.rhs_conserved + fd.rhs_equilibrium}
        # a rate bound to 1 can empty whole time levels
        bound = normalize_relation(fd.index, bind(fd.lhs), rhs, self.scheme.conserved)
        equilibria = {j: tuple(self.scheme.equilibria[j].numeric_terms(bindings)) for _, j in bound.rhs_equilibrium}
        return Stencil(bound, equilibria)
