"""Derivation service: macroscopic equations at orders 1 and 2."""
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp

from src.config import settings
from src.jets import JetPoly, JetVar, PDEEquation, PDESystem, TimeEliminator
from src.matrix import RingMatrix
from src.models import LBMScheme
from src.series import Series, series_det_adj
from src.services.expansion_service import ExpansionService
from src.utils.errors import EliminationError, InternalConsistencyError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAX_ORDER = 2


def check_order(order: int) -> None:
    if order not in range(1, MAX_ORDER + 1):
        raise ValueError(f"Macroscopic equations are available at orders 1 and 2, got {order}")


def moment_fields(scheme: LBMScheme) -> List[JetPoly]:
    """m_j for conserved j, the equilibrium as a jet polynomial otherwise."""
    fields = [JetPoly.var(scheme.field, scheme.dim, j) for j in range(scheme.conserved)]
    fields += [JetPoly.from_moment_polynomial(eq, scheme.dim) for eq in scheme.equilibria[scheme.conserved:]]
    return fields


def apply_series(op: Series, target: JetPoly) -> Series:
    """Apply a series of differential operators to a jet polynomial."""
    return Series([target.apply_diffop(c) for c in op.coeffs], op.truncation, target.zero_like())


def residual_to_pde(residuals: Dict[int, Series], order: int, route: str, eliminate: bool = True,
                    notes: Sequence[str] = ()) -> PDESystem:
    """Turn ``E = dx c (d_t m_i + ...) + O(dx^{order+1})`` into a PDE per conserved index."""
    check_order(order)
    scaled: Dict[int, List[JetPoly]] = {}
    for i, residual in residuals.items():
        if residual.truncation < order:
            raise ValueError(f"Residual for m{i + 1} is only known to order {residual.truncation}")
        if residual.coefficient(0):
            raise InternalConsistencyError(
                f"dx^0 term of the m{i + 1} relation does not vanish: {residual.coefficient(0).text()}")
        first = residual.coefficient(1)
        dim = first.dim
        leading = first.coeff(((JetVar(i, 1, (0,) * dim), 1),))
        if not leading:
            raise InternalConsistencyError(f"The m{i + 1} relation has no d_t m{i + 1} term at order dx")
        scaled[i] = [residual.coefficient(r + 1) / leading for r in range(order)]

    fluxes0: Dict[int, JetPoly] = {}
    for i, parts in scaled.items():
        head = JetPoly.var(parts[0].field, parts[0].dim, i, 1)
        flux = parts[0] - head
        if flux.has_time_jets():
            raise EliminationError(f"Leading-order m{i + 1} equation contains extra time derivatives")
        fluxes0[i] = flux

    eliminator = TimeEliminator(fluxes0) if eliminate else None
    equations = []
    for i in sorted(scaled):
        higher = [eliminator(p) if eliminator else p for p in scaled[i][1:]]
        equations.append(PDEEquation(i, tuple([fluxes0[i]] + higher)))
    system = PDESystem(tuple(equations), route, tuple(notes))
    logger.info(f"Derived order-{order} equations by the {route} route")
    return system


class DerivationService:
    def __init__(self, scheme: LBMScheme, truncation: Optional[int] = None):
        self.scheme = scheme
        self.canonical = scheme.canonical()
        self.truncation = settings.truncation_order if truncation is None else truncation
        self.expansions = ExpansionService(self.canonical, self.truncation)

    def fields(self) -> List[JetPoly]:
        return moment_fields(self.canonical)

    @staticmethod
    def _flux_row(g: RingMatrix, fields: List[JetPoly], j: int) -> JetPoly:
        """sum_k G_jk field_k."""
        total = fields[0].zero_like()
        for k, f in enumerate(fields):
            if g[j, k]:
                total = total + f.apply_diffop(g[j, k])
        return total

    def _flux_rows(self, g: RingMatrix, fields: List[JetPoly]) -> List[JetPoly]:
        return [self._flux_row(g, fields, j) for j in range(self.canonical.q)]

    def gamma1(self, index: int, g: Optional[RingMatrix] = None) -> JetPoly:
        """First-order flux of conserved moment `index`, with the equilibria substituted."""
        if index not in range(self.canonical.conserved):
            raise ValueError(f"m{index + 1} is not a conserved moment")
        g = self.expansions.build_G() if g is None else g
        return self._flux_row(g, self.fields(), index)

    def derive_order1(self) -> PDESystem:
        g = self.expansions.build_G()
        equations = tuple(PDEEquation(i, (self.gamma1(i, g),)) for i in range(self.canonical.conserved))
        return PDESystem(equations, "closed-form")

    def derive_order2_closed(self) -> PDESystem:
        """First-order flux plus the dx correction weighted by 1/s_j - 1/2."""
        s = self.canonical
        n, q = s.conserved, s.q
        g = self.expansions.build_G()
        fields = self.fields()
        rows = self._flux_rows(g, fields)
        half = s.field.one / 2
        equations = []
        for i in range(n):
            correction = fields[0].zero_like()
            for j in range(n, q):
                if not g[i, j]:
                    continue
                bracket = -rows[j]
                for ell in range(n):
                    slope = JetPoly.from_moment_polynomial(s.equilibria[j].diff(ell), s.dim)
                    if slope:
                        bracket = bracket + slope * rows[ell]
                correction = correction + bracket.apply_diffop(g[i, j]) * (1 / s.rates[j] - half)
            equations.append(PDEEquation(i, (rows[i], correction / s.lam)))
        logger.info(f"Closed-form order-2 equations for {s.name or 'scheme'}")
        return PDESystem(tuple(equations), "closed-form")

    def derive_closed(self, order: int) -> PDESystem:
        check_order(order)
        return self.derive_order1() if order == 1 else self.derive_order2_closed()

    def series_residuals(self, order: int, scheme: Optional[LBMScheme] = None) -> Dict[int, Series]:
        """det(zeta I - A_i) m_i - (adj(zeta I - A_i)(A_i' m + B m^eq))_i for every conserved i."""
        s = scheme or self.canonical
        n, q = s.conserved, s.q
        zeta, a, b = self.expansions.scheme_series(s, order)
        fields = moment_fields(s)
        identity = RingMatrix.identity(q, a.zero, a.one)
        residuals = {}
        for i in range(n):
            keep = [i] + list(range(n, q))
            a_i = a.cut(keep)
            a_diamond = a - a_i
            det, adj = series_det_adj(identity.scale(zeta) - a_i)
            coupling = a_diamond + b
            total = Series([], order, fields[0].zero_like())
            for j in range(q):
                op = det if j == i else det.zero_like()
                for k in range(q):
                    if adj[i, k] and coupling[k, j]:
                        op = op - adj[i, k] * coupling[k, j]
                if op:
                    total = total + apply_series(op, fields[j])
            residuals[i] = total
        return residuals

    def derive_via_series(self, order: int) -> PDESystem:
        check_order(order)
        return residual_to_pde(self.series_residuals(order), order, "series")

    def derive_unreduced(self, order: int) -> PDESystem:
        """Series route with the time derivatives of the dx terms kept."""
        check_order(order)
        return residual_to_pde(self.series_residuals(order), order, "series-unreduced", eliminate=False)

    def relaxation_pattern_check(self, pde: PDESystem) -> Tuple[bool, List[str]]:
        """Order-2 coefficients depend on each symbolic rate s_j only through 1/s_j - 1/2."""
        s = self.canonical
        names = []
        for rate in s.rates[s.conserved:]:
            expr = rate.as_expr()
            if expr.is_Symbol and str(expr) not in names:
                names.append(str(expr))
        if not names:
            return True, ["no symbolic non-conserved rates"]
        # vanishing at s = 2 only holds when every relaxing rate is free
        all_free = all(rate.as_expr().is_Symbol for rate in s.rates[s.conserved:])
        h = {name: sp.Symbol(f"h_{name}") for name in names}
        subs = {sp.Symbol(name): 2 / (2 * h[name] + 1) for name in names}
        at_zero = {v: 0 for v in h.values()}
        details = []
        for eq in pde.equations:
            if eq.order < 2:
                continue
            for key, c in eq.fluxes[1].items():
                numer, denom = sp.fraction(sp.cancel(sp.together(c.as_expr().subs(subs))))
                label = "*".join(v.text() for v, _ in key)
                if denom.free_symbols & set(h.values()):
                    details.append(f"m{eq.index + 1}: coefficient of {label} is not polynomial in 1/s - 1/2")
                elif all_free and sp.expand(numer.subs(at_zero)) != 0:
                    details.append(f"m{eq.index + 1}: coefficient of {label} survives at s = 2")
        return not details, details
