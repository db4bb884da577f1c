"""Expansion service: asymptotic series of the stream matrix, the resolvent and their det/adj."""
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Optional, Tuple

from src.algebra import Coeff
from src.config import settings
from src.matrix import RingMatrix, det_adj_derivatives
from src.models import LBMScheme
from src.series import (DiffOp, Series, expand_laurent, expand_time_shift, series_det_adj, series_limit,
                        series_matrix_coefficient, series_matrix_limit)
from src.services.scheme_service import SchemeService
from src.utils.errors import PreconditionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

REGULARIZER = "s_reg"


@dataclass(frozen=True)
class ResolventExpansion:
    """det and adjugate of zeta I - A (limits at a vanishing conserved rate)."""

    det: Series
    adj: RingMatrix


class ExpansionService:
    def __init__(self, scheme: LBMScheme, truncation: Optional[int] = None):
        self.scheme = scheme
        self.truncation = settings.truncation_order if truncation is None else truncation

    # Units

    def _diff_zero(self, scheme: Optional[LBMScheme] = None) -> DiffOp:
        scheme = scheme or self.scheme
        return DiffOp.zero(scheme.field, scheme.dim)

    def _diff_one(self, scheme: Optional[LBMScheme] = None) -> DiffOp:
        scheme = scheme or self.scheme
        return DiffOp.scalar(scheme.field, scheme.dim)

    def _series_units(self, scheme: LBMScheme, truncation: int) -> Tuple[Series, Series]:
        zero = Series([], truncation, self._diff_zero(scheme))
        return zero, zero.one_like()

    def lift(self, c: Coeff, scheme: Optional[LBMScheme] = None, truncation: Optional[int] = None) -> Series:
        scheme = scheme or self.scheme
        truncation = self.truncation if truncation is None else truncation
        return Series.constant(DiffOp.scalar(scheme.field, scheme.dim, c), truncation)

    # Momentum-velocity matrix

    def build_G(self, scheme: Optional[LBMScheme] = None) -> RingMatrix:
        """G = M diag(lambda c_j . grad) M^-1."""
        scheme = scheme or self.scheme
        minv = SchemeService(scheme).moment_inverse()
        velocity_ops = []
        for c in scheme.velocities:
            op = self._diff_zero(scheme)
            for axis, v in enumerate(c):
                if v:
                    op = op + DiffOp.dx(scheme.field, scheme.dim, axis) * (scheme.lam * v)
            velocity_ops.append(op)

        def entry(i: int, k: int) -> DiffOp:
            op = self._diff_zero(scheme)
            for j, vop in enumerate(velocity_ops):
                weight = scheme.moments[i, j] * minv[j, k]
                if weight and vop:
                    op = op + vop * weight
            return op

        return RingMatrix.build(scheme.q, entry, self._diff_zero(scheme), self._diff_one(scheme))

    # Stream matrices

    def stream_series(self, scheme: Optional[LBMScheme] = None, truncation: Optional[int] = None) -> RingMatrix:
        scheme = scheme or self.scheme
        truncation = self.truncation if truncation is None else truncation
        zero, one = self._series_units(scheme, truncation)
        t = SchemeService(scheme).stream_matrix()
        return t.map(lambda p: expand_laurent(p, truncation), zero, one)

    def conj_stream_series(self, scheme: Optional[LBMScheme] = None,
                           truncation: Optional[int] = None) -> RingMatrix:
        scheme = scheme or self.scheme
        truncation = self.truncation if truncation is None else truncation
        zero, one = self._series_units(scheme, truncation)
        t = SchemeService(scheme).conjugate_stream_matrix()
        return t.map(lambda p: expand_laurent(p, truncation), zero, one)

    def link_check(self) -> List[str]:
        """Differences between T^(r) and (-1)^r G^r / (lambda^r r!), empty when the link holds."""
        t = self.stream_series()
        g = self.build_G()
        power = RingMatrix.identity(self.scheme.q, g.zero, g.one)
        diffs = []
        for r in range(self.truncation + 1):
            expected = power.scale(self.scheme.field.coerce((-1) ** r) / (self.scheme.lam ** r * factorial(r)))
            actual = series_matrix_coefficient(t, r)
            if actual != expected:
                diffs.append(f"order {r}: stream coefficient differs from the G^{r} term")
            power = power @ g
        return diffs

    def conj_stream_check(self) -> bool:
        """T times its conjugate is the identity up to the truncation order."""
        t, tbar = self.stream_series(), self.conj_stream_series()
        product = t @ tbar
        return product == RingMatrix.identity(self.scheme.q, product.zero, product.one)

    # Resolvent

    def scheme_series(self, scheme: Optional[LBMScheme] = None,
                      truncation: Optional[int] = None) -> Tuple[Series, RingMatrix, RingMatrix]:
        """(zeta, A, B) with A = T(I - S) and B = T S expanded in dx."""
        scheme = scheme or self.scheme
        truncation = self.truncation if truncation is None else truncation
        t = self.stream_series(scheme, truncation)
        zeta = expand_time_shift(scheme.field, scheme.dim, scheme.lam, truncation)
        a = RingMatrix.build(scheme.q, lambda i, j: t[i, j] * (1 - scheme.rates[j]), t.zero, t.one)
        b = RingMatrix.build(scheme.q, lambda i, j: t[i, j] * scheme.rates[j], t.zero, t.one)
        return zeta, a, b

    def resolvent_parts(self, scheme: Optional[LBMScheme] = None,
                        truncation: Optional[int] = None) -> Tuple[RingMatrix, RingMatrix]:
        """(zeta I - A, B) as matrices of series."""
        scheme = scheme or self.scheme
        zeta, a, b = self.scheme_series(scheme, truncation)
        return RingMatrix.identity(scheme.q, a.zero, a.one).scale(zeta) - a, b

    def expand_resolvent(self, scheme: Optional[LBMScheme] = None,
                         truncation: Optional[int] = None) -> RingMatrix:
        return self.resolvent_parts(scheme, truncation)[0]

    def resolvent_closed_form(self, order: int, scheme: Optional[LBMScheme] = None) -> RingMatrix:
        """Coefficient of dx^order of zeta I - A from G and S (orders 0 to 2)."""
        scheme = scheme or self.scheme
        g = self.build_G(scheme)
        zero, one = g.zero, g.one
        q = scheme.q
        rates = RingMatrix.diagonal([one * s for s in scheme.rates], zero, one)
        relaxed = RingMatrix.diagonal([one * (1 - s) for s in scheme.rates], zero, one)
        identity = RingMatrix.identity(q, zero, one)
        dt = DiffOp.dt(scheme.field, scheme.dim)
        if order == 0:
            return rates
        if order == 1:
            return (identity.scale(dt) + g @ relaxed).scale(1 / scheme.lam)
        if order == 2:
            return (identity.scale(dt * dt) - g @ g @ relaxed).scale(1 / (2 * scheme.lam ** 2))
        raise ValueError(f"No closed form for order {order}")

    def regularized_scheme(self) -> LBMScheme:
        """N=1 scheme with the conserved rate replaced by a free parameter."""
        if self.scheme.conserved != 1:
            raise PreconditionError("Resolvent displays are defined for N=1")
        return self.scheme.canonical().with_symbolic_rate(0, REGULARIZER)

    def expand_resolvent_det_adj(self, truncation: Optional[int] = None) -> ResolventExpansion:
        """det and adj of zeta I - A in the series ring, then the limit of the regularizer at zero."""
        truncation = self.truncation if truncation is None else truncation
        scheme = self.regularized_scheme()
        resolvent = self.expand_resolvent(scheme, truncation)
        det, adj = series_det_adj(resolvent)
        logger.info(f"Expanded det/adj of the resolvent to order {truncation}")
        return ResolventExpansion(series_limit(det, REGULARIZER), series_matrix_limit(adj, REGULARIZER))

    def perturbation_expansion(self, truncation: int = 2) -> ResolventExpansion:
        """Second-order Taylor expansion of det and adj around S, then the regularizer limit."""
        scheme = self.regularized_scheme()
        resolvent = self.expand_resolvent(scheme, truncation)
        s = RingMatrix.diagonal(list(scheme.rates), scheme.field.zero, scheme.field.one)

        def lift(c: Coeff) -> Series:
            return self.lift(c, scheme, truncation)

        d = resolvent - s.map(lift, resolvent.zero, resolvent.one)
        terms = det_adj_derivatives(s, d, lift=lift)
        det = lift(s.det()) + terms.d_det + terms.d2_det / 2
        adj = s.adjugate().map(lift, resolvent.zero, resolvent.one) + terms.d_adj + terms.d2_adj / 2
        return ResolventExpansion(series_limit(det, REGULARIZER), series_matrix_limit(adj, REGULARIZER))

    def closed_form_displays(self) -> Dict[str, List[DiffOp]]:
        """Closed forms of det, adj_11 and adj_1j (j >= 2) of the resolvent to order 2, for N=1."""
        if self.scheme.conserved != 1:
            raise PreconditionError("Resolvent displays are defined for N=1")
        scheme = self.scheme.canonical()
        field, dim, q = scheme.field, scheme.dim, scheme.q
        g = self.build_G(scheme)
        lam, pi = scheme.lam, scheme.pi
        s = scheme.rates
        one = DiffOp.scalar(field, dim)
        zero = DiffOp.zero(field, dim)
        dt = DiffOp.dt(field, dim)
        others = range(1, q)
        inv = {i: 1 / s[i] for i in others}
        excess = {i: inv[i] - 1 for i in others}
        x = {i: dt + g[i, i] * (1 - s[i]) for i in others}
        g2 = g @ g

        sum_inv = sum((inv[i] for i in others), field.zero)
        diag_relaxed = zero
        for i in others:
            diag_relaxed = diag_relaxed + g[i, i] * excess[i]
        x_over_s = zero
        for i in others:
            x_over_s = x_over_s + x[i] * inv[i]

        det1 = (dt + g[0, 0]) * (pi / lam)
        det2 = dt * dt * (field.one / 2 + sum_inv) + g[0, 0] * dt * sum_inv + diag_relaxed * dt \
            - g[0, 0] * g[0, 0] * (field.one / 2) + g[0, 0] * diag_relaxed
        for ell in others:
            det2 = det2 - g[0, ell] * g[ell, 0] * (inv[ell] - (field.one / 2))
        det2 = det2 * (pi / lam ** 2)

        adj11_1 = (dt * sum_inv + diag_relaxed) * (pi / lam)
        adj11_2 = dt * dt * sum_inv + x_over_s * x_over_s
        for i in others:
            adj11_2 = adj11_2 - g2[i, i] * excess[i] - x[i] * x[i] * inv[i] ** 2
            for ell in others:
                if ell != i:
                    adj11_2 = adj11_2 - g[i, ell] * g[ell, i] * (excess[i] * excess[ell])
        adj11_2 = adj11_2 * (pi / (2 * lam ** 2))

        displays: Dict[str, List[DiffOp]] = {
            "det": [zero, det1, det2],
            "adj11": [one * pi, adj11_1, adj11_2],
        }
        for j in others:
            first = g[0, j] * (-excess[j] * pi / lam)
            second = g[0, 0] * g[0, j] + g[0, j] * x[j] * (2 * inv[j]) - g[0, j] * x_over_s * 2
            for ell in others:
                second = second + g[0, ell] * g[ell, j]
                if ell != j:
                    second = second + g[0, ell] * g[ell, j] * (2 * excess[ell])
            second = second * (excess[j] * pi / (2 * lam ** 2))
            displays[f"adj1{j + 1}"] = [zero, first, second]
        return displays

    def display_check(self) -> List[str]:
        """Compare the closed-form displays with the direct series det/adj."""
        expansion = self.expand_resolvent_det_adj(truncation=2)
        displays = self.closed_form_displays()
        diffs = []
        for name, coeffs in displays.items():
            if name == "det":
                actual = expansion.det
            else:
                actual = expansion.adj[0, int(name[4:]) - 1]
            for r, expected in enumerate(coeffs):
                got = actual.coefficient(r).rebase(expected.field)
                if got != expected:
                    diffs.append(f"{name} order {r}: {got!r} != {expected!r}")
        return diffs

    def perturbation_check(self) -> List[str]:
        """Compare the Taylor route with the direct series det/adj up to order 2."""
        direct = self.expand_resolvent_det_adj(truncation=2)
        taylor = self.perturbation_expansion(truncation=2)
        diffs = []
        if direct.det != taylor.det:
            diffs.append("determinant expansions differ")
        for i, j, entry in direct.adj.entries():
            if entry != taylor.adj[i, j]:
                diffs.append(f"adjugate entry ({i + 1},{j + 1}) differs")
        return diffs
