"""Scheme service: validation, moments-stream matrix and scheme matrices."""
from fractions import Fraction
from typing import List, Tuple

from src.algebra import LaurentPoly, OperatorPoly, coeff_is_constant, coeff_substitute, coeff_to_fraction
from src.matrix import RingMatrix
from src.models import EquilibriumExpr, LBMScheme
from src.schemas import IssueLevel, ValidationIssue, ValidationReport
from src.utils.errors import InversionError, MalformedCoefficientError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class SchemeService:
    def __init__(self, scheme: LBMScheme):
        self.scheme = scheme
        self._inverse = None

    def validate(self) -> ValidationReport:
        """Check invertibility, conservation and relaxation rates."""
        s = self.scheme
        issues: List[ValidationIssue] = []

        def error(component: str, message: str):
            issues.append(ValidationIssue(level=IssueLevel.ERROR, component=component, message=message))

        def warning(component: str, message: str):
            issues.append(ValidationIssue(level=IssueLevel.WARNING, component=component, message=message))

        if not s.lam:
            error("lattice_speed", "lattice speed is identically zero")
        if not s.moments.det():
            error("moments", "moment matrix is singular")

        for i in range(s.conserved):
            expected = EquilibriumExpr.moment(s.field, s.conserved, i)
            if s.equilibria[i] != expected:
                error(f"equilibria[{i + 1}]",
                      f"equilibrium of conserved moment m{i + 1} is {s.equilibria[i].to_text()}, expected m{i + 1}")

        for i in range(s.conserved, s.q):
            rate = s.rates[i]
            name = s.rate_name(i)
            if not rate:
                error(f"relaxation[{name}]", f"relaxation rate {name} is identically zero")
                continue
            try:
                bound = coeff_substitute(rate, s.bindings)
            except MalformedCoefficientError as exc:
                error(f"relaxation[{name}]", str(exc))
                continue
            if coeff_is_constant(bound):
                value = coeff_to_fraction(bound)
                if value == 0:
                    error(f"relaxation[{name}]", f"relaxation rate {name} vanishes for the bound parameters")
                elif not 0 < value <= 2:
                    warning(f"relaxation[{name}]", f"relaxation rate {name} = {value} lies outside (0, 2]")

        report = ValidationReport(valid=not any(i.level == IssueLevel.ERROR for i in issues), issues=issues)
        for issue in report.warnings:
            logger.warning(f"{s.name or 'scheme'}: {issue.component}: {issue.message}")
        logger.info(f"Validated {s.name or 'scheme'}: {len(report.errors)} errors, {len(report.warnings)} warnings")
        return report

    def moment_inverse(self) -> RingMatrix:
        if self._inverse is None:
            try:
                self._inverse = self.scheme.moments.inverse()
            except InversionError as exc:
                raise InversionError(f"moment matrix is not invertible: {exc}") from exc
        return self._inverse

    def _conjugated_shifts(self, sign: int) -> RingMatrix:
        s = self.scheme
        m, minv = s.moments, self.moment_inverse()
        zero = LaurentPoly.zero(s.field, s.dim)
        one = LaurentPoly.one(s.field, s.dim)

        def entry(i: int, k: int) -> LaurentPoly:
            terms = {}
            for j, c in enumerate(s.velocities):
                weight = m[i, j] * minv[j, k]
                if weight:
                    key = tuple(sign * v for v in c)
                    terms[key] = terms.get(key, s.field.zero) + weight
            return LaurentPoly(s.field, s.dim, terms)

        return RingMatrix.build(s.q, entry, zero, one)

    def stream_matrix(self) -> RingMatrix:
        """T = M diag(x^c_j) M^-1 over the shift ring."""
        return self._conjugated_shifts(1)

    def conjugate_stream_matrix(self) -> RingMatrix:
        """Stream matrix with reversed velocities; inverse of T."""
        return self._conjugated_shifts(-1)

    def scheme_matrices(self) -> Tuple[RingMatrix, RingMatrix]:
        """(A, B) = (T(I - S), T S)."""
        s = self.scheme
        t = self.stream_matrix()
        a = RingMatrix.build(s.q, lambda i, j: t[i, j] * (1 - s.rates[j]), t.zero, t.one)
        b = RingMatrix.build(s.q, lambda i, j: t[i, j] * s.rates[j], t.zero, t.one)
        return a, b

    def operator_matrices(self) -> Tuple[RingMatrix, RingMatrix]:
        """Scheme matrices lifted to polynomials in the time shift."""
        s = self.scheme
        zero, one = OperatorPoly.zero(s.field, s.dim), OperatorPoly.one(s.field, s.dim)
        a, b = self.scheme_matrices()
        return a.map(OperatorPoly.from_laurent, zero, one), b.map(OperatorPoly.from_laurent, zero, one)

    def numeric_moments(self, double: bool = False):
        """Specialized M, M^-1 and rates as exact fractions (or floats)."""
        s = self.scheme
        convert = (lambda c: float(coeff_to_fraction(coeff_substitute(c, s.bindings)))) if double else \
            (lambda c: coeff_to_fraction(coeff_substitute(c, s.bindings)))
        m = [[convert(s.moments[i, j]) for j in range(s.q)] for i in range(s.q)]
        minv_sym = self.moment_inverse()
        minv = [[convert(minv_sym[i, j]) for j in range(s.q)] for i in range(s.q)]
        rates = [convert(r) for r in s.rates]
        return m, minv, rates

    def lattice_speed(self) -> Fraction:
        return coeff_to_fraction(coeff_substitute(self.scheme.lam, self.scheme.bindings))
