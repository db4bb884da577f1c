"""Truncated power series in dx with differential-operator coefficients."""
from math import factorial
from typing import Any, Callable, Optional, Sequence, Tuple

from src.algebra import Coeff, CoeffField, LaurentPoly, OperatorPoly, SparsePolynomial, limit_at_zero
from src.matrix import RingMatrix, ring_units


class DiffOp(SparsePolynomial):
    """Commutative polynomial in d_t, d_x1..d_xd.

    Exponent tuples are ``(a, nu_1, ..., nu_d)``: time order then the spatial
    multi-index.
    """

    __slots__ = ()

    def _check_key(self, key) -> None:
        if any(k < 0 for k in key):
            raise ValueError(f"Negative derivative order in {key}")

    @property
    def dim(self) -> int:
        return self.nvars - 1

    @classmethod
    def scalar(cls, field: CoeffField, dim: int, c: Any = 1) -> "DiffOp":
        return cls(field, dim + 1, {(0,) * (dim + 1): c})

    @classmethod
    def zero(cls, field: CoeffField, dim: int) -> "DiffOp":
        return cls._raw(field, dim + 1, {})

    @classmethod
    def dt(cls, field: CoeffField, dim: int, order: int = 1) -> "DiffOp":
        return cls(field, dim + 1, {(order,) + (0,) * dim: 1})

    @classmethod
    def dx(cls, field: CoeffField, dim: int, axis: int, order: int = 1) -> "DiffOp":
        key = [0] * (dim + 1)
        key[axis + 1] = order
        return cls(field, dim + 1, {tuple(key): 1})


class Series:
    """Coefficients c_0..c_R of sum_r c_r dx^r, reliable up to dx^R."""

    __slots__ = ("coeffs", "truncation", "_zero")

    def __init__(self, coeffs: Sequence[Any], truncation: int, zero: Any = None):
        if truncation < 0:
            raise ValueError("Truncation order must be nonnegative")
        coeffs = list(coeffs)[: truncation + 1]
        if zero is None:
            if not coeffs:
                raise ValueError("Series without coefficients needs an explicit zero")
            zero = ring_units(coeffs[0])[0]
        coeffs += [zero] * (truncation + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.truncation = truncation
        self._zero = zero

    @classmethod
    def constant(cls, c: Any, truncation: int) -> "Series":
        return cls([c], truncation, ring_units(c)[0])

    @classmethod
    def monomial(cls, c: Any, power: int, truncation: int) -> "Series":
        zero = ring_units(c)[0]
        return cls([zero] * power + [c], truncation, zero)

    def zero_like(self) -> "Series":
        return Series([], self.truncation, self._zero)

    def one_like(self) -> "Series":
        return Series([ring_units(self._zero)[1]], self.truncation, self._zero)

    def _lift(self, other: Any) -> "Series":
        if isinstance(other, Series):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            other = self.one_like().coeffs[0] * other
        return Series([other], self.truncation, self._zero)

    def coefficient(self, r: int) -> Any:
        if r > self.truncation:
            raise ValueError(f"Coefficient dx^{r} is beyond truncation order {self.truncation}")
        return self.coeffs[r]

    def valuation(self) -> Optional[int]:
        """Index of the first nonzero coefficient (None for the zero series)."""
        for r, c in enumerate(self.coeffs):
            if c:
                return r
        return None

    def divide_by_dx(self, k: int = 1) -> "Series":
        if any(self.coeffs[:k]):
            raise ValueError(f"Series is not divisible by dx^{k}")
        if k > self.truncation:
            raise ValueError("Nothing reliable left after division")
        return Series(self.coeffs[k:], self.truncation - k, self._zero)

    def map(self, fn: Callable[[Any], Any]) -> "Series":
        return Series([fn(c) for c in self.coeffs], self.truncation, fn(self._zero))

    def __add__(self, other: Any) -> "Series":
        other = self._lift(other)
        n = min(self.truncation, other.truncation)
        return Series([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])], n, self._zero)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series([-c for c in self.coeffs], self.truncation, self._zero)

    def __sub__(self, other: Any) -> "Series":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "Series":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "Series":
        if not isinstance(other, Series):
            return Series([c * other for c in self.coeffs], self.truncation, self._zero)
        n = min(self.truncation, other.truncation)
        out = [self._zero] * (n + 1)
        for i in range(n + 1):
            a = self.coeffs[i]
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return Series(out, n, self._zero)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Series":
        return Series([c / other for c in self.coeffs], self.truncation, self._zero)

    def __pow__(self, n: int) -> "Series":
        result = self.one_like()
        for _ in range(n):
            result = result * self
        return result

    def __bool__(self) -> bool:
        return any(bool(c) for c in self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            try:
                other = self._lift(other)
            except Exception:
                return NotImplemented
        n = min(self.truncation, other.truncation)
        return all(a == b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1]))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Series({list(self.coeffs)!r}, truncation={self.truncation})"


def _axis_shift_series(field: CoeffField, dim: int, axis: int, v: int, truncation: int) -> Series:
    coeffs = []
    for r in range(truncation + 1):
        c = field.coerce((-v) ** r) / factorial(r)
        coeffs.append(DiffOp.dx(field, dim, axis, r) * c if r else DiffOp.scalar(field, dim, c))
    return Series(coeffs, truncation)


def expand_shift(field: CoeffField, vec: Sequence[int], truncation: int) -> Series:
    """Series of the space shift x^vec: sum (-dx)^|nu| vec^nu / nu! d^nu."""
    dim = len(vec)
    result = Series.constant(DiffOp.scalar(field, dim), truncation)
    for axis, v in enumerate(vec):
        if v:
            result = result * _axis_shift_series(field, dim, axis, v, truncation)
    return result


def expand_time_shift(field: CoeffField, dim: int, lam: Coeff, truncation: int) -> Series:
    """Series of the time shift z under acoustic scaling dt = dx / lam."""
    coeffs = []
    for r in range(truncation + 1):
        c = field.one / (lam ** r * factorial(r))
        coeffs.append(DiffOp.dt(field, dim, r) * c if r else DiffOp.scalar(field, dim, c))
    return Series(coeffs, truncation)


def expand_laurent(poly: LaurentPoly, truncation: int) -> Series:
    result = Series([], truncation, DiffOp.zero(poly.field, poly.dim))
    for vec, c in poly.items():
        result = result + expand_shift(poly.field, vec, truncation) * c
    return result


def expand_operator(op: OperatorPoly, lam: Coeff, truncation: int) -> Series:
    """Asymptotic series of an operator polynomial in z and space shifts."""
    zeta = expand_time_shift(op.field, op.dim, lam, truncation)
    result = Series([], truncation, DiffOp.zero(op.field, op.dim))
    for key, c in op.items():
        k, vec = key[0], key[1:]
        result = result + (zeta ** k) * expand_shift(op.field, vec, truncation) * c
    return result


def series_matrix_coefficient(m: RingMatrix, r: int) -> RingMatrix:
    """Matrix of the dx^r coefficients of a matrix of series."""
    zero = m.zero.coeffs[0]
    one = m.one.coeffs[0]
    return m.map(lambda s: s.coefficient(r), zero, one)


def series_det_adj(m: RingMatrix) -> Tuple[Series, RingMatrix]:
    """Determinant and adjugate computed directly in the truncated series ring."""
    return m.det(), m.adjugate()


def diffop_limit(op: DiffOp, name: str) -> DiffOp:
    return op.map_coeffs(lambda c: limit_at_zero(c, name))


def series_limit(s: Series, name: str) -> Series:
    """Coefficientwise limit as a parameter tends to zero."""
    return s.map(lambda op: diffop_limit(op, name))


def series_matrix_limit(m: RingMatrix, name: str) -> RingMatrix:
    return m.map(lambda s: series_limit(s, name))
