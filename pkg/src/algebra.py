"""Exact coefficient field and the rings of space/time shift operators.

Coefficients are rational functions over QQ in a named parameter alphabet
(``sympy.polys.fields`` elements, graded lexicographic order). Every sparse
polynomial in this package (Laurent shifts, operator polynomials, differential
operators, equilibria) shares the ``SparsePolynomial`` base below.
"""
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex

from src.utils.errors import BindingError, HistoryError, MalformedCoefficientError, PoleError

Coeff = FracElement
Exponent = Tuple[int, ...]


class CoeffField:
    """Field of rational functions in the parameters of one scheme."""

    def __init__(self, names: Sequence[str] = ()):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate parameter names in {names}")
        self.names = names
        self.symbols = tuple(sp.Symbol(n) for n in names)
        self.field = FracField(self.symbols, QQ, grlex)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoeffField) and other.names == self.names

    def __hash__(self) -> int:
        return hash(("CoeffField", self.names))

    def __repr__(self) -> str:
        return f"CoeffField({', '.join(self.names)})"

    @property
    def zero(self) -> Coeff:
        return self.field.zero

    @property
    def one(self) -> Coeff:
        return self.field.one

    def gen(self, name: str) -> Coeff:
        try:
            return self.field.gens[self.names.index(name)]
        except ValueError:
            raise BindingError(f"Unknown parameter {name!r}; known: {', '.join(self.names) or 'none'}")

    def extended(self, *names: str) -> "CoeffField":
        """Field over the current alphabet plus the given names."""
        extra = [n for n in names if n not in self.names]
        if not extra:
            return self
        return CoeffField(self.names + tuple(extra))

    def coerce(self, value: Any) -> Coeff:
        if isinstance(value, FracElement):
            if value.field == self.field:
                return value
            return self.field.from_expr(value.as_expr())
        if isinstance(value, bool):
            raise TypeError("Booleans are not coefficients")
        if isinstance(value, int):
            return self.field.from_expr(sp.Integer(value))
        if isinstance(value, Fraction):
            return self.field.from_expr(sp.Rational(value.numerator, value.denominator))
        if isinstance(value, float):
            return self.coerce(Fraction(value).limit_denominator(10**12))
        if isinstance(value, str):
            from src.utils.expression_parser import parse_coefficient
            return parse_coefficient(value, self)
        if isinstance(value, sp.Expr):
            try:
                return self.field.from_expr(value)
            except ValueError as exc:
                raise MalformedCoefficientError(f"{value} is not a rational function of {self.names}") from exc
        raise TypeError(f"Cannot convert {type(value).__name__} to a coefficient")

    def fraction(self, numerator: Any, denominator: Any) -> Coeff:
        """Build numerator/denominator, rejecting a zero denominator."""
        den = self.coerce(denominator)
        if not den:
            raise MalformedCoefficientError(f"Zero denominator in {numerator}/{denominator}")
        return coeff_normalize(self.coerce(numerator) / den)


def coeff_normalize(c: Coeff) -> Coeff:
    """Canonical representative: common factors cancelled, monic-signed denominator."""
    if not c.denom:
        raise MalformedCoefficientError("Coefficient has a zero denominator")
    return c.field.new(c.numer, c.denom)


def _gen_index(c: Coeff, name: str) -> int:
    symbol = sp.Symbol(name)
    if symbol not in c.field.symbols:
        raise BindingError(f"Parameter {name!r} not in coefficient field {c.field.symbols}")
    return c.field.symbols.index(symbol)


def limit_at_zero(c: Coeff, name: str) -> Coeff:
    """Value of c as parameter `name` tends to zero."""
    c = coeff_normalize(c)
    index = _gen_index(c, name)
    den0 = c.denom.subs(index, 0)
    if not den0:
        raise PoleError(f"Pole at {name}=0 in {c.as_expr()}")
    return c.field.new(c.numer.subs(index, 0), den0)


def coeff_substitute(c: Coeff, bindings: Mapping[str, Any]) -> Coeff:
    """Substitute rational values for some of the parameters."""
    if not bindings:
        return c
    subs = {}
    for name, value in bindings.items():
        symbol = sp.Symbol(name)
        if symbol in c.field.symbols:
            value = Fraction(value) if not isinstance(value, float) else Fraction(value).limit_denominator(10**12)
            subs[symbol] = sp.Rational(value.numerator, value.denominator)
    if not subs:
        return c
    numer = c.numer.as_expr().subs(subs)
    denom = c.denom.as_expr().subs(subs)
    if denom == 0:
        raise MalformedCoefficientError(f"Substitution {bindings} zeroes the denominator of {c.as_expr()}")
    return c.field.from_expr(numer / denom)


def coeff_is_constant(c: Coeff) -> bool:
    return c.numer.is_ground and c.denom.is_ground


def coeff_to_fraction(c: Coeff) -> Fraction:
    if not coeff_is_constant(c):
        free = sorted(str(s) for s in c.as_expr().free_symbols)
        raise BindingError(f"Unbound parameters {', '.join(free)} in {c.as_expr()}")
    value = sp.Rational(c.as_expr())
    return Fraction(int(value.p), int(value.q))


def coeff_text(c: Coeff) -> str:
    return str(sp.factor(c.as_expr()))


def coeff_latex(c: Coeff) -> str:
    return sp.latex(sp.factor(c.as_expr()))


class SparsePolynomial:
    """Immutable sparse polynomial with integer exponent tuples over a CoeffField."""

    __slots__ = ("field", "nvars", "_terms", "_hash")

    def __init__(self, field: CoeffField, nvars: int, terms: Optional[Mapping[Exponent, Any]] = None):
        self.field = field
        self.nvars = nvars
        clean: Dict[Exponent, Coeff] = {}
        for key, value in (terms or {}).items():
            key = self._normalize_key(key)
            c = field.coerce(value)
            if c:
                clean[key] = clean.get(key, field.zero) + c
                if not clean[key]:
                    del clean[key]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, field: CoeffField, nvars: int, terms: Dict[Exponent, Coeff]):
        obj = cls.__new__(cls)
        obj.field = field
        obj.nvars = nvars
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    def _check_key(self, key: Exponent) -> None:
        pass

    def _normalize_key(self, key) -> Exponent:
        key = tuple(int(k) for k in key)
        if len(key) != self.nvars:
            raise ValueError(f"Exponent {key} has wrong length for {self.nvars} variables")
        self._check_key(key)
        return key

    def _unit_key(self):
        return (0,) * self.nvars

    def _combine_keys(self, k1, k2):
        return tuple(a + b for a, b in zip(k1, k2))

    def _like(self, terms: Dict[Exponent, Coeff]):
        return type(self)._raw(self.field, self.nvars, terms)

    def zero_like(self):
        return self._like({})

    def one_like(self):
        return self._like({self._unit_key(): self.field.one})

    # Access

    def items(self) -> Iterator[Tuple[Exponent, Coeff]]:
        return iter(sorted(self._terms.items()))

    def keys(self):
        return sorted(self._terms)

    def coeff(self, key: Exponent) -> Coeff:
        return self._terms.get(self._normalize_key(key), self.field.zero)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == self._unit_key() for k in self._terms)

    def constant_term(self) -> Coeff:
        return self.coeff(self._unit_key())

    def map_coeffs(self, fn: Callable[[Coeff], Any]):
        return self._like({k: self.field.coerce(fn(v)) for k, v in self._terms.items()})

    def rebase(self, field: CoeffField):
        return type(self)._raw(field, self.nvars, {k: field.coerce(v) for k, v in self._terms.items()})

    # Arithmetic

    def _compatible(self, other: Any) -> bool:
        if isinstance(other, SparsePolynomial):
            if type(other) is not type(self) or other.nvars != self.nvars:
                raise TypeError(f"Cannot combine {type(self).__name__}[{self.nvars}] "
                                f"with {type(other).__name__}[{other.nvars}]")
            return True
        return False

    def _as_poly(self, other: Any):
        if self._compatible(other):
            return other
        return self._like({self._unit_key(): self.field.coerce(other)})

    def __add__(self, other: Any):
        other = self._as_poly(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, self.field.zero) + v
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: Any):
        return self + (-self._as_poly(other))

    def __rsub__(self, other: Any):
        return self._as_poly(other) - self

    def __mul__(self, other: Any):
        if not self._compatible(other):
            c = self.field.coerce(other)
            if not c:
                return self.zero_like()
            return self._like({k: v * c for k, v in self._terms.items()})
        terms: Dict[Exponent, Coeff] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                key = self._combine_keys(k1, k2)
                terms[key] = terms.get(key, self.field.zero) + v1 * v2
        return self._like(terms)

    __rmul__ = __mul__

    def __truediv__(self, other: Any):
        if isinstance(other, SparsePolynomial):
            if not other.is_constant() or not other:
                raise TypeError("Division only by nonzero scalars")
            other = other.constant_term()
        c = self.field.coerce(other)
        if not c:
            raise ZeroDivisionError("Division of a polynomial by zero")
        return self._like({k: v / c for k, v in self._terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError(f"Negative power {n} of {type(self).__name__}")
        result, base = self.one_like(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SparsePolynomial):
            return type(other) is type(self) and other.nvars == self.nvars and other._terms == self._terms
        try:
            return self == self._as_poly(other)
        except (TypeError, MalformedCoefficientError):
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return f"{type(self).__name__}(0)"
        body = " + ".join(f"({coeff_text(v)})*{list(k)}" for k, v in self.items())
        return f"{type(self).__name__}({body})"


class LaurentPoly(SparsePolynomial):
    """Element of the group ring of Z^d: finite sums of space shifts."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.nvars

    @classmethod
    def zero(cls, field: CoeffField, dim: int) -> "LaurentPoly":
        return cls._raw(field, dim, {})

    @classmethod
    def one(cls, field: CoeffField, dim: int) -> "LaurentPoly":
        return cls._raw(field, dim, {(0,) * dim: field.one})

    @classmethod
    def shift(cls, field: CoeffField, vec: Sequence[int], coeff: Any = 1) -> "LaurentPoly":
        return cls(field, len(vec), {tuple(vec): coeff})

    def __pow__(self, n: int) -> "LaurentPoly":
        if n >= 0:
            return super().__pow__(n)
        if len(self._terms) != 1:
            raise ValueError("Only monomials are invertible in the shift ring")
        (key, value), = self._terms.items()
        inverse = self._like({tuple(-k for k in key): 1 / value})
        return inverse ** (-n)


class OperatorPoly(SparsePolynomial):
    """Polynomial in the time shift z with Laurent coefficients in space shifts.

    Exponent tuples are ``(k, v_1, ..., v_d)`` with time degree ``k >= 0``.
    """

    __slots__ = ()

    def _check_key(self, key: Exponent) -> None:
        if key[0] < 0:
            raise ValueError(f"Negative time degree in {key}")

    @property
    def dim(self) -> int:
        return self.nvars - 1

    @classmethod
    def zero(cls, field: CoeffField, dim: int) -> "OperatorPoly":
        return cls._raw(field, dim + 1, {})

    @classmethod
    def one(cls, field: CoeffField, dim: int) -> "OperatorPoly":
        return cls._raw(field, dim + 1, {(0,) * (dim + 1): field.one})

    @classmethod
    def z(cls, field: CoeffField, dim: int, power: int = 1) -> "OperatorPoly":
        return cls(field, dim + 1, {(power,) + (0,) * dim: 1})

    @classmethod
    def from_laurent(cls, poly: LaurentPoly, time_degree: int = 0) -> "OperatorPoly":
        return cls._raw(poly.field, poly.dim + 1, {(time_degree,) + k: v for k, v in poly._terms.items()})

    @property
    def time_degree(self) -> int:
        return max((k[0] for k in self._terms), default=0)

    @property
    def min_time_degree(self) -> int:
        return min((k[0] for k in self._terms), default=0)

    def coefficient(self, k: int) -> LaurentPoly:
        """Space-shift coefficient of z^k."""
        return LaurentPoly._raw(self.field, self.dim, {key[1:]: v for key, v in self._terms.items() if key[0] == k})

    def time_levels(self) -> Iterable[int]:
        return sorted({k[0] for k in self._terms})

    def shift_time(self, n: int) -> "OperatorPoly":
        """Multiply by z^n; negative n requires exact divisibility."""
        if n < 0 and self._terms and self.min_time_degree + n < 0:
            raise ValueError(f"{self!r} is not divisible by z^{-n}")
        return self._like({(k[0] + n,) + k[1:]: v for k, v in self._terms.items()})


def ring_mul(a: SparsePolynomial, b: SparsePolynomial) -> SparsePolynomial:
    """Product in the ring shared by a and b."""
    if type(a) is not type(b) or a.nvars != b.nvars:
        raise TypeError(f"ring_mul needs the same ring, got {type(a).__name__} and {type(b).__name__}")
    return a * b


def shift_grid(u: np.ndarray, vec: Exponent) -> np.ndarray:
    if not any(vec):
        return u
    return np.roll(u, shift=tuple(vec), axis=tuple(range(len(vec))))


def apply_operator(op: Union[OperatorPoly, LaurentPoly], history: Sequence[np.ndarray], base: int = 0,
                   number: Callable[[Fraction], Any] = lambda x: x) -> np.ndarray:
    """Evaluate an operator with specialized coefficients on a grid history.

    ``history[k]`` holds u(t0 + k dt) on a periodic grid; the result is the
    operator applied at level ``base``. ``number`` converts each exact weight
    to the arithmetic of the grid (identity for rational mode, ``float``
    for double mode).
    """
    if isinstance(op, LaurentPoly):
        op = OperatorPoly.from_laurent(op)
    if not history:
        raise HistoryError("Empty grid history")
    if base < 0 or base + op.time_degree >= len(history):
        raise HistoryError(f"Operator needs {base + op.time_degree + 1} levels, history has {len(history)}")
    result = np.zeros_like(history[base])
    if result.dtype == object:
        result[...] = Fraction(0)
    for key, value in op.items():
        k, vec = key[0], key[1:]
        if len(vec) != history[base].ndim:
            raise ValueError(f"Operator dimension {len(vec)} does not match grid dimension {history[base].ndim}")
        result = result + shift_grid(history[base + k], vec) * number(coeff_to_fraction(value))
    return result
