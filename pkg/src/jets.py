"""Jet polynomials: nonlinear differential expressions in the conserved moments.

A jet variable ``JetVar(i, a, nu)`` stands for d_t^a d^nu m_{i+1}. Monomials are
sorted tuples of ``(JetVar, power)`` pairs, so equal expressions always share
one representation.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from src.algebra import Coeff, CoeffField, SparsePolynomial, coeff_latex, coeff_text
from src.utils.errors import EliminationError

AXES = "xyz"


class JetVar(NamedTuple):
    index: int
    time: int
    space: Tuple[int, ...]

    def promote(self, axis: Optional[int] = None) -> "JetVar":
        """One more derivative: in time when ``axis`` is None, else along ``axis``."""
        if axis is None:
            return JetVar(self.index, self.time + 1, self.space)
        space = list(self.space)
        space[axis] += 1
        return JetVar(self.index, self.time, tuple(space))

    def spatial(self) -> "JetVar":
        return JetVar(self.index, 0, self.space)

    def text(self) -> str:
        name = f"m{self.index + 1}"
        ops = "t" * self.time + "".join(AXES[k] * n for k, n in enumerate(self.space))
        return f"d{ops}({name})" if ops else name

    def latex(self) -> str:
        name = f"m_{{{self.index + 1}}}"
        parts = []
        if self.time:
            parts.append(r"\partial_{t}" + (f"^{{{self.time}}}" if self.time > 1 else ""))
        for k, n in enumerate(self.space):
            if n:
                parts.append(rf"\partial_{{{AXES[k]}}}" + (f"^{{{n}}}" if n > 1 else ""))
        return " ".join(parts + [name])


Monomial = Tuple[Tuple[JetVar, int], ...]


def _merge(k1: Monomial, k2: Monomial) -> Monomial:
    powers: Dict[JetVar, int] = dict(k1)
    for v, p in k2:
        powers[v] = powers.get(v, 0) + p
    return tuple(sorted((v, p) for v, p in powers.items() if p))


def _drop_one(key: Monomial, v: JetVar) -> Monomial:
    return tuple((w, p - 1 if w == v else p) for w, p in key if w != v or p > 1)


class JetPoly(SparsePolynomial):
    """Polynomial in jet variables; ``nvars`` holds the space dimension."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.nvars

    def _normalize_key(self, key) -> Monomial:
        powers: Dict[JetVar, int] = {}
        for v, p in key:
            index, time, space = v
            v = JetVar(int(index), int(time), tuple(int(n) for n in space))
            if len(v.space) != self.nvars:
                raise ValueError(f"Jet {v} does not live in dimension {self.nvars}")
            if v.index < 0 or v.time < 0 or any(n < 0 for n in v.space):
                raise ValueError(f"Negative index in jet {v}")
            if p < 0:
                raise ValueError(f"Negative power of jet {v.text()}")
            powers[v] = powers.get(v, 0) + int(p)
        return tuple(sorted((v, p) for v, p in powers.items() if p))

    def _unit_key(self) -> Monomial:
        return ()

    def _combine_keys(self, k1: Monomial, k2: Monomial) -> Monomial:
        return _merge(k1, k2)

    # Constructors

    @classmethod
    def zero(cls, field: CoeffField, dim: int) -> "JetPoly":
        return cls._raw(field, dim, {})

    @classmethod
    def constant(cls, field: CoeffField, dim: int, c: Any) -> "JetPoly":
        return cls(field, dim, {(): c})

    @classmethod
    def var(cls, field: CoeffField, dim: int, index: int, time: int = 0,
            space: Optional[Sequence[int]] = None) -> "JetPoly":
        space = tuple(space) if space is not None else (0,) * dim
        return cls(field, dim, {((JetVar(index, time, space), 1),): 1})

    @classmethod
    def from_moment_polynomial(cls, poly: SparsePolynomial, dim: int) -> "JetPoly":
        """Lift a polynomial whose exponent tuple runs over m1..mN."""
        terms = {}
        for key, c in poly.items():
            terms[tuple((JetVar(i, 0, (0,) * dim), e) for i, e in enumerate(key) if e)] = c
        return cls(poly.field, dim, terms)

    # Structure

    def variables(self) -> List[JetVar]:
        return sorted({v for key in self._terms for v, _ in key})

    def has_time_jets(self) -> bool:
        return any(v.time for v in self.variables())

    def degree(self) -> int:
        return max((sum(p for _, p in key) for key in self._terms), default=0)

    def diff_var(self, v: JetVar) -> "JetPoly":
        """Partial derivative with respect to one jet variable."""
        terms: Dict[Monomial, Coeff] = {}
        for key, c in self._terms.items():
            for w, p in key:
                if w == v:
                    new = _drop_one(key, v)
                    terms[new] = terms.get(new, self.field.zero) + c * p
        return self._like(terms)

    def _total(self, promote: Callable[[JetVar], JetVar]) -> "JetPoly":
        terms: Dict[Monomial, Coeff] = {}
        for key, c in self._terms.items():
            for v, p in key:
                new = _merge(_drop_one(key, v), ((promote(v), 1),))
                terms[new] = terms.get(new, self.field.zero) + c * p
        return self._like(terms)

    def total_dt(self) -> "JetPoly":
        return self._total(lambda v: v.promote())

    def total_dx(self, axis: int) -> "JetPoly":
        return self._total(lambda v: v.promote(axis))

    def spatial_derivative(self, nu: Sequence[int]) -> "JetPoly":
        result = self
        for axis, n in enumerate(nu):
            for _ in range(n):
                result = result.total_dx(axis)
        return result

    def apply_diffop(self, op: SparsePolynomial) -> "JetPoly":
        """Apply a differential operator keyed by ``(a, nu...)``."""
        result = self.zero_like()
        cache: Dict[Tuple[int, ...], JetPoly] = {}
        for key, c in op.items():
            if key not in cache:
                derived = self
                for _ in range(key[0]):
                    derived = derived.total_dt()
                cache[key] = derived.spatial_derivative(key[1:])
            result = result + cache[key] * c
        return result

    def substitute(self, rules: Mapping[JetVar, "JetPoly"]) -> "JetPoly":
        """Replace jet variables by jet polynomials."""
        result = self.zero_like()
        for key, c in self._terms.items():
            term = self.one_like() * c
            for v, p in key:
                factor = rules.get(v)
                if factor is None:
                    factor = self._like({((v, 1),): self.field.one})
                term = term * factor ** p
            result = result + term
        return result

    # Rendering

    def _render(self, coeff: Callable[[Coeff], str], var: Callable[[JetVar, int], str], sep: str) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, c in self.items():
            factors = sep.join(var(v, p) for v, p in key)
            if not factors:
                parts.append(f"({coeff(c)})")
            elif c == 1:
                parts.append(factors)
            else:
                parts.append(f"({coeff(c)}){sep}{factors}")
        return " + ".join(parts)

    def text(self) -> str:
        return self._render(coeff_text, lambda v, p: v.text() + (f"**{p}" if p > 1 else ""), "*")

    def latex(self) -> str:
        def var(v: JetVar, p: int) -> str:
            body = v.latex()
            return f"\\left({body}\\right)^{{{p}}}" if p > 1 else body
        return self._render(coeff_latex, var, " ")


class TimeEliminator:
    """Replace d_t^a d^nu m_l by spatial jets using d_t m_l = -flux_l."""

    def __init__(self, fluxes: Mapping[int, JetPoly]):
        for index, flux in fluxes.items():
            if flux.has_time_jets():
                raise EliminationError(f"Elimination rule for m{index + 1} still contains time derivatives")
        self.fluxes = dict(fluxes)
        self._memo: Dict[JetVar, JetPoly] = {}

    def rule(self, v: JetVar) -> JetPoly:
        if v in self._memo:
            return self._memo[v]
        if v.index not in self.fluxes:
            raise EliminationError(f"No evolution equation available to eliminate {v.text()}")
        if v.time == 1:
            result = (-self.fluxes[v.index]).spatial_derivative(v.space)
        else:
            lower = self.rule(JetVar(v.index, v.time - 1, v.space))
            result = self.time_derivative(lower)
        self._memo[v] = result
        return result

    def time_derivative(self, p: JetPoly) -> JetPoly:
        """d_t of a spatial-jet polynomial, re-expressed with spatial jets."""
        result = p.zero_like()
        for v in p.variables():
            result = result + p.diff_var(v) * self.rule(v.promote())
        return result

    def __call__(self, p: JetPoly) -> JetPoly:
        rules = {v: self.rule(v) for v in p.variables() if v.time}
        return p.substitute(rules) if rules else p


def eliminate_time_derivatives(p: JetPoly, fluxes: Mapping[int, JetPoly]) -> JetPoly:
    """Spatial-only form of p given the leading-order equations d_t m_l + flux_l = 0."""
    return TimeEliminator(fluxes)(p)


@dataclass(frozen=True)
class PDEEquation:
    """d_t m_i + sum_r dx^r fluxes[r] = O(dx^len(fluxes))."""

    index: int
    fluxes: Tuple[JetPoly, ...]

    @property
    def order(self) -> int:
        return len(self.fluxes)

    def rebase(self, field: CoeffField) -> "PDEEquation":
        return PDEEquation(self.index, tuple(f.rebase(field) for f in self.fluxes))

    def text(self) -> str:
        head = f"dt(m{self.index + 1})"
        parts = [head]
        for r, flux in enumerate(self.fluxes):
            if not flux:
                continue
            body = flux.text()
            parts.append(body if r == 0 else (f"dx*({body})" if r == 1 else f"dx**{r}*({body})"))
        return " + ".join(parts) + f" = O(dx**{self.order})"

    def latex(self) -> str:
        parts = [rf"\partial_{{t}} m_{{{self.index + 1}}}"]
        for r, flux in enumerate(self.fluxes):
            if not flux:
                continue
            body = flux.latex()
            parts.append(body if r == 0 else (rf"\Delta x \left({body}\right)" if r == 1
                                              else rf"\Delta x^{{{r}}} \left({body}\right)"))
        return " + ".join(parts) + rf" = O(\Delta x^{{{self.order}}})"


@dataclass(frozen=True)
class PDESystem:
    equations: Tuple[PDEEquation, ...]
    route: str = ""
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return min((e.order for e in self.equations), default=0)

    def equation(self, index: int) -> PDEEquation:
        for e in self.equations:
            if e.index == index:
                return e
        raise KeyError(f"No equation for m{index + 1}")

    def truncated(self, order: int) -> "PDESystem":
        return PDESystem(tuple(PDEEquation(e.index, e.fluxes[:order]) for e in self.equations),
                         self.route, self.notes)

    def text(self) -> str:
        return "\n".join(e.text() for e in self.equations)

    def latex(self) -> str:
        return "\n".join(e.latex() for e in self.equations)


@dataclass(frozen=True)
class PDEComparison:
    equal: bool
    differences: Tuple[Tuple[int, int, JetPoly], ...] = ()

    def describe(self) -> List[str]:
        return [f"m{i + 1}, dx^{r}: {d.text()}" for i, r, d in self.differences]


def _common_field(fields: Iterable[CoeffField]) -> CoeffField:
    names: List[str] = []
    for f in fields:
        names += [n for n in f.names if n not in names]
    return CoeffField(names)


def pde_equal(a: PDESystem, b: PDESystem) -> PDEComparison:
    """Compare two systems coefficient by coefficient in a shared parameter field."""
    if sorted(e.index for e in a.equations) != sorted(e.index for e in b.equations):
        raise ValueError("Systems describe different conserved moments")
    if a.order != b.order:
        raise ValueError(f"Systems have different orders {a.order} and {b.order}")
    fields = [f.field for e in a.equations + b.equations for f in e.fluxes]
    common = _common_field(fields)
    differences = []
    for ea in a.equations:
        eb = b.equation(ea.index).rebase(common)
        ea = ea.rebase(common)
        for r in range(a.order):
            d = ea.fluxes[r] - eb.fluxes[r]
            if d:
                differences.append((ea.index, r, d))
    return PDEComparison(not differences, tuple(differences))
