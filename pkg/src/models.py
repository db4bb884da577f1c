"""Domain models: lattice Boltzmann schemes and their finite-difference reductions."""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from src.algebra import (Coeff, CoeffField, OperatorPoly, SparsePolynomial, coeff_substitute, coeff_text,
                         coeff_to_fraction)
from src.matrix import RingMatrix
from src.utils.errors import SchemeValidationError


class EquilibriumExpr(SparsePolynomial):
    """Polynomial in the conserved moments m1..mN (exponent tuple of length N)."""

    __slots__ = ()

    def _check_key(self, key) -> None:
        if any(k < 0 for k in key):
            raise ValueError(f"Negative exponent in equilibrium monomial {key}")

    @property
    def conserved(self) -> int:
        return self.nvars

    @classmethod
    def moment(cls, field: CoeffField, conserved: int, i: int) -> "EquilibriumExpr":
        key = [0] * conserved
        key[i] = 1
        return cls(field, conserved, {tuple(key): 1})

    @classmethod
    def constant(cls, field: CoeffField, conserved: int, c: Any) -> "EquilibriumExpr":
        return cls(field, conserved, {(0,) * conserved: c})

    def diff(self, ell: int) -> "EquilibriumExpr":
        """Partial derivative with respect to m_{ell+1}."""
        terms: Dict[Tuple[int, ...], Coeff] = {}
        for key, c in self._terms.items():
            if key[ell]:
                new = list(key)
                new[ell] -= 1
                terms[tuple(new)] = c * key[ell]
        return self._like(terms)

    def degree(self) -> int:
        return max((sum(k) for k in self._terms), default=0)

    def is_linear(self) -> bool:
        return self.degree() <= 1

    def substitute(self, bindings: Mapping[str, Any]) -> "EquilibriumExpr":
        return self.map_coeffs(lambda c: coeff_substitute(c, bindings))

    def numeric_terms(self, bindings: Mapping[str, Any]) -> List[Tuple[Tuple[int, ...], Fraction]]:
        return [(k, coeff_to_fraction(coeff_substitute(c, bindings))) for k, c in self.items()]

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, c in self.items():
            factors = [f"m{i + 1}" + (f"**{e}" if e > 1 else "") for i, e in enumerate(key) if e]
            coeff = coeff_text(c)
            if not factors:
                parts.append(f"({coeff})")
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"({coeff})*" + "*".join(factors))
        return " + ".join(parts)


def evaluate_numeric(terms: Sequence[Tuple[Tuple[int, ...], Any]], moments: Sequence[Any]) -> Any:
    """Evaluate a specialized equilibrium on arrays (or scalars) of conserved moments."""
    total = None
    for key, c in terms:
        value = c
        for i, e in enumerate(key):
            if e:
                value = value * moments[i] ** e
        total = value if total is None else total + value
    if total is None:
        return moments[0] * 0
    if not hasattr(total, "shape"):
        total = moments[0] * 0 + total
    return total


@dataclass(frozen=True)
class LBMScheme:
    """Multiple-relaxation-times scheme in moment form.

    Indices are 0-based: moments ``0..conserved-1`` are conserved.
    """

    field: CoeffField
    dim: int
    velocities: Tuple[Tuple[int, ...], ...]
    lam: Coeff
    moments: RingMatrix
    conserved: int
    rates: Tuple[Coeff, ...]
    equilibria: Tuple[EquilibriumExpr, ...]
    bindings: Mapping[str, Fraction] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        q = len(self.velocities)
        problems = []
        if self.dim not in (1, 2, 3):
            problems.append(f"dimension {self.dim} is not 1, 2 or 3")
        if any(len(c) != self.dim for c in self.velocities):
            problems.append("velocities must all have the scheme dimension")
        if self.moments.size != q:
            problems.append(f"moment matrix is {self.moments.size}x{self.moments.size}, expected {q}x{q}")
        if len(self.rates) != q:
            problems.append(f"{len(self.rates)} relaxation rates for {q} velocities")
        if len(self.equilibria) != q:
            problems.append(f"{len(self.equilibria)} equilibria for {q} velocities")
        if not 1 <= self.conserved <= q - 1:
            problems.append(f"conserved count {self.conserved} outside [1, {q - 1}]")
        if any(eq.conserved != self.conserved for eq in self.equilibria):
            problems.append("equilibria must be polynomials in the conserved moments")
        if problems:
            raise SchemeValidationError(problems)

    @property
    def q(self) -> int:
        return len(self.velocities)

    @property
    def pi(self) -> Coeff:
        """Product of the non-conserved relaxation rates."""
        result = self.field.one
        for s in self.rates[self.conserved:]:
            result = result * s
        return result

    def rate_name(self, i: int) -> str:
        return f"s{i + 1}"

    def with_rates(self, rates: Sequence[Any]) -> "LBMScheme":
        return replace(self, rates=tuple(self.field.coerce(s) for s in rates))

    def with_conserved_rates(self, values: Sequence[Any]) -> "LBMScheme":
        if len(values) != self.conserved:
            raise ValueError(f"Expected {self.conserved} conserved rates, got {len(values)}")
        return self.with_rates(list(values) + list(self.rates[self.conserved:]))

    def canonical(self) -> "LBMScheme":
        """Same scheme with every conserved rate set to zero."""
        return self.with_conserved_rates([0] * self.conserved)

    def rebase(self, field: CoeffField) -> "LBMScheme":
        return replace(
            self,
            field=field,
            lam=field.coerce(self.lam),
            moments=self.moments.map(field.coerce, field.zero, field.one),
            rates=tuple(field.coerce(s) for s in self.rates),
            equilibria=tuple(eq.rebase(field) for eq in self.equilibria),
        )

    def with_symbolic_rate(self, i: int, name: str) -> "LBMScheme":
        """Replace rate i by a fresh parameter (extending the field)."""
        scheme = self.rebase(self.field.extended(name))
        rates = list(scheme.rates)
        rates[i] = scheme.field.gen(name)
        return replace(scheme, rates=tuple(rates))

    def specialized(self, bindings: Optional[Mapping[str, Any]] = None) -> "LBMScheme":
        """Substitute bound parameters into every coefficient (unbound ones stay symbolic)."""
        bindings = dict(self.bindings if bindings is None else bindings)
        sub = lambda c: coeff_substitute(c, bindings)  # noqa: E731
        return replace(
            self,
            lam=sub(self.lam),
            moments=self.moments.map(sub, self.field.zero, self.field.one),
            rates=tuple(sub(s) for s in self.rates),
            equilibria=tuple(eq.substitute(bindings) for eq in self.equilibria),
        )

    def equilibria_linear(self) -> bool:
        return all(eq.is_linear() for eq in self.equilibria)


@dataclass(frozen=True)
class FDScheme:
    """Multi-step scheme for one conserved moment.

    Reads ``lhs m_i = sum rhs_conserved[j] m_j + sum rhs_equilibrium[j] m_j^eq``
    with ``lhs`` monic of degree ``steps`` in z.
    """

    index: int
    lhs: OperatorPoly
    rhs_conserved: Tuple[Tuple[OperatorPoly, int], ...]
    rhs_equilibrium: Tuple[Tuple[OperatorPoly, int], ...]
    steps: int

    def operators(self) -> List[Tuple[str, int, OperatorPoly]]:
        """(kind, source index, operator) for every term, lhs first."""
        out = [("lhs", self.index, self.lhs)]
        out += [("conserved", j, op) for op, j in self.rhs_conserved]
        out += [("equilibrium", j, op) for op, j in self.rhs_equilibrium]
        return out

    def explicit_terms(self) -> List[Tuple[str, int, int, Tuple[int, ...], Coeff]]:
        """Update-rule triples: (kind, source, time level, offset, weight).

        Time level 0 is t, the newest stored level; the rule produces t + dt.
        """
        shift = self.steps - 1
        terms = []
        for key, c in self.lhs.items():
            if key[0] < self.steps:
                terms.append(("conserved", self.index, key[0] - shift, key[1:], -c))
        for kind, j, op in self.operators()[1:]:
            for key, c in op.items():
                terms.append((kind, j, key[0] - shift, key[1:], c))
        return terms

    def diff(self, other: "FDScheme") -> List[str]:
        """Human-readable differences, empty when the schemes coincide."""
        out = []
        if self.steps != other.steps:
            out.append(f"m{self.index + 1}: {self.steps} vs {other.steps} time levels")
        if self.lhs != other.lhs:
            out.append(f"m{self.index + 1} lhs: {self.lhs!r} vs {other.lhs!r}")
        mine = {(kind, j): op for kind, j, op in self.operators()[1:]}
        theirs = {(kind, j): op for kind, j, op in other.operators()[1:]}
        for key in sorted(set(mine) | set(theirs)):
            a, b = mine.get(key), theirs.get(key)
            if a != b:
                out.append(f"m{self.index + 1} {key[0]} term from index {key[1] + 1}: {a!r} vs {b!r}")
        return out


@dataclass(frozen=True)
class Stencil:
    """FD scheme with every coefficient bound to a rational number."""

    scheme: FDScheme
    equilibria: Mapping[int, Tuple[Tuple[Tuple[int, ...], Fraction], ...]]

    @property
    def index(self) -> int:
        return self.scheme.index

    @property
    def steps(self) -> int:
        return self.scheme.steps

    def weights(self) -> List[Tuple[str, int, int, Tuple[int, ...], Fraction]]:
        return [(kind, j, level, offset, coeff_to_fraction(c))
                for kind, j, level, offset, c in self.scheme.explicit_terms()]
