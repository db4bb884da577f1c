"""Square matrices over commutative rings (coefficients, shift operators, series)."""
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from src.utils.errors import InversionError


def ring_units(entry: Any) -> Tuple[Any, Any]:
    """Zero and one of the ring an entry belongs to."""
    if hasattr(entry, "zero_like"):
        return entry.zero_like(), entry.one_like()
    if hasattr(entry, "field") and hasattr(entry.field, "zero"):
        return entry.field.zero, entry.field.one
    if isinstance(entry, float):
        return 0.0, 1.0
    if isinstance(entry, complex):
        return 0j, 1 + 0j
    return type(entry)(0), type(entry)(1)


class RingMatrix:
    """Immutable q x q matrix; entries only need +, -, * and truthiness."""

    __slots__ = ("rows", "zero", "one")

    def __init__(self, rows: Sequence[Sequence[Any]], zero: Any = None, one: Any = None):
        rows = tuple(tuple(r) for r in rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError(f"Matrix must be square, got row lengths {[len(r) for r in rows]}")
        if zero is None or one is None:
            if not rows:
                raise ValueError("Empty matrix needs explicit ring units")
            zero, one = ring_units(rows[0][0])
        self.rows = rows
        self.zero = zero
        self.one = one

    # Constructors

    @classmethod
    def identity(cls, q: int, zero: Any, one: Any) -> "RingMatrix":
        return cls([[one if i == j else zero for j in range(q)] for i in range(q)], zero, one)

    @classmethod
    def zeros(cls, q: int, zero: Any, one: Any) -> "RingMatrix":
        return cls([[zero] * q for _ in range(q)], zero, one)

    @classmethod
    def diagonal(cls, entries: Sequence[Any], zero: Any, one: Any) -> "RingMatrix":
        q = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(q)] for i in range(q)], zero, one)

    @classmethod
    def build(cls, q: int, fn: Callable[[int, int], Any], zero: Any, one: Any) -> "RingMatrix":
        return cls([[fn(i, j) for j in range(q)] for i in range(q)], zero, one)

    def _like(self, rows) -> "RingMatrix":
        return RingMatrix(rows, self.zero, self.one)

    # Access

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        i, j = index
        return self.rows[i][j]

    def row(self, i: int) -> Tuple[Any, ...]:
        return self.rows[i]

    def entries(self) -> Iterable[Tuple[int, int, Any]]:
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                yield i, j, v

    def map(self, fn: Callable[[Any], Any], zero: Any = None, one: Any = None) -> "RingMatrix":
        if zero is None:
            zero, one = fn(self.zero), fn(self.one)
        return RingMatrix([[fn(v) for v in r] for r in self.rows], zero, one)

    # Arithmetic

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        return self._like([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return self._like([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "RingMatrix":
        return self._like([[-a for a in r] for r in self.rows])

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if other.size != self.size:
            raise ValueError(f"Size mismatch {self.size} vs {other.size}")
        q = self.size
        out = []
        for i in range(q):
            row = []
            for j in range(q):
                acc = self.zero
                for k in range(q):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return self._like(out)

    def __mul__(self, other: Any) -> "RingMatrix":
        if isinstance(other, RingMatrix):
            return self @ other
        return self.scale(other)

    def scale(self, c: Any) -> "RingMatrix":
        """Multiply every entry on the right by the scalar c."""
        return self._like([[a * c for a in r] for r in self.rows])

    def __truediv__(self, c: Any) -> "RingMatrix":
        return self._like([[a / c for a in r] for r in self.rows])

    def __pow__(self, k: int) -> "RingMatrix":
        if k < 0:
            raise ValueError("Negative matrix powers are not supported")
        result = RingMatrix.identity(self.size, self.zero, self.one)
        for _ in range(k):
            result = result @ self
        return result

    def trace(self) -> Any:
        acc = self.zero
        for i in range(self.size):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return not any(v for r in self.rows for v in r)

    def is_diagonal(self) -> bool:
        return all(not v for i, j, v in self.entries() if i != j)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingMatrix) or other.size != self.size:
            return NotImplemented
        return all(a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    __hash__ = None

    def __repr__(self) -> str:
        return "RingMatrix(" + ", ".join(repr(list(r)) for r in self.rows) + ")"

    # Determinant and adjugate

    def _minor_det(self, rows: Tuple[int, ...], cols: Tuple[int, ...], memo: Dict) -> Any:
        if not rows:
            return self.one
        key = (rows, cols)
        if key in memo:
            return memo[key]
        r, rest = rows[0], rows[1:]
        total = self.zero
        for idx, c in enumerate(cols):
            a = self.rows[r][c]
            if not a:
                continue
            sub = self._minor_det(rest, cols[:idx] + cols[idx + 1:], memo)
            if not sub:
                continue
            term = a * sub
            total = total + term if idx % 2 == 0 else total - term
        memo[key] = total
        return total

    def det(self) -> Any:
        """Determinant by cofactor expansion with memoized minors."""
        idx = tuple(range(self.size))
        return self._minor_det(idx, idx, {})

    def adjugate(self) -> "RingMatrix":
        """Transpose of the cofactor matrix."""
        q = self.size
        memo: Dict = {}
        full = tuple(range(q))
        out = [[self.zero] * q for _ in range(q)]
        for i in range(q):
            rows = full[:i] + full[i + 1:]
            for j in range(q):
                cols = full[:j] + full[j + 1:]
                minor = self._minor_det(rows, cols, memo)
                out[j][i] = minor if (i + j) % 2 == 0 else -minor
        return self._like(out)

    def faddeev_leverrier(self) -> Tuple[List[Any], "RingMatrix"]:
        """Characteristic coefficients c_0..c_q (c_q = 1) and the adjugate.

        Needs exact division of ring elements by integers.
        """
        q = self.size
        identity = RingMatrix.identity(q, self.zero, self.one)
        coeffs: List[Any] = [self.zero] * (q + 1)
        coeffs[q] = self.one
        m = RingMatrix.zeros(q, self.zero, self.one)
        for k in range(1, q + 1):
            m = self @ m + identity.scale(coeffs[q - k + 1])
            coeffs[q - k] = -((self @ m).trace() / k)
        adj = m if (q + 1) % 2 == 0 else -m
        return coeffs, adj

    def charpoly(self) -> List[Any]:
        return self.faddeev_leverrier()[0]

    def cut(self, indices: Iterable[int]) -> "RingMatrix":
        """Keep entries with row and column in `indices`, zero the rest."""
        keep = set(indices)
        return self._like([[v if (i in keep and j in keep) else self.zero for j, v in enumerate(r)]
                           for i, r in enumerate(self.rows)])

    def inverse(self) -> "RingMatrix":
        """Inverse over a field-valued ring; diagonal matrices take the fast path."""
        if self.is_diagonal():
            diag = [self.rows[i][i] for i in range(self.size)]
            if any(not d for d in diag):
                raise InversionError("Diagonal matrix has a zero entry")
            try:
                return RingMatrix.diagonal([self.one / d for d in diag], self.zero, self.one)
            except TypeError as exc:
                raise InversionError(f"Entries of type {type(diag[0]).__name__} are not invertible") from exc
        d = self.det()
        if not d:
            raise InversionError("Matrix is singular")
        try:
            return self.adjugate() / d
        except TypeError as exc:
            raise InversionError(f"Cannot divide by the determinant {d!r}") from exc


def cayley_hamilton_residual(c: RingMatrix, coeffs: Optional[List[Any]] = None) -> RingMatrix:
    """Sum_k c_k C^k, which is the zero matrix."""
    coeffs = coeffs if coeffs is not None else c.charpoly()
    identity = RingMatrix.identity(c.size, c.zero, c.one)
    acc = RingMatrix.zeros(c.size, c.zero, c.one)
    for ck in reversed(coeffs):
        acc = acc @ c + identity.scale(ck)
    return acc


def resolvent_adjugate_coefficients(c: RingMatrix, coeffs: Optional[List[Any]] = None) -> List[RingMatrix]:
    """Matrices P_k with adj(zI - C) = sum_k P_k z^k, P_k = sum_l c_{k+l+1} C^l."""
    coeffs = coeffs if coeffs is not None else c.charpoly()
    q = c.size
    powers = [RingMatrix.identity(q, c.zero, c.one)]
    for _ in range(q - 1):
        powers.append(powers[-1] @ c)
    out = []
    for k in range(q):
        acc = RingMatrix.zeros(q, c.zero, c.one)
        for ell in range(q - k):
            acc = acc + powers[ell].scale(coeffs[k + ell + 1])
        out.append(acc)
    return out


def det_rank_one_update(c: RingMatrix, u: Sequence[Any], v: Sequence[Any]) -> Any:
    """det(C + u v^T) through det(C) + v^T adj(C) u."""
    if len(u) != c.size or len(v) != c.size:
        raise ValueError("Vector lengths must match the matrix size")
    adj = c.adjugate()
    total = c.det()
    for i in range(c.size):
        for j in range(c.size):
            if v[i] and adj[i, j] and u[j]:
                total = total + v[i] * adj[i, j] * u[j]
    return total


def outer(u: Sequence[Any], v: Sequence[Any], zero: Any, one: Any) -> RingMatrix:
    return RingMatrix([[a * b for b in v] for a in u], zero, one)


@dataclass(frozen=True)
class PerturbationTerms:
    """Directional derivatives of det and adj at C along D (and E)."""

    d_det: Any
    d2_det: Any
    d_adj: RingMatrix
    d2_adj: RingMatrix


def det_adj_derivatives(c: RingMatrix, d: RingMatrix, e: Optional[RingMatrix] = None,
                        lift: Optional[Callable[[Any], Any]] = None) -> PerturbationTerms:
    """First and second derivatives of det and adj at an invertible C.

    C lives in a ring where it can be inverted (coefficients or floats);
    ``lift`` embeds its entries in the ring of D and E.
    """
    e = d if e is None else e
    lift = lift or (lambda x: x)
    k = c.inverse().map(lift, d.zero, d.one)
    delta = lift(c.det())
    identity = RingMatrix.identity(c.size, d.zero, d.one)

    kd = k @ d
    ke = k @ e
    tr_kd = kd.trace()
    tr_ke = ke.trace()
    tr_kekd = (ke @ kd).trace()

    d_det = tr_kd * delta
    second_scalar = tr_ke * tr_kd - tr_kekd
    d2_det = second_scalar * delta
    d_adj = ((identity.scale(tr_kd) - kd) @ k).scale(delta)
    inner = e @ kd + d @ ke - d.scale(tr_ke) - e.scale(tr_kd)
    d2_adj = (k.scale(second_scalar) + k @ inner @ k).scale(delta)
    return PerturbationTerms(d_det, d2_det, d_adj, d2_adj)
