from fractions import Fraction

import numpy as np
import pytest

from src.algebra import CoeffField, LaurentPoly, OperatorPoly
from src.matrix import (RingMatrix, cayley_hamilton_residual, det_adj_derivatives, det_rank_one_update, outer,
                        resolvent_adjugate_coefficients)
from src.utils.errors import InversionError

FIELD = CoeffField(["a"])


def random_rational_matrix(rng, q):
    rows = [[Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(q)] for _ in range(q)]
    return RingMatrix(rows, Fraction(0), Fraction(1))


def random_operator(rng):
    """Sum of three monomials z^k x^v with k in 0..1 and v in -1..1."""
    terms = {}
    for _ in range(3):
        key = (int(rng.integers(0, 2)), int(rng.integers(-1, 2)))
        terms[key] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    if rng.integers(0, 2):
        terms[(0, 0)] = FIELD.gen("a")
    return OperatorPoly(FIELD, 2, terms)


def random_operator_matrix(rng, q):
    zero, one = OperatorPoly.zero(FIELD, 1), OperatorPoly.one(FIELD, 1)
    return RingMatrix.build(q, lambda i, j: random_operator(rng), zero, one)


def test_cayley_hamilton_on_rational_matrices(rng):
    for sample in range(50):
        c = random_rational_matrix(rng, 2 + sample % 4)
        assert cayley_hamilton_residual(c).is_zero()


def test_cayley_hamilton_on_operator_matrices(rng):
    for _ in range(50):
        c = random_operator_matrix(rng, 3)
        assert cayley_hamilton_residual(c).is_zero()


def test_adjugate_identity(rng):
    for sample in range(60):
        c = random_rational_matrix(rng, 2 + sample % 4) if sample % 3 else random_operator_matrix(rng, 3)
        identity = RingMatrix.identity(c.size, c.zero, c.one)
        det = c.det()
        assert c @ c.adjugate() == identity.scale(det)
        assert c.adjugate() @ c == identity.scale(det)


def test_faddeev_leverrier_matches_cofactors(rng):
    for q in (2, 3, 4):
        c = random_operator_matrix(rng, q)
        coeffs, adj = c.faddeev_leverrier()
        assert coeffs[q] == c.one
        assert coeffs[0] == c.det() * (-1) ** q
        assert adj == c.adjugate()


def test_resolvent_adjugate_coefficients(rng):
    c = random_rational_matrix(rng, 3)
    blocks = resolvent_adjugate_coefficients(c)
    z = Fraction(7, 3)
    identity = RingMatrix.identity(3, Fraction(0), Fraction(1))
    expected = (identity.scale(z) - c).adjugate()
    total = RingMatrix.zeros(3, Fraction(0), Fraction(1))
    for k, block in enumerate(blocks):
        total = total + block.scale(z ** k)
    assert total == expected


def test_cut_keeps_selected_block():
    c = RingMatrix([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert c.cut([0, 2]) == RingMatrix([[1, 0, 3], [0, 0, 0], [7, 0, 9]])


def test_rank_one_update(rng):
    for _ in range(10):
        c = random_rational_matrix(rng, 3)
        u = [Fraction(int(rng.integers(-3, 4))) for _ in range(3)]
        v = [Fraction(int(rng.integers(-3, 4))) for _ in range(3)]
        assert det_rank_one_update(c, u, v) == (c + outer(u, v, c.zero, c.one)).det()


def test_inverse():
    c = RingMatrix([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]])
    assert c @ c.inverse() == RingMatrix.identity(2, Fraction(0), Fraction(1))
    with pytest.raises(InversionError):
        RingMatrix([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]).inverse()


def test_laurent_entries_keep_their_ring():
    x = LaurentPoly.shift(FIELD, (1,))
    c = RingMatrix([[x, x ** -1], [LaurentPoly.one(FIELD, 1), x]])
    assert c.det() == x * x - x ** -1


# Directional derivatives against central differences. The differences are
# taken in exact arithmetic so only the O(h^2) truncation error remains.

H = Fraction(1, 10 ** 4)


def float_matrix(values):
    return RingMatrix([[float(v) for v in row] for row in values], 0.0, 1.0)


def exact(m):
    return m.map(Fraction, Fraction(0), Fraction(1))


def perturbed(c, d, e, h, k):
    return c + d.scale(h) + e.scale(k)


def close(actual, expected):
    return abs(actual - float(expected)) <= 1e-6 * max(1.0, abs(float(expected)))


@pytest.fixture
def float_triple(rng):
    c = float_matrix(3 * np.eye(4) + rng.normal(size=(4, 4)))
    d = float_matrix(rng.normal(size=(4, 4)))
    e = float_matrix(rng.normal(size=(4, 4)))
    return c, d, e


def test_det_derivatives_against_finite_differences(float_triple):
    c, d, e = float_triple
    c_exact, d_exact, e_exact = exact(c), exact(d), exact(e)
    terms = det_adj_derivatives(c, d)
    f = lambda h: perturbed(c_exact, d_exact, d_exact, h, 0).det()  # noqa: E731
    first = (f(H) - f(-H)) / (2 * H)
    second = (f(H) - 2 * f(0) + f(-H)) / H ** 2
    assert close(terms.d_det, first)
    assert close(terms.d2_det, second)

    mixed = det_adj_derivatives(c, d, e)
    g = lambda h, k: perturbed(c_exact, d_exact, e_exact, h, k).det()  # noqa: E731
    cross = (g(H, H) - g(H, -H) - g(-H, H) + g(-H, -H)) / (4 * H ** 2)
    assert close(mixed.d2_det, cross)


def test_adjugate_derivatives_against_finite_differences(float_triple):
    c, d, e = float_triple
    c_exact, d_exact, e_exact = exact(c), exact(d), exact(e)
    terms = det_adj_derivatives(c, d, e)
    adj = lambda h, k: perturbed(c_exact, d_exact, e_exact, h, k).adjugate()  # noqa: E731
    plus, minus = adj(H, 0), adj(-H, 0)
    corners = [adj(H, H), adj(H, -H), adj(-H, H), adj(-H, -H)]
    for i in range(4):
        for j in range(4):
            first = (plus[i, j] - minus[i, j]) / (2 * H)
            cross = (corners[0][i, j] - corners[1][i, j] - corners[2][i, j] + corners[3][i, j]) / (4 * H ** 2)
            assert close(terms.d_adj[i, j], first)
            assert close(terms.d2_adj[i, j], cross)
