from dataclasses import replace

from src.algebra import LaurentPoly
from src.matrix import RingMatrix
from src.services.scheme_service import SchemeService


def random_velocities(rng, q, dim):
    """q distinct velocity vectors with components in -2..2."""
    chosen = set()
    while len(chosen) < q:
        chosen.add(tuple(int(v) for v in rng.integers(-2, 3, size=dim)))
    return tuple(sorted(chosen))


def test_d1q2_stream_matrix(d1q2):
    field = d1q2.field
    lam = field.gen("lam")
    x = LaurentPoly.shift(field, (1,))
    x_inv = LaurentPoly.shift(field, (-1,))
    t = SchemeService(d1q2).stream_matrix()
    assert t[0, 0] == (x + x_inv) / 2
    assert t[0, 1] == (x - x_inv) / (2 * lam)
    assert t[1, 0] == (x - x_inv) * lam / 2
    assert t[1, 1] == (x + x_inv) / 2


def test_stream_determinant_is_the_total_shift(make_random_scheme, rng):
    for sample in range(20):
        q, dim = 2 + sample % 4, 1 + (sample // 4) % 2
        base = make_random_scheme(rng, q)
        scheme = replace(base, dim=dim, velocities=random_velocities(rng, q, dim))
        service = SchemeService(scheme)
        t = service.stream_matrix()
        total = tuple(sum(c[axis] for c in scheme.velocities) for axis in range(dim))
        assert t.det() == LaurentPoly.shift(scheme.field, total), scheme.velocities
        identity = RingMatrix.identity(q, t.zero, t.one)
        assert service.conjugate_stream_matrix() @ t == identity


def test_scheme_matrices_split_the_stream_matrix(d1q3_n1, random_schemes):
    for scheme in [d1q3_n1] + random_schemes[:6]:
        service = SchemeService(scheme)
        a, b = service.scheme_matrices()
        assert a + b == service.stream_matrix()


def test_d2q4_stream_determinant(d2q4):
    t = SchemeService(d2q4).stream_matrix()
    assert t.det() == LaurentPoly.one(d2q4.field, 2)
    assert SchemeService(d2q4).validate().valid
