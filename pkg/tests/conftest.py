import os
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

os.environ.setdefault("LBMFD_LOG_TO_FILE", "false")
os.environ.setdefault("LBMFD_LOG_LEVEL", "WARNING")

from src.algebra import CoeffField  # noqa: E402
from src.config import settings  # noqa: E402
from src.matrix import RingMatrix  # noqa: E402
from src.models import EquilibriumExpr, LBMScheme  # noqa: E402
from src.services.scheme_file_service import load_scheme  # noqa: E402

SCHEMES_DIR = Path(__file__).resolve().parent.parent / "schemes"


def scheme_file(name: str) -> str:
    return str(SCHEMES_DIR / f"{name}.yaml")


def random_fraction(rng: np.random.Generator, low: int = -3, high: int = 3) -> Fraction:
    return Fraction(int(rng.integers(low, high + 1)), int(rng.integers(1, 4)))


def random_scheme(rng: np.random.Generator, q: int, conserved: int = 1, nonlinear: bool = False) -> LBMScheme:
    """One-dimensional scheme with random velocities, moments, rates and equilibria.

    The first non-conserved equilibrium carries the free parameter ``a``.
    """
    field = CoeffField(["a"])
    velocities = tuple((int(v),) for v in rng.choice([-2, -1, 0, 1, 2], size=q, replace=False))
    while True:
        rows = [[1] * q] + [[int(rng.integers(-2, 3)) for _ in range(q)] for _ in range(q - 1)]
        moments = RingMatrix([[field.coerce(v) for v in row] for row in rows], field.zero, field.one)
        if moments.det():
            break
    rates = [field.zero] * conserved
    rates += [field.coerce(Fraction(int(rng.integers(1, 40)), 20)) for _ in range(q - conserved)]

    equilibria = [EquilibriumExpr.moment(field, conserved, i) for i in range(conserved)]
    for j in range(conserved, q):
        eq = EquilibriumExpr.constant(field, conserved, 0)
        for ell in range(conserved):
            eq = eq + EquilibriumExpr.moment(field, conserved, ell) * random_fraction(rng)
        if j == conserved:
            eq = eq + EquilibriumExpr.moment(field, conserved, 0) * field.gen("a")
        if nonlinear:
            eq = eq + EquilibriumExpr.moment(field, conserved, 0) ** 2 * random_fraction(rng)
        equilibria.append(eq)

    return LBMScheme(
        field=field,
        dim=1,
        velocities=velocities,
        lam=field.coerce(int(rng.integers(1, 4))),
        moments=moments,
        conserved=conserved,
        rates=tuple(rates),
        equilibria=tuple(equilibria),
        bindings={"a": Fraction(1, 3)},
        name=f"random D1Q{q} N={conserved}",
    )


@pytest.fixture(scope="session")
def d1q2() -> LBMScheme:
    return load_scheme(scheme_file("d1q2"))


@pytest.fixture(scope="session")
def d1q3() -> LBMScheme:
    return load_scheme(scheme_file("d1q3"))


@pytest.fixture(scope="session")
def d1q3_n1() -> LBMScheme:
    return load_scheme(scheme_file("d1q3_n1"))


@pytest.fixture(scope="session")
def burgers() -> LBMScheme:
    return load_scheme(scheme_file("d1q2_burgers"))


@pytest.fixture(scope="session")
def d2q4() -> LBMScheme:
    return load_scheme(scheme_file("d2q4"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(settings.random_seed)


@pytest.fixture(scope="session")
def random_schemes():
    """Twenty-four random schemes: q = 2 and 3 with one conserved moment, q = 3 with two."""
    rng = np.random.default_rng(settings.random_seed + 7)
    layouts = [(2, 1, False)] * 6 + [(3, 1, False)] * 5 + [(2, 1, True)] * 3 + [(3, 1, True)] * 2 + \
        [(3, 2, False)] * 4 + [(3, 2, True)] * 4
    return [random_scheme(rng, q, n, nonlinear) for q, n, nonlinear in layouts]


@pytest.fixture(scope="session")
def scheme_path():
    return scheme_file


@pytest.fixture(scope="session")
def make_random_scheme():
    return random_scheme
