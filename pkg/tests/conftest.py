import random
from fractions import Fraction

import pytest

from paqft.exact import ExactComplex
from paqft.series import FormalSeries
from paqft.lattice import Lattice1p1, ExactPropagators
from paqft.functionals import PolyFunctional


@pytest.fixture(scope="session")
def lat24():
    return Lattice1p1()  # 24x24, a_t=1/2, a_x=1, m=1


@pytest.fixture(scope="session")
def xp24(lat24):
    return ExactPropagators(lat24)


@pytest.fixture(scope="session")
def lat_small():
    return Lattice1p1(8, 4, Fraction(1, 2), Fraction(1))


@pytest.fixture(scope="session")
def xp_small(lat_small):
    return ExactPropagators(lat_small)


def make_functional(rng, lat, max_degree=3, n_terms=2, sites=None):
    """Random polynomial functional with exact rational coefficients."""
    pool = list(sites) if sites is not None else list(range(lat.n_sites))
    terms = {}
    for _ in range(n_terms):
        deg = rng.randint(1, max_degree)
        key = tuple(sorted(rng.choice(pool) for _ in range(deg)))
        c = ExactComplex(Fraction(rng.randint(-6, 6) or 1, rng.randint(1, 3)),
                         Fraction(rng.randint(-2, 2), 2))
        add = FormalSeries({(0, 0): c})
        terms[key] = terms[key] + add if key in terms else add
    return PolyFunctional(lat, terms)


@pytest.fixture
def rand_functional(lat_small):
    rng = random.Random(77)

    def make(**kw):
        return make_functional(rng, lat_small, **kw)

    return make
