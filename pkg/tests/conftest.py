import numpy as np
import pytest

from affine_image.image import PolynomialMap
from affine_image.parser import parse_polynomial
from affine_image.polynomial import RingContext
from affine_image.surjection import TargetVariety

CUBIC = "w2^2 - w3^3 - w3"


def ring(*names):
    return RingContext(tuple(names))


def poly(source, r):
    return parse_polynomial(source, r)


def polynomial_map(domain, codomain, *sources):
    return PolynomialMap(domain, codomain, tuple(poly(s, domain) for s in sources))


def target(codomain, *sources, in_hyperplane=True):
    qs = tuple(poly(s, codomain) for s in sources)
    return TargetVariety(codomain, qs, in_hyperplane=in_hyperplane)


def random_polynomial(rng, r, terms=4, degree=3, bound=5):
    """Up to ``terms`` random terms in ``r`` of total degree at most ``degree``."""
    p = r.zero()
    for _ in range(terms):
        exponents = [int(e) for e in rng.integers(0, degree + 1, size=r.ngens)]
        while sum(exponents) > degree:
            exponents[int(rng.integers(0, r.ngens))] -= 1
            exponents = [max(e, 0) for e in exponents]
        monomial = r.one()
        for name, e in zip(r.variables, exponents):
            monomial = monomial * r.gen(name) ** e
        p = p + monomial * int(rng.integers(-bound, bound + 1))
    return p


def random_point(rng, count, bound=5):
    return [int(x) for x in rng.integers(-bound, bound + 1, size=count)]


def random_target(seed, n, m):
    """A target V(w1, q_1..q_m) with deg q_j <= 2 and known rational points."""
    rng = np.random.default_rng(seed)
    codomain = RingContext(tuple(f"w{i}" for i in range(1, n + 1)))
    r, s, u = (int(x) for x in rng.integers(-3, 4, size=3))
    if n == 2:
        sources = [f"(w2 - ({r}))*(w2 - ({s}))", f"(w2 - ({r}))*(w2 - ({u}))"][:m]
    else:
        a, b = (int(x) for x in rng.integers(-2, 3, size=2))
        sources = [f"w3 - ({a})*w2^2 - ({b})*w2 - ({r})", f"w2 - ({s})"][:m]
    return target(codomain, *sources)


@pytest.fixture
def w_ring():
    return ring("w1", "w2", "w3")


@pytest.fixture
def cubic(w_ring):
    """E = V(w1, w2^2 - w3^3 - w3)."""
    return target(w_ring, CUBIC)


@pytest.fixture
def line(w_ring):
    """V(w1, w3)."""
    return target(w_ring, "w3")


@pytest.fixture
def twisted_cubic(w_ring):
    """A = V(w2^2 - w1, w2^3 - w3), not contained in the hyperplane w1 = 0."""
    return target(w_ring, "w2^2 - w1", "w2^3 - w3", in_hyperplane=False)


@pytest.fixture
def cubic_map(w_ring):
    """The surjection onto A^3 minus E obtained by restricting d to c."""
    return polynomial_map(
        ring("a", "b", "c"),
        w_ring,
        "1 + c*(a^2 - b^3 - b)",
        "a",
        "b + c + c^2*(a^2 - b^3 - b)",
    )


@pytest.fixture
def line_map(w_ring):
    return polynomial_map(
        ring("a", "b", "c"), w_ring, "1 + c*b", "a", "b + c*(1 + c*b)"
    )


@pytest.fixture
def twisted_map(w_ring):
    return polynomial_map(
        ring("a", "b", "c"), w_ring, "1 + c*b + a^2", "a", "b + c*(1 + c*b) + a^3"
    )
