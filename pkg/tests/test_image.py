import numpy as np
import pytest

from affine_image.config import EngineConfig
from affine_image.errors import DomainError, GenericityError, RoundLimitExceededError
from affine_image.ideal import (
    Ideal,
    dimension_of_ideal,
    ideal_equality,
    ideal_equality_up_to_radical,
)
from affine_image.image import (
    ConstructiblePiece,
    ConstructibleSet,
    PolynomialMap,
    boundary_locus,
    complement_ideal,
    constructible_image,
    graph_ideal,
    image_closure,
    point_in_set,
    slice_to_image_dimension,
)
from affine_image.polynomial import RingContext
from conftest import (
    CUBIC,
    poly,
    polynomial_map,
    random_point,
    random_polynomial,
    ring,
)


def test_map_validation():
    domain, codomain = ring("x"), ring("w1", "w2")
    with pytest.raises(DomainError):
        PolynomialMap(domain, codomain, (domain.gen("x"),))
    with pytest.raises(DomainError):
        PolynomialMap(domain, codomain, (domain.gen("x"), codomain.gen("w1")))


def test_graph_ideal_rejects_shared_names():
    f = polynomial_map(ring("w1"), ring("w1"), "w1")
    with pytest.raises(DomainError):
        graph_ideal(f)


def test_graph_ideal_weights_domain_only():
    f = polynomial_map(ring("z"), ring("w1", "w2"), "z", "z^2")
    graph = graph_ideal(f)
    assert graph.ring.variables == ("z", "w1", "w2")
    assert graph.ring.weights == (1, 0, 0)
    assert len(graph.generators) == 2


def test_composition_and_evaluation():
    f = polynomial_map(ring("z"), ring("u", "v"), "z", "z^2")
    g = polynomial_map(ring("u", "v"), ring("w"), "u + v")
    composed = f.then(g)
    assert composed.coordinates == (poly("z + z^2", ring("z")),)
    assert f([3]) == (3, 9)
    assert composed.total_degree() == 2


def test_identity_image_is_everything():
    f = polynomial_map(ring("x1", "x2"), ring("w1", "w2"), "x1", "x2")
    result, trace = constructible_image(f)
    assert len(result.pieces) == 1
    assert result.pieces[0].closed.is_zero()
    assert result.pieces[0].removed.contains_one()
    assert complement_ideal(result).contains_one()
    assert trace.terminated and len(trace.rounds) == 1


def test_parabola_is_closed():
    codomain = ring("w1", "w2")
    f = polynomial_map(ring("z"), codomain, "z", "z^2")
    parabola = Ideal(codomain, [poly("w2 - w1^2", codomain)])
    assert ideal_equality(image_closure(graph_ideal(f), codomain), parabola)
    assert boundary_locus(graph_ideal(f), codomain).contains_one()
    result, _ = constructible_image(f)
    assert len(result.pieces) == 1
    assert result.pieces[0].removed.contains_one()
    assert complement_ideal(result) is None
    assert point_in_set(result, (2, 4))
    assert not point_in_set(result, (2, 5))


def test_hyperbola_projection_misses_the_origin():
    domain, codomain = ring("x", "y"), ring("w")
    f = polynomial_map(domain, codomain, "x")
    constraints = Ideal(domain, [poly("x*y - 1", domain)])
    result, trace = constructible_image(f, constraints)
    assert len(trace.rounds) == 1
    complement = complement_ideal(result)
    assert ideal_equality(complement, Ideal(codomain, [codomain.gen("w")]))
    assert point_in_set(result, (5,))
    assert not point_in_set(result, (0,))


def test_constant_map_from_a_point():
    codomain = ring("w1", "w2")
    point = RingContext(())
    f = PolynomialMap(point, codomain, (point.constant(1), point.constant(2)))
    result, trace = constructible_image(f)
    assert len(trace.rounds) == 1
    assert trace.rounds[0].boundary.charts == ()
    assert result.pieces[0].removed.contains_one()
    assert point_in_set(result, (1, 2))
    assert not point_in_set(result, (0, 0))
    assert complement_ideal(result) is None


def test_round_limit():
    codomain = ring("w1")
    f = PolynomialMap(RingContext(()), codomain, (RingContext(()).constant(1),))
    with pytest.raises(RoundLimitExceededError) as info:
        constructible_image(f, config=EngineConfig(round_limit_extra=0))
    assert info.value.trace is not None


def test_projection_is_sliced_and_surjective():
    f = polynomial_map(ring("x", "y"), ring("w"), "x")
    result, trace = constructible_image(f, seed=3)
    first = trace.rounds[0]
    assert (first.domain_dimension, first.image_dimension) == (2, 1)
    assert len(first.slice_forms) == 1
    assert complement_ideal(result).contains_one()


def test_slice_to_image_dimension():
    domain = ring("x", "y")
    f = polynomial_map(domain, ring("w"), "x")
    sliced = slice_to_image_dimension(f, seed=5)
    assert len(sliced.generators) == 1
    assert dimension_of_ideal(sliced) == 1
    g = polynomial_map(domain, ring("w1", "w2"), "x", "y")
    assert slice_to_image_dimension(g).is_zero()


def test_empty_image():
    domain = ring("x")
    f = polynomial_map(domain, ring("w"), "x")
    result, trace = constructible_image(f, Ideal.unit(domain))
    assert result.pieces == ()
    assert trace.rounds == []
    assert complement_ideal(result).is_zero()



def _pieces(codomain, *pairs):
    pieces = [
        ConstructiblePiece(
            Ideal(codomain, [poly(s, codomain) for s in closed]),
            Ideal(codomain, [poly(s, codomain) for s in removed]),
        )
        for closed, removed in pairs
    ]
    return ConstructibleSet(codomain, tuple(pieces))


def test_complement_when_a_later_piece_fills_a_hole_of_an_earlier_removal():
    codomain = ring("w1", "w2")
    result = _pieces(
        codomain,
        ((), ("w1",)),
        (("w1",), ("w1", "w2*(w2 - 2)")),
        (("w1", "w2 - 2"), ("1",)),
    )
    complement = complement_ideal(result)
    origin = Ideal(codomain, codomain.gens())
    assert ideal_equality_up_to_radical(complement, origin)


def test_complement_of_a_chain_and_of_an_isolated_point():
    codomain = ring("w1", "w2")
    chain = _pieces(codomain, ((), ("w1",)), (("w1",), ("w1", "w2")))
    assert ideal_equality_up_to_radical(
        complement_ideal(chain), Ideal(codomain, codomain.gens())
    )
    isolated = _pieces(codomain, ((), ("w1",)), (("w1", "w2"), ("1",)))
    assert complement_ideal(isolated) is None


@pytest.mark.parametrize("seed", range(3))
def test_slices_never_drop_an_image_component(seed):
    domain, codomain = ring("x", "y", "z", "u"), ring("w1", "w2")
    constraints = Ideal(
        domain, [poly(s, domain) for s in ("u", "(x - 1)*(x*z - 1)", "(x - 1)*y")]
    )
    f = polynomial_map(domain, codomain, "x", "y")
    with pytest.raises(GenericityError):
        slice_to_image_dimension(f, constraints, seed=seed)
    result, _ = constructible_image(f, constraints, seed=seed)
    assert not point_in_set(result, (0, 0))
    assert not point_in_set(result, (0, 3))
    assert not point_in_set(result, (2, 1))
    for point in ((1, 0), (1, 5), (2, 0), (-3, 0)):
        assert point_in_set(result, point)


@pytest.mark.slow
def test_cubic_session(cubic_map, w_ring):
    result, trace = constructible_image(cubic_map)
    assert len(trace.rounds) == 2
    charts = {chart.variable: chart for chart in trace.rounds[0].boundary.charts}
    assert charts["a"].eliminated.contains_one()
    assert charts["b"].eliminated.contains_one()
    assert ideal_equality_up_to_radical(
        trace.rounds[0].boundary.locus, Ideal(w_ring, [w_ring.gen("w1")])
    )
    expected = Ideal(w_ring, [w_ring.gen("w1"), poly(CUBIC, w_ring)])
    assert ideal_equality_up_to_radical(complement_ideal(result), expected)
    assert point_in_set(result, (0, 1, 0))
    assert not point_in_set(result, (0, 0, 0))


@pytest.mark.slow
def test_line_surjection_misses_a_line(line_map, w_ring):
    result, _ = constructible_image(line_map)
    expected = Ideal(w_ring, [w_ring.gen("w1"), w_ring.gen("w3")])
    assert ideal_equality_up_to_radical(complement_ideal(result), expected)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(4))
def test_image_contains_every_computed_value(seed):
    rng = np.random.default_rng(seed)
    domain, codomain = ring("x", "y"), ring("w1", "w2")
    coordinates = tuple(
        random_polynomial(rng, domain, terms=2, degree=2) for _ in range(2)
    )
    f = PolynomialMap(domain, codomain, coordinates)
    result, trace = constructible_image(f, seed=seed)
    assert trace.terminated
    for _ in range(100):
        assert point_in_set(result, f(random_point(rng, 2)))
