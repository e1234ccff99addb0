"""Constructible image of a polynomial map.

The image f(Z) is peeled off round by round: the closure of the image minus a
boundary locus W, where W is the projection of the graph closure's part at
infinity, and then the same procedure on f^{-1}(W) ∩ Z.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from affine_image.config import EngineConfig
from affine_image.errors import DomainError, GenericityError, RoundLimitExceededError
from affine_image.ideal import (
    Ideal,
    dimension_of_ideal,
    eliminate,
    ideal_equality_up_to_radical,
    intersect_ideals,
    optional_principal_radical,
    radical_membership,
    saturate,
    saturate_homogeneous,
)
from affine_image.polynomial import Polynomial, RingContext

logger = structlog.get_logger()

Point = Sequence[Union[int, Fraction]]


@dataclass(frozen=True)
class PolynomialMap:
    """A morphism A^N -> A^n, one coordinate polynomial per codomain variable."""

    domain: RingContext
    codomain: RingContext
    coordinates: Tuple[Polynomial, ...]

    def __post_init__(self):
        coordinates = tuple(self.coordinates)
        object.__setattr__(self, "coordinates", coordinates)
        if len(coordinates) != self.codomain.ngens:
            raise DomainError(
                f"{len(coordinates)} coordinates for a codomain of dimension "
                f"{self.codomain.ngens}"
            )
        for coordinate in coordinates:
            if coordinate.ring != self.domain:
                raise DomainError(f"Coordinate {coordinate} is not over {self.domain}")

    def product_ring(self) -> RingContext:
        """``Q[z, w]`` with weight 1 on the domain and 0 on the codomain."""
        clash = set(self.domain.variables) & set(self.codomain.variables)
        if clash:
            raise DomainError(f"Domain and codomain share variables {sorted(clash)}")
        return RingContext(
            self.domain.variables + self.codomain.variables,
            (1,) * self.domain.ngens + (0,) * self.codomain.ngens,
        )

    def __call__(self, point: Point) -> Tuple[Fraction, ...]:
        return tuple(c.evaluate(point) for c in self.coordinates)

    def total_degree(self) -> int:
        return max((c.total_degree() for c in self.coordinates), default=-1)

    def then(self, outer: "PolynomialMap") -> "PolynomialMap":
        """``outer ∘ self``."""
        if outer.domain.variables != self.codomain.variables:
            raise DomainError(
                f"Cannot compose into {outer.domain} from {self.codomain}"
            )
        assignment = dict(zip(outer.domain.variables, self.coordinates))
        return PolynomialMap(
            self.domain,
            outer.codomain,
            tuple(c.substitute(assignment, self.domain) for c in outer.coordinates),
        )

    def render(self) -> List[str]:
        return [c.render() for c in self.coordinates]


@dataclass(frozen=True)
class ConstructiblePiece:
    """The locally closed set V(closed) minus V(removed)."""

    closed: Ideal
    removed: Ideal

    def contains(self, point: Point) -> bool:
        vanishes = all(g.evaluate(point) == 0 for g in self.closed.generators)
        return vanishes and any(g.evaluate(point) != 0 for g in self.removed.generators)


@dataclass(frozen=True)
class ConstructibleSet:
    codomain: RingContext
    pieces: Tuple[ConstructiblePiece, ...] = ()

    def contains(self, point: Point) -> bool:
        return any(piece.contains(point) for piece in self.pieces)


@dataclass(frozen=True)
class ChartRecord:
    variable: str
    eliminated: Ideal
    reduced: Ideal
    radical_applied: bool


@dataclass(frozen=True)
class BoundaryResult:
    at_infinity: Ideal
    charts: Tuple[ChartRecord, ...]
    locus: Ideal


@dataclass(frozen=True)
class RoundRecord:
    index: int
    graph: Ideal
    closure: Ideal
    domain_dimension: int
    image_dimension: int
    slice_forms: Tuple[Polynomial, ...]
    boundary: BoundaryResult
    accumulated: Ideal


@dataclass
class ImageTrace:
    rounds: List[RoundRecord] = field(default_factory=list)
    terminated: bool = False


# -- graph, closure, boundary -------------------------------------------------


def _domain_names(ring: RingContext) -> List[str]:
    return [v for v, w in zip(ring.variables, ring.weights) if w > 0]


def graph_ideal(f: PolynomialMap, constraints: Optional[Ideal] = None) -> Ideal:
    """``(w_i - F_i) + constraints`` in the product ring."""
    ring = f.product_ring()
    gens = [
        ring.gen(w) - c.change_ring(ring)
        for w, c in zip(f.codomain.variables, f.coordinates)
    ]
    if constraints is not None:
        if constraints.ring.variables != f.domain.variables:
            raise DomainError(f"Constraints must live in {f.domain}")
        gens += [g.change_ring(ring) for g in constraints.generators]
    return Ideal(ring, gens)


def image_closure(graph: Ideal, codomain: Optional[RingContext] = None) -> Ideal:
    """Ideal of the Zariski closure of the image: eliminate the domain."""
    closure = eliminate(graph, _domain_names(graph.ring))
    return closure.change_ring(codomain) if codomain is not None else closure


def _chart(
    closure: Ideal, hvar: str, name: str, domain: List[str], codomain
) -> ChartRecord:
    """The part at infinity on the chart ``name = 1``, projected to the codomain."""
    affine = closure.ring.without([hvar, name])
    gens = [g.substitute({hvar: 0, name: 1}, affine) for g in closure.generators]
    chart = eliminate(Ideal(affine, gens), [v for v in domain if v != name])
    if codomain is not None:
        chart = chart.change_ring(codomain)
    if chart.contains_one():
        return ChartRecord(name, chart, chart, False)
    reduced = optional_principal_radical(chart)
    if reduced is None:
        logger.info("Chart ideal is not principal, keeping it unreduced", chart=name)
        return ChartRecord(name, chart, chart, False)
    return ChartRecord(name, chart, reduced, True)


def boundary_details(
    graph: Ideal, codomain: Optional[RingContext] = None, jobs: int = 1
) -> BoundaryResult:
    ring = graph.ring
    domain = _domain_names(ring)
    e = ring.fresh_name("e")
    homogeneous_ring = ring.extend([e], [1])
    homogenized = Ideal(
        homogeneous_ring,
        [g.change_ring(homogeneous_ring).homogenize(e) for g in graph.generators],
    )
    closure = saturate_homogeneous(homogenized, e)
    at_infinity = closure + [homogeneous_ring.gen(e)]
    if jobs > 1 and len(domain) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            charts = list(
                pool.map(lambda z: _chart(closure, e, z, domain, codomain), domain)
            )
    else:
        charts = [_chart(closure, e, z, domain, codomain) for z in domain]
    locus = None
    for chart in charts:
        if chart.reduced.contains_one():
            continue
        if locus is None:
            locus = chart.reduced
        else:
            locus = intersect_ideals(locus, chart.reduced)
    if locus is None:
        target = codomain if codomain is not None else ring.without(domain)
        locus = Ideal.unit(target)
    return BoundaryResult(at_infinity, tuple(charts), locus)


def boundary_locus(
    graph: Ideal, codomain: Optional[RingContext] = None, jobs: int = 1
) -> Ideal:
    """W, the projection of the graph closure's part at infinity."""
    return boundary_details(graph, codomain, jobs).locus


# -- slicing ------------------------------------------------------------------


def _random_forms(
    ring: RingContext, names: Sequence[str], count: int, rng, bound: int
) -> List[Polynomial]:
    forms = []
    while len(forms) < count:
        draw = rng.integers(-bound, bound + 1, size=len(names) + 1)
        coefficients = [int(x) for x in draw]
        if not any(coefficients[1:]):
            continue
        form = ring.constant(coefficients[0])
        for c, name in zip(coefficients[1:], names):
            form = form + ring.gen(name) * c
        forms.append(form)
    return forms


def _slice_graph(
    graph: Ideal,
    closure: Ideal,
    codomain: Optional[RingContext],
    rng,
    config: EngineConfig,
) -> Optional[Tuple[Ideal, Tuple[Polynomial, ...]]]:
    """A sliced graph with the same image closure, or ``None`` when every
    random slice lost part of the image."""
    target_dimension = dimension_of_ideal(closure)
    excess = dimension_of_ideal(graph) - target_dimension
    if excess <= 0:
        return graph, ()
    domain = _domain_names(graph.ring)
    for attempt in range(1, config.slice_retries + 1):
        forms = _random_forms(
            graph.ring, domain, excess, rng, config.slice_coefficient_bound
        )
        sliced = graph + forms
        if dimension_of_ideal(sliced) != target_dimension:
            logger.warning("Random slice was not generic, retrying", attempt=attempt)
            continue
        # slicing only shrinks the image, so one inclusion decides equality
        sliced_closure = image_closure(sliced, codomain)
        if all(radical_membership(g, closure) for g in sliced_closure.generators):
            return sliced, tuple(forms)
        logger.warning("Random slice lost part of the image, retrying", attempt=attempt)
    return None


def slice_to_image_dimension(
    f: PolynomialMap,
    constraints: Optional[Ideal] = None,
    seed: int = 0,
    config: Optional[EngineConfig] = None,
) -> Ideal:
    """Constraints plus random affine-linear forms cutting the domain down to the
    image dimension without changing the image closure."""
    config = config or EngineConfig()
    constraints = constraints if constraints is not None else Ideal.zero(f.domain)
    graph = graph_ideal(f, constraints)
    closure = image_closure(graph, f.codomain)
    sliced = _slice_graph(
        graph, closure, f.codomain, np.random.default_rng(seed), config
    )
    if sliced is None:
        raise GenericityError("No generic slice found", config.slice_retries)
    _, forms = sliced
    if not forms:
        return constraints
    return constraints + [form.change_ring(f.domain) for form in forms]


# -- the recursion ------------------------------------------------------------


def constructible_image(
    f: PolynomialMap,
    constraints: Optional[Ideal] = None,
    seed: int = 0,
    config: Optional[EngineConfig] = None,
) -> Tuple[ConstructibleSet, ImageTrace]:
    """Pieces whose union is exactly f(V(constraints)), with the full trace."""
    config = config or EngineConfig()
    rng = np.random.default_rng(seed)
    graph = graph_ideal(f, constraints)
    limit = f.domain.ngens + config.round_limit_extra
    trace = ImageTrace()
    pieces: List[ConstructiblePiece] = []

    while not graph.contains_one():
        index = len(trace.rounds) + 1
        if index > limit:
            raise RoundLimitExceededError(
                f"Image recursion exceeded {limit} rounds", trace=trace
            )
        started = time.perf_counter()
        closure = image_closure(graph, f.codomain)
        domain_dimension = dimension_of_ideal(graph)
        image_dimension = dimension_of_ideal(closure)
        sliced = _slice_graph(graph, closure, f.codomain, rng, config)
        if sliced is None:
            logger.warning(
                "No slice kept the image closure, using the whole graph", round=index
            )
            sliced = (graph, ())
        sliced_graph, forms = sliced
        boundary = boundary_details(sliced_graph, f.codomain, config.jobs)
        pieces.append(ConstructiblePiece(closure, closure + boundary.locus))
        accumulated = graph + boundary.locus.change_ring(graph.ring)
        trace.rounds.append(
            RoundRecord(
                index=index,
                graph=graph,
                closure=closure,
                domain_dimension=domain_dimension,
                image_dimension=image_dimension,
                slice_forms=forms,
                boundary=boundary,
                accumulated=accumulated,
            )
        )
        logger.info(
            "Image round finished",
            round=index,
            domain_dimension=domain_dimension,
            image_dimension=image_dimension,
            sliced=bool(forms),
            boundary=boundary.locus.render(),
            elapsed_seconds=round(time.perf_counter() - started, 3),
        )
        if not boundary.locus.contains_one() and all(
            radical_membership(g, closure) for g in boundary.locus.generators
        ):
            raise RoundLimitExceededError(
                "Boundary locus contains the image closure; "
                "the recursion cannot progress",
                trace=trace,
            )
        graph = accumulated

    trace.terminated = True
    return ConstructibleSet(f.codomain, tuple(pieces)), trace


def _closure_outside(leftover: Ideal, closed: Ideal) -> Ideal:
    """Ideal of the closure of V(leftover) minus V(closed)."""
    if closed.is_zero():
        return Ideal.unit(leftover.ring)
    parts = [saturate(leftover, g) for g in closed.generators]
    result = parts[0]
    for part in parts[1:]:
        result = intersect_ideals(result, part)
    return result


def complement_ideal(
    result: ConstructibleSet, ambient_dimension: Optional[int] = None
) -> Optional[Ideal]:
    """J with union = A^n minus V(J), or ``None`` when the union is not open.

    The set missed so far, V(K), starts as A^n; each piece V(C) minus V(R)
    must leave a closed set behind, which holds exactly when the closure of
    V(K) minus V(C) meets V(C) only inside V(R).
    """
    codomain = result.codomain
    if ambient_dimension is None:
        ambient_dimension = codomain.ngens
    if not result.pieces:
        return Ideal.zero(codomain)
    if dimension_of_ideal(result.pieces[0].closed) != ambient_dimension:
        return None
    leftover = Ideal.zero(codomain)
    for piece in result.pieces:
        if piece.closed.contains_one():
            continue
        outside = _closure_outside(leftover, piece.closed)
        frontier = outside + piece.closed
        if not all(radical_membership(g, frontier) for g in piece.removed.generators):
            return None
        inside = leftover + piece.removed
        if outside.contains_one():
            leftover = inside
        else:
            leftover = intersect_ideals(outside, inside)
    return leftover


def complement_discrepancy(
    complement: Optional[Ideal], stated: Ideal
) -> Optional[str]:
    """A note when a stated complement V(stated) disagrees with the computed one."""
    if complement is not None and ideal_equality_up_to_radical(complement, stated):
        return None
    stated_text = ", ".join(stated.render()) or "0"
    if complement is None:
        return (
            f"Stated complement V({stated_text}) does not match: the image is not "
            "the complement of a closed set"
        )
    computed = ", ".join(g.render() for g in complement.groebner_basis()) or "0"
    note = f"Stated complement V({stated_text}) differs from the computed V({computed})"
    if dimension_of_ideal(stated) == stated.ring.ngens - 1:
        note += "; a hypersurface cannot lie outside a dense image of affine space"
    return note


def point_in_set(
    result: ConstructibleSet, point: Union[Point, Mapping[str, Fraction]]
) -> bool:
    return result.contains(point)
