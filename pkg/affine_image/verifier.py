"""Surjectivity certificates for maps onto the complement of a target variety."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from affine_image.config import Config
from affine_image.errors import DomainError
from affine_image.ideal import Ideal, ideal_equality_up_to_radical
from affine_image.image import (
    ImageTrace,
    PolynomialMap,
    complement_ideal,
    constructible_image,
    graph_ideal,
)
from affine_image.polynomial import Polynomial, RingContext, poly_gcd
from affine_image.surjection import (
    PURE_POWERS,
    THEOREM_MAIN,
    TargetVariety,
    exponent_schedule,
    require_hyperplane,
    theorem_main_exponents,
)

logger = structlog.get_logger()

Seed = Union[int, np.random.Generator]
Point = Tuple[Fraction, ...]

# Rational-root search gives up on constant terms with more divisors than this.
_MAX_ROOT_SEARCH = 10**6


@dataclass(frozen=True)
class FiberSample:
    point: Point
    on_target: bool
    nonempty: bool

    @property
    def ok(self) -> bool:
        return self.nonempty != self.on_target


@dataclass(frozen=True)
class DegreeAudit:
    observed: int
    bound: int
    within: bool
    stated_bound: int
    stated_within: bool


@dataclass(frozen=True)
class NullstellensatzConditions:
    avoidance: bool
    fibers: Tuple[FiberSample, ...]

    @property
    def holds(self) -> bool:
        return self.avoidance and all(s.ok for s in self.fibers)


@dataclass
class Certificate:
    """Outcome of every enabled check; ``None`` marks a disabled one."""

    avoidance: Optional[bool] = None
    complement_match: Optional[bool] = None
    complement: Optional[Ideal] = None
    fiber_samples: Tuple[FiberSample, ...] = ()
    degree: Optional[DegreeAudit] = None
    trace: Optional[ImageTrace] = None
    variant: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        checks = [self.avoidance, self.complement_match]
        checks += [s.ok for s in self.fiber_samples]
        if self.degree is not None:
            checks.append(self.degree.within)
        return all(check for check in checks if check is not None)


def _check_codomain(f: PolynomialMap, z: TargetVariety) -> None:
    if f.codomain.variables != z.ring.variables:
        raise DomainError(f"Map lands in {f.codomain} but the target lives in {z.ring}")


def avoids_target(f: PolynomialMap, z: TargetVariety) -> bool:
    """Whether f(A^N) misses Z: the graph together with I(Z) has no common zero."""
    _check_codomain(f, z)
    graph = graph_ideal(f)
    target = [g.change_ring(graph.ring) for g in z.ideal().generators]
    return (graph + target).contains_one()


def fiber_nonempty(f: PolynomialMap, point: Sequence) -> bool:
    """Whether F^{-1}(point) has a point over the algebraic closure."""
    if len(point) != f.codomain.ngens:
        raise DomainError(f"Point {tuple(point)} does not lie in A^{f.codomain.ngens}")
    fiber = Ideal(f.domain, [c - Fraction(x) for c, x in zip(f.coordinates, point)])
    return not fiber.contains_one()


def _on_target(z: TargetVariety, point: Sequence) -> bool:
    return all(g.evaluate(point) == 0 for g in z.ideal().generators)


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small = [k for k in range(1, int(n**0.5) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def rational_roots(p: Polynomial, name: str) -> List[Fraction]:
    """Rational roots of a univariate polynomial, by the rational root test."""
    coefficients = {k: c.constant_value() for k, c in p.coefficients_in(name).items()}
    if not coefficients:
        return []
    roots = []
    low = min(coefficients)
    if low > 0:
        roots.append(Fraction(0))
    scale = lcm(*(c.denominator for c in coefficients.values()))
    constant = int(coefficients[low] * scale)
    leading = int(coefficients[max(coefficients)] * scale)
    if max(coefficients) == low or abs(constant) > _MAX_ROOT_SEARCH:
        return roots
    for num in _divisors(constant):
        for den in _divisors(leading):
            for candidate in (Fraction(num, den), Fraction(-num, den)):
                if candidate not in roots and p.evaluate([candidate]) == 0:
                    roots.append(candidate)
    return sorted(roots)


def sample_on_target(
    z: TargetVariety, count: int, seed: Seed = 0, bound: int = 5, attempts: int = 400
) -> List[Point]:
    """Rational points of Z: one free coordinate is solved for over an integer grid."""
    rng = np.random.default_rng(seed)
    first = z.ring.variables[0]
    rest = z.ring.variables[1:] if z.in_hyperplane else z.ring.variables
    points: List[Point] = []
    for attempt in range(attempts):
        if len(points) >= count:
            break
        free = rest[attempt % len(rest)]
        others = [v for v in rest if v != free]
        draws = rng.integers(-bound, bound + 1, size=len(others))
        values = {v: Fraction(int(x)) for v, x in zip(others, draws)}
        if z.in_hyperplane:
            values[first] = Fraction(0)
        line = RingContext((free,))
        restricted = [q.substitute(values, line) for q in z.q_list]
        nonzero = [r for r in restricted if not r.is_zero()]
        if not nonzero:
            candidates = [Fraction(int(rng.integers(-bound, bound + 1)))]
        else:
            common = reduce(poly_gcd, nonzero)
            if common.is_constant():
                continue
            candidates = rational_roots(common, free)
        for root in candidates:
            values[free] = root
            point = tuple(values[v] for v in z.ring.variables)
            if point not in points and _on_target(z, point):
                points.append(point)
    if len(points) < count:
        logger.info(
            "Fewer rational target points found than requested",
            found=len(points),
            requested=count,
        )
    return points[:count]


def sample_off_target(
    z: TargetVariety, count: int, seed: Seed = 0, bound: int = 5
) -> List[Point]:
    """Integer points rejected whenever every generator of I(Z) vanishes on them."""
    rng = np.random.default_rng(seed)
    points: List[Point] = []
    for _ in range(100 * max(count, 1)):
        if len(points) >= count:
            break
        draw = rng.integers(-bound, bound + 1, size=z.n)
        point = tuple(Fraction(int(x)) for x in draw)
        if point not in points and not _on_target(z, point):
            points.append(point)
    return points


def _fiber_samples(
    f: PolynomialMap, z: TargetVariety, points: Sequence[Point], jobs: int
) -> Tuple[FiberSample, ...]:
    def check(point: Point) -> FiberSample:
        return FiberSample(point, _on_target(z, point), fiber_nonempty(f, point))

    if jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return tuple(pool.map(check, points))
    return tuple(check(point) for point in points)


def nullstellensatz_conditions(
    f: PolynomialMap, z: TargetVariety, points: Sequence[Sequence], jobs: int = 1
) -> NullstellensatzConditions:
    """Avoidance of Z and nonempty fibers over the supplied points."""
    normalized = [tuple(Fraction(x) for x in point) for point in points]
    return NullstellensatzConditions(
        avoids_target(f, z), _fiber_samples(f, z, normalized, jobs)
    )


def check_degree_bound(f: PolynomialMap, z: TargetVariety, variant: str) -> DegreeAudit:
    """Observed degree against the variant's bound.

    For the main variant the stated bound m*p_{n-1} can fall below what the
    construction produces when n = 2 or d = 1; the audit then widens it to
    p_{n-2} + e_m + d and records that the stated figure failed.
    """
    require_hyperplane(z)
    observed = f.total_degree()
    d = z.d_max
    if variant == THEOREM_MAIN:
        p = exponent_schedule(d, z.n)
        stated = z.m * p[-1]
        bound = max(stated, p[-2] + theorem_main_exponents(z)[-1] + d)
    elif variant == PURE_POWERS:
        stated = bound = z.m * (d + 1) + 1
    else:
        raise DomainError(f"Unknown variant {variant!r}")
    return DegreeAudit(observed, bound, observed <= bound, stated, observed <= stated)


def verify_surjection(
    f: PolynomialMap,
    z: TargetVariety,
    samples: Optional[int] = None,
    seed: int = 0,
    variant: Optional[str] = None,
    config: Optional[Config] = None,
    check_image: bool = True,
    on_target_samples: Optional[int] = None,
) -> Certificate:
    config = config or Config()
    samples = config.sampling.samples if samples is None else samples
    if on_target_samples is None:
        on_target_samples = config.sampling.on_target_samples
    if on_target_samples is None:
        on_target_samples = samples
    certificate = Certificate(variant=variant)
    certificate.avoidance = avoids_target(f, z)
    logger.info("Avoidance checked", avoidance=certificate.avoidance)

    if check_image:
        pieces, trace = constructible_image(f, seed=seed, config=config.engine)
        certificate.trace = trace
        certificate.complement = complement_ideal(pieces)
        if certificate.complement is None:
            certificate.complement_match = False
            certificate.notes.append(
                "Image pieces do not describe the complement of a closed set"
            )
        else:
            certificate.complement_match = ideal_equality_up_to_radical(
                certificate.complement, z.ideal()
            )
        logger.info(
            "Image compared with the target",
            rounds=len(trace.rounds),
            complement_match=certificate.complement_match,
        )

    rng = np.random.default_rng(seed)
    sampling = config.sampling
    off = sample_off_target(z, samples, rng, sampling.coordinate_bound)
    on = sample_on_target(
        z,
        on_target_samples,
        rng,
        sampling.coordinate_bound,
        sampling.on_target_attempts,
    )
    if len(on) < on_target_samples:
        certificate.notes.append(
            f"Found {len(on)} of {on_target_samples} requested rational points "
            "on the target"
        )
    certificate.fiber_samples = _fiber_samples(f, z, off + on, config.engine.jobs)

    if variant is not None:
        certificate.degree = check_degree_bound(f, z, variant)
        if not certificate.degree.stated_within:
            certificate.notes.append(
                f"Degree {certificate.degree.observed} exceeds the stated bound "
                f"{certificate.degree.stated_bound}; audited against "
                f"{certificate.degree.bound}"
            )
    logger.info("Certificate finished", verdict=certificate.verdict)
    return certificate
