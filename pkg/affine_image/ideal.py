"""Ideals over Q and the Groebner-basis primitives built on them.

Buchberger's algorithm with the normal selection strategy and the coprime and
chain criteria, followed by elimination, saturation (Rabinowitsch, and a
fast path for homogeneous ideals), ideal intersection, radical membership,
principal radicals and Krull dimension.
"""

import heapq
import threading
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from affine_image.errors import DomainError, UnsupportedOperationError
from affine_image.orders import Monomial, TermOrder
from affine_image.polynomial import Polynomial, RingContext, exact_divide, poly_gcd

logger = structlog.get_logger()

GREVLEX = TermOrder.grevlex()

_Element = Tuple[Monomial, Dict[Monomial, Fraction]]


class Ideal:
    """A finitely generated ideal with write-once cached Groebner bases."""

    __slots__ = ("ring", "generators", "_bases", "_lock")

    def __init__(self, ring: RingContext, generators: Iterable = ()):
        gens = []
        for g in generators:
            if isinstance(g, (int, Fraction)):
                g = ring.constant(g)
            if g.ring != ring:
                raise DomainError(f"Generator {g} does not live in {ring}")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators: Tuple[Polynomial, ...] = tuple(gens)
        self._bases: Dict[TermOrder, Tuple[Polynomial, ...]] = {}
        self._lock = threading.Lock()

    @classmethod
    def unit(cls, ring: RingContext) -> "Ideal":
        return cls(ring, [ring.one()])

    @classmethod
    def zero(cls, ring: RingContext) -> "Ideal":
        return cls(ring, [])

    def groebner_basis(self, order: TermOrder = GREVLEX) -> Tuple[Polynomial, ...]:
        cached = self._bases.get(order)
        if cached is None:
            cached = tuple(_groebner(self.generators, self.ring, order))
            with self._lock:
                cached = self._bases.setdefault(order, cached)
        return cached

    def _seed(self, order: TermOrder, basis: Sequence[Polynomial]) -> None:
        with self._lock:
            self._bases.setdefault(order, tuple(basis))

    def is_zero(self) -> bool:
        return not self.generators

    def contains_one(self) -> bool:
        return contains_one(self)

    def contains(self, p: Polynomial) -> bool:
        return ideal_membership(p, self)

    def __add__(self, other) -> "Ideal":
        if isinstance(other, Ideal):
            return ideal_sum(self, other)
        return Ideal(self.ring, self.generators + tuple(other))

    def change_ring(self, ring: RingContext) -> "Ideal":
        if ring == self.ring:
            return self
        return Ideal(ring, [g.change_ring(ring) for g in self.generators])

    def render(self) -> List[str]:
        return [g.render() for g in self.generators]

    def __repr__(self) -> str:
        return f"Ideal({', '.join(self.render()) or '0'} in {self.ring})"


# -- division and Buchberger --------------------------------------------------


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _memoized(key):
    cache: Dict[Monomial, tuple] = {}

    def cached(m: Monomial) -> tuple:
        value = cache.get(m)
        if value is None:
            value = cache[m] = key(m)
        return value

    return cached


def _reduce(
    terms: Dict[Monomial, Fraction], basis: List[_Element], key
) -> Dict[Monomial, Fraction]:
    """Full reduction against a monic basis of ``(leading monomial, terms)``.

    Pending terms sit in a heap ordered by descending monomial; cancelled
    entries are skipped when they surface.
    """
    rest = dict(terms)
    heap = [(_descending(key(m)), m) for m in rest]
    heapq.heapify(heap)
    remainder: Dict[Monomial, Fraction] = {}
    while heap:
        _, mono = heapq.heappop(heap)
        coeff = rest.pop(mono, None)
        if coeff is None:
            continue
        for lead, g_terms in basis:
            if not _divides(lead, mono):
                continue
            shift = tuple(x - y for x, y in zip(mono, lead))
            for m, c in g_terms.items():
                if m == lead:
                    continue
                target = tuple(x + y for x, y in zip(m, shift))
                old = rest.get(target)
                value = (old or 0) - coeff * c
                if value:
                    rest[target] = value
                    if old is None:
                        heapq.heappush(heap, (_descending(key(target)), target))
                elif old is not None:
                    del rest[target]
            break
        else:
            remainder[mono] = coeff
    return remainder


def _descending(k: tuple) -> tuple:
    return tuple(-x for x in k)


def _monic(terms: Dict[Monomial, Fraction], key) -> _Element:
    lead = max(terms, key=key)
    inverse = 1 / terms[lead]
    return lead, {m: c * inverse for m, c in terms.items()}


def _spoly(f: _Element, g: _Element, lcm: Monomial) -> Dict[Monomial, Fraction]:
    (f_lead, f_terms), (g_lead, g_terms) = f, g
    f_shift = tuple(x - y for x, y in zip(lcm, f_lead))
    g_shift = tuple(x - y for x, y in zip(lcm, g_lead))
    result = {tuple(x + y for x, y in zip(m, f_shift)): c for m, c in f_terms.items()}
    for m, c in g_terms.items():
        target = tuple(x + y for x, y in zip(m, g_shift))
        value = result.get(target, 0) - c
        if value:
            result[target] = value
        else:
            result.pop(target, None)
    return result


def _is_constant(lead: Monomial) -> bool:
    return not any(lead)


def _groebner(
    generators: Sequence[Polynomial], ring: RingContext, order: TermOrder
) -> List[Polynomial]:
    key = _memoized(order.key(ring))
    basis: List[_Element] = []
    for g in generators:
        element = _monic(g.terms, key)
        if _is_constant(element[0]):
            return [ring.one()]
        basis.append(element)

    pairs: Dict[Tuple[int, int], Monomial] = {
        (i, j): _lcm(basis[i][0], basis[j][0])
        for i, j in combinations(range(len(basis)), 2)
    }
    reductions = 0

    def select(item):
        (_, lcm) = item
        return (sum(lcm), key(lcm))

    while pairs:
        (i, j), lcm = min(pairs.items(), key=select)
        del pairs[(i, j)]
        lead_i, lead_j = basis[i][0], basis[j][0]
        if all(not (x and y) for x, y in zip(lead_i, lead_j)):
            continue
        if _chain_criterion(i, j, lcm, basis, pairs):
            continue
        remainder = _reduce(_spoly(basis[i], basis[j], lcm), basis, key)
        reductions += 1
        if not remainder:
            continue
        element = _monic(remainder, key)
        if _is_constant(element[0]):
            logger.debug("Groebner basis is the unit ideal", order=str(order))
            return [ring.one()]
        new = len(basis)
        basis.append(element)
        for k in range(new):
            pairs[(k, new)] = _lcm(basis[k][0], element[0])

    reduced = _interreduce(basis, key)
    logger.debug(
        "Groebner basis computed",
        order=str(order),
        variables=ring.ngens,
        basis_size=len(reduced),
        reductions=reductions,
    )
    return [Polynomial._raw(ring, terms) for _, terms in reduced]


def _chain_criterion(
    i: int, j: int, lcm: Monomial, basis: List[_Element], pairs
) -> bool:
    for k, (lead, _) in enumerate(basis):
        if k in (i, j) or not _divides(lead, lcm):
            continue
        if (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs:
            return True
    return False


def _interreduce(basis: List[_Element], key) -> List[_Element]:
    minimal: List[_Element] = []
    for idx, (lead, terms) in enumerate(basis):
        redundant = any(
            _divides(other, lead) and (other != lead or jdx < idx)
            for jdx, (other, _) in enumerate(basis)
            if jdx != idx
        )
        if not redundant:
            minimal.append((lead, terms))
    reduced = []
    for idx, (lead, terms) in enumerate(minimal):
        others = [e for jdx, e in enumerate(minimal) if jdx != idx]
        tail = {m: c for m, c in terms.items() if m != lead}
        tail = _reduce(tail, others, key)
        tail[lead] = Fraction(1)
        reduced.append((lead, tail))
    reduced.sort(key=lambda e: key(e[0]), reverse=True)
    return reduced


# -- operations ---------------------------------------------------------------


def normal_form(
    p: Polynomial, basis: Sequence[Polynomial], order: TermOrder = GREVLEX
) -> Polynomial:
    """Remainder of multivariate division of ``p`` by ``basis``."""
    if not basis:
        return p
    key = order.key(p.ring)
    elements = []
    for g in basis:
        if g.ring != p.ring:
            raise DomainError(f"Ring mismatch: {g.ring} vs {p.ring}")
        if not g.is_zero():
            elements.append(_monic(g.terms, key))
    return Polynomial._raw(p.ring, _reduce(p.terms, elements, key))


def buchberger(ideal: Ideal, order: TermOrder = GREVLEX) -> Tuple[Polynomial, ...]:
    return ideal.groebner_basis(order)


def contains_one(ideal: Ideal) -> bool:
    basis = ideal.groebner_basis()
    return len(basis) == 1 and basis[0].is_constant()


def ideal_membership(p: Polynomial, ideal: Ideal) -> bool:
    if p.ring != ideal.ring:
        raise DomainError(f"Ring mismatch: {p.ring} vs {ideal.ring}")
    return normal_form(p, ideal.groebner_basis()).is_zero()


def ideal_sum(first: Ideal, second: Ideal) -> Ideal:
    if first.ring != second.ring:
        raise DomainError(f"Ring mismatch: {first.ring} vs {second.ring}")
    return Ideal(first.ring, first.generators + second.generators)


def ideal_equality(first: Ideal, second: Ideal) -> bool:
    """Equality of ideals, by comparing reduced Groebner bases."""
    if first.ring != second.ring:
        raise DomainError(f"Ring mismatch: {first.ring} vs {second.ring}")
    return set(first.groebner_basis()) == set(second.groebner_basis())


def eliminate(ideal: Ideal, names: Iterable[str]) -> Ideal:
    """``I ∩ Q[remaining variables]``, returned over the smaller ring."""
    names = [v for v in dict.fromkeys(names)]
    for v in names:
        ideal.ring.index(v)
    if not names:
        return ideal
    small = ideal.ring.without(names)
    drop = [ideal.ring.index(v) for v in names]
    order = TermOrder.block(names)
    kept = [
        g
        for g in ideal.groebner_basis(order)
        if all(not m[i] for m in g.terms for i in drop)
    ]
    result = Ideal(small, [g.change_ring(small) for g in kept])
    result._seed(GREVLEX, result.generators)
    return result


def _extend(ideal: Ideal, stem: str) -> Tuple[RingContext, str, List[Polynomial]]:
    name = ideal.ring.fresh_name(stem)
    big = ideal.ring.extend([name], [0])
    return big, name, [g.change_ring(big) for g in ideal.generators]


def saturate(ideal: Ideal, f: Polynomial) -> Ideal:
    """``I : f^∞`` by eliminating t from ``I + (t*f - 1)``."""
    if f.ring != ideal.ring:
        raise DomainError(f"Ring mismatch: {f.ring} vs {ideal.ring}")
    if f.is_zero():
        raise DomainError("Cannot saturate by the zero polynomial")
    if f.is_constant():
        return ideal
    big, t, gens = _extend(ideal, "t")
    gens.append(big.gen(t) * f.change_ring(big) - 1)
    return eliminate(Ideal(big, gens), [t]).change_ring(ideal.ring)


def saturate_homogeneous(ideal: Ideal, name: str) -> Ideal:
    """``I : name^∞`` for generators homogeneous in the ring weights.

    A basis in the saturation order has every power of ``name`` visible in the
    leading monomials; dividing those powers out gives a basis of the
    saturation, so no extra variable or elimination is needed.
    """
    ring = ideal.ring
    index = ring.index(name)
    weights = ring.weights
    for g in ideal.generators:
        if len({sum(w * e for w, e in zip(weights, m)) for m in g.terms}) > 1:
            raise DomainError(f"{g} is not homogeneous in the weights of {ring}")
    order = TermOrder.saturation(name)
    gens = []
    for g in ideal.groebner_basis(order):
        low = min(m[index] for m in g.terms)
        if not low:
            gens.append(g)
            continue
        terms = {
            m[:index] + (m[index] - low,) + m[index + 1 :]: c
            for m, c in g.terms.items()
        }
        gens.append(Polynomial._raw(ring, terms))
    logger.debug("Homogeneous saturation", variable=name, basis_size=len(gens))
    return Ideal(ring, gens)


def intersect_ideals(first: Ideal, second: Ideal) -> Ideal:
    """``I ∩ J`` by eliminating t from ``t*I + (1 - t)*J``."""
    if first.ring != second.ring:
        raise DomainError(f"Ring mismatch: {first.ring} vs {second.ring}")
    big, t, gens = _extend(first, "t")
    tvar = big.gen(t)
    mixed = [tvar * g for g in gens]
    mixed += [(1 - tvar) * h.change_ring(big) for h in second.generators]
    return eliminate(Ideal(big, mixed), [t]).change_ring(first.ring)


def radical_membership(g: Polynomial, ideal: Ideal) -> bool:
    """Whether ``g`` lies in the radical of ``ideal`` (Rabinowitsch trick)."""
    if g.ring != ideal.ring:
        raise DomainError(f"Ring mismatch: {g.ring} vs {ideal.ring}")
    if g.is_zero():
        return True
    big, t, gens = _extend(ideal, "t")
    gens.append(big.gen(t) * g.change_ring(big) - 1)
    return contains_one(Ideal(big, gens))


def squarefree_part(f: Polynomial) -> Polynomial:
    if f.is_zero():
        return f
    if f.is_constant():
        return f.ring.one()
    common = f
    for name in f.variables():
        common = poly_gcd(common, f.derivative(name))
        if common.is_constant():
            break
    return exact_divide(f, common).monic()


def radical_of_principal(ideal: Ideal) -> Ideal:
    basis = ideal.groebner_basis()
    if not basis:
        return ideal
    if len(basis) != 1:
        raise UnsupportedOperationError(
            f"Radical of a non-principal ideal with {len(basis)} basis elements"
        )
    return Ideal(ideal.ring, [squarefree_part(basis[0])])


def dimension_of_ideal(ideal: Ideal, order: TermOrder = GREVLEX) -> int:
    """Krull dimension of V(I); -1 for the empty set.

    Read off the leading monomials of a basis in ``order``; any global order
    gives the same answer.
    """
    if contains_one(ideal):
        return -1
    supports = [
        frozenset(i for i, e in enumerate(g.leading_monomial(order)) if e)
        for g in ideal.groebner_basis(order)
    ]
    indices = range(ideal.ring.ngens)
    for size in range(ideal.ring.ngens, -1, -1):
        for subset in combinations(indices, size):
            chosen = set(subset)
            if not any(s <= chosen for s in supports):
                return size
    return -1


def ideal_equality_up_to_radical(first: Ideal, second: Ideal) -> bool:
    """Whether V(I) = V(J)."""
    if first.ring != second.ring:
        raise DomainError(f"Ring mismatch: {first.ring} vs {second.ring}")
    return all(radical_membership(g, second) for g in first.generators) and all(
        radical_membership(h, first) for h in second.generators
    )


def optional_principal_radical(ideal: Ideal) -> Optional[Ideal]:
    """``radical_of_principal`` when it applies, otherwise ``None``."""
    try:
        return radical_of_principal(ideal)
    except UnsupportedOperationError:
        return None
