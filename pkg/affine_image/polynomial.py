"""Exact multivariate polynomial arithmetic over the rationals.

Every value here is immutable: operations build new polynomials and never
touch their inputs, so polynomials can be shared freely between threads.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from affine_image.errors import DegreeUndefinedError, DomainError
from affine_image.orders import DEFAULT_ORDER, Monomial, TermOrder

Scalar = Union[int, Fraction]

RESERVED_PREFIX = "_"


@dataclass(frozen=True)
class RingContext:
    """Ordered, named, weighted variables of a polynomial ring over Q."""

    variables: Tuple[str, ...]
    weights: Tuple[int, ...] = ()
    _index: Dict[str, int] = field(
        default=None, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        variables = tuple(self.variables)
        weights = tuple(self.weights) if self.weights else (1,) * len(variables)
        if len(weights) != len(variables):
            raise DomainError("One weight per variable is required")
        if any(not name for name in variables):
            raise DomainError("Variable names must be nonempty")
        if len(set(variables)) != len(variables):
            raise DomainError(f"Variable names must be distinct: {variables}")
        if any(not isinstance(w, int) or w < 0 for w in weights):
            raise DomainError("Weights must be nonnegative integers")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(
            self, "_index", {name: i for i, name in enumerate(variables)}
        )

    @property
    def ngens(self) -> int:
        return len(self.variables)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"Variable {name!r} is not in {self}") from None

    def weight(self, name: str) -> int:
        return self.weights[self.index(name)]

    def extend(
        self, names: Sequence[str], weights: Sequence[int] = ()
    ) -> "RingContext":
        """Ring with ``names`` appended (default weight 1)."""
        weights = tuple(weights) if weights else (1,) * len(names)
        return RingContext(self.variables + tuple(names), self.weights + weights)

    def without(self, names: Iterable[str]) -> "RingContext":
        drop = set(names)
        kept = [(v, w) for v, w in zip(self.variables, self.weights) if v not in drop]
        return RingContext(tuple(v for v, _ in kept), tuple(w for _, w in kept))

    def fresh_name(self, stem: str) -> str:
        """A reserved auxiliary variable name not yet used in this ring."""
        name = f"{RESERVED_PREFIX}{stem}"
        counter = 1
        while name in self:
            name = f"{RESERVED_PREFIX}{stem}{counter}"
            counter += 1
        return name

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, value: Scalar) -> "Polynomial":
        return Polynomial(self, {(0,) * self.ngens: value})

    def gen(self, name: str, power: int = 1) -> "Polynomial":
        exps = [0] * self.ngens
        exps[self.index(name)] = power
        return Polynomial._raw(self, {tuple(exps): Fraction(1)})

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.gen(v) for v in self.variables)

    def __str__(self) -> str:
        return f"Q[{', '.join(self.variables)}]"


def _add_exponents(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """A polynomial with a finite map of monomials to nonzero rationals."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(
        self, ring: RingContext, terms: Optional[Mapping[Monomial, Scalar]] = None
    ):
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != ring.ngens:
                raise DomainError(
                    f"Monomial {mono} does not have the arity of {ring}"
                )
            if any(e < 0 for e in mono):
                raise DomainError(f"Negative exponent in {mono}")
            coeff = Fraction(coeff)
            if coeff:
                clean[mono] = clean.get(mono, Fraction(0)) + coeff
        self.ring = ring
        self.terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ring: RingContext, terms: Dict[Monomial, Fraction]) -> "Polynomial":
        # terms must already be clean: right arity, no zero coefficients
        poly = object.__new__(cls)
        poly.ring = ring
        poly.terms = terms
        poly._hash = None
        return poly

    # -- coercion -----------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise DomainError(f"Ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        zero = (0,) * self.ring.ngens
        return all(m == zero for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def variables(self) -> Tuple[str, ...]:
        """Names of the variables that occur, in ring order."""
        used = [False] * self.ring.ngens
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring.variables, used) if u)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            value = terms.get(mono, 0) + coeff
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
        return Polynomial._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return Polynomial._raw(
                self.ring, {m: c * other for m, c in self.terms.items()}
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _add_exponents(m1, m2)
                value = terms.get(mono, 0) + c1 * c2
                if value:
                    terms[mono] = value
                else:
                    terms.pop(mono, None)
        return Polynomial._raw(self.ring, terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self * (Fraction(1) / Fraction(other))
        return exact_divide(self, other)

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError("Exponents must be nonnegative integers")
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def shift(self, mono: Monomial, coeff: Scalar = 1) -> "Polynomial":
        """``coeff * x^mono * self``."""
        coeff = Fraction(coeff)
        if not coeff:
            return self.ring.zero()
        return Polynomial._raw(
            self.ring,
            {_add_exponents(m, mono): c * coeff for m, c in self.terms.items()},
        )

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- degrees ------------------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def weighted_degree(self) -> int:
        if not self.terms:
            raise DegreeUndefinedError("The zero polynomial has no degree")
        weights = self.ring.weights
        return max(_weighted(m, weights) for m in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((m[i] for m in self.terms), default=-1)

    def coefficients_in(self, name: str) -> Dict[int, "Polynomial"]:
        """``{k: c_k}`` with ``self = sum c_k * name^k`` and no ``name`` in ``c_k``."""
        i = self.ring.index(name)
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for mono, coeff in self.terms.items():
            rest = mono[:i] + (0,) + mono[i + 1 :]
            parts.setdefault(mono[i], {})[rest] = coeff
        return {k: Polynomial._raw(self.ring, t) for k, t in parts.items()}

    def derivative(self, name: str) -> "Polynomial":
        i = self.ring.index(name)
        terms = {}
        for mono, coeff in self.terms.items():
            if mono[i]:
                lowered = mono[:i] + (mono[i] - 1,) + mono[i + 1 :]
                terms[lowered] = coeff * mono[i]
        return Polynomial._raw(self.ring, terms)

    # -- leading terms ------------------------------------------------------

    def leading_term(
        self, order: TermOrder = DEFAULT_ORDER
    ) -> Tuple[Monomial, Fraction]:
        if not self.terms:
            raise DegreeUndefinedError("The zero polynomial has no leading term")
        mono = max(self.terms, key=order.key(self.ring))
        return mono, self.terms[mono]

    def leading_monomial(self, order: TermOrder = DEFAULT_ORDER) -> Monomial:
        return self.leading_term(order)[0]

    def leading_coefficient(self, order: TermOrder = DEFAULT_ORDER) -> Fraction:
        return self.leading_term(order)[1]

    def monic(self, order: TermOrder = DEFAULT_ORDER) -> "Polynomial":
        if not self.terms:
            return self
        return self * (1 / self.leading_coefficient(order))

    # -- substitution and evaluation ----------------------------------------

    def substitute(
        self,
        assignment: Mapping[str, Union["Polynomial", Scalar]],
        target: Optional[RingContext] = None,
    ) -> "Polynomial":
        """Simultaneous substitution, fully expanded.

        Variables absent from ``assignment`` map to the same-named variable of
        the target ring; occurring ones that the target lacks are an error.
        """
        for name in assignment:
            self.ring.index(name)
        if target is None:
            rings = {v.ring for v in assignment.values() if isinstance(v, Polynomial)}
            if len(rings) > 1:
                raise DomainError("Substituted polynomials must share one ring")
            target = rings.pop() if rings else self.ring
        images = []
        for name in self.ring.variables:
            if name in assignment:
                value = assignment[name]
                if isinstance(value, Polynomial):
                    if value.ring != target:
                        raise DomainError(
                            f"Image of {name} lives in {value.ring}, not {target}"
                        )
                    images.append(value)
                else:
                    images.append(target.constant(value))
            elif name in target:
                images.append(target.gen(name))
            else:
                images.append(None)
        powers = [dict() for _ in images]
        acc: Dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            term = target.constant(coeff)
            for i, e in enumerate(mono):
                if not e:
                    continue
                if images[i] is None:
                    raise DomainError(
                        f"Variable {self.ring.variables[i]!r} "
                        f"cannot be mapped into {target}"
                    )
                cached = powers[i].get(e)
                if cached is None:
                    cached = images[i] ** e
                    powers[i][e] = cached
                term = term * cached
            for m, c in term.terms.items():
                value = acc.get(m, 0) + c
                if value:
                    acc[m] = value
                else:
                    acc.pop(m, None)
        return Polynomial._raw(target, acc)

    def evaluate(
        self, point: Union[Mapping[str, Scalar], Sequence[Scalar]]
    ) -> Fraction:
        """Exact value at a full point, given by name or in ring order."""
        if isinstance(point, Mapping):
            values = [Fraction(point[v]) for v in self.ring.variables]
        else:
            values = [Fraction(x) for x in point]
            if len(values) != self.ring.ngens:
                raise DomainError(
                    f"Point {point} does not have the arity of {self.ring}"
                )
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = coeff
            for x, e in zip(values, mono):
                if e:
                    term *= x**e
            total += term
        return total

    def change_ring(self, ring: RingContext) -> "Polynomial":
        """The same polynomial, re-expressed over ``ring`` by variable name."""
        if ring == self.ring:
            return self
        positions = []
        for i, name in enumerate(self.ring.variables):
            positions.append(ring.index(name) if name in ring else None)
        terms = {}
        for mono, coeff in self.terms.items():
            exps = [0] * ring.ngens
            for i, e in enumerate(mono):
                if not e:
                    continue
                if positions[i] is None:
                    raise DomainError(
                        f"Variable {self.ring.variables[i]!r} is not in {ring}"
                    )
                exps[positions[i]] = e
            terms[tuple(exps)] = coeff
        return Polynomial._raw(ring, terms)

    # -- homogenization -----------------------------------------------------

    def homogenize(self, hvar: str) -> "Polynomial":
        h = self.ring.index(hvar)
        if self.ring.weights[h] != 1:
            raise DomainError(f"Homogenizing variable {hvar!r} must have weight 1")
        if any(m[h] for m in self.terms):
            raise DomainError(f"Homogenizing variable {hvar!r} occurs in {self}")
        if not self.terms:
            return self
        weights = self.ring.weights
        top = self.weighted_degree()
        terms = {}
        for mono, coeff in self.terms.items():
            pad = top - _weighted(mono, weights)
            terms[mono[:h] + (pad,) + mono[h + 1 :]] = coeff
        return Polynomial._raw(self.ring, terms)

    def dehomogenize(self, hvar: str) -> "Polynomial":
        return self.substitute({hvar: 1})

    # -- rendering ----------------------------------------------------------

    def render(self) -> str:
        if not self.terms:
            return "0"
        key = DEFAULT_ORDER.key(self.ring)
        pieces = []
        for mono in sorted(self.terms, key=key, reverse=True):
            coeff = self.terms[mono]
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.ring.variables, mono)
                if e
            ]
            magnitude = abs(coeff)
            if not factors:
                body = _render_scalar(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_render_scalar(magnitude)] + factors)
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(pieces)

    __str__ = render

    def __repr__(self) -> str:
        return f"Polynomial({self.render()!r} in {self.ring})"


def _weighted(mono: Monomial, weights: Tuple[int, ...]) -> int:
    return sum(e * w for e, w in zip(mono, weights))


def _render_scalar(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# -- functional surface -------------------------------------------------------


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def substitute(
    p: Polynomial, assignment, target: Optional[RingContext] = None
) -> Polynomial:
    return p.substitute(assignment, target)


def weighted_degree(p: Polynomial) -> int:
    return p.weighted_degree()


def homogenize(p: Polynomial, hvar: str) -> Polynomial:
    return p.homogenize(hvar)


def dehomogenize(p: Polynomial, hvar: str) -> Polynomial:
    return p.dehomogenize(hvar)


def leading_term(
    p: Polynomial, order: TermOrder = DEFAULT_ORDER
) -> Tuple[Monomial, Fraction]:
    return p.leading_term(order)


# -- exact division and gcd ---------------------------------------------------


def divmod_single(p: Polynomial, q: Polynomial) -> Tuple[Polynomial, Polynomial]:
    """Multivariate division of ``p`` by one polynomial in lex order."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    key = DEFAULT_ORDER.key(p.ring)
    q_lm, q_lc = q.leading_term()
    rest = dict(p.terms)
    quotient: Dict[Monomial, Fraction] = {}
    remainder: Dict[Monomial, Fraction] = {}
    while rest:
        mono = max(rest, key=key)
        coeff = rest[mono]
        if all(a >= b for a, b in zip(mono, q_lm)):
            shift = tuple(a - b for a, b in zip(mono, q_lm))
            factor = coeff / q_lc
            quotient[shift] = quotient.get(shift, 0) + factor
            for m, c in q.terms.items():
                target = _add_exponents(m, shift)
                value = rest.get(target, 0) - factor * c
                if value:
                    rest[target] = value
                else:
                    rest.pop(target, None)
        else:
            remainder[mono] = coeff
            del rest[mono]
    quotient = {m: c for m, c in quotient.items() if c}
    return Polynomial._raw(p.ring, quotient), Polynomial._raw(p.ring, remainder)


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    quotient, remainder = divmod_single(p, q)
    if not remainder.is_zero():
        raise DomainError(f"{q} does not divide {p}")
    return quotient


def _content(p: Polynomial, name: str) -> Polynomial:
    result = p.ring.zero()
    for coeff in p.coefficients_in(name).values():
        result = poly_gcd(result, coeff)
        if result.is_constant():
            return p.ring.one()
    return result


def _primitive_part(p: Polynomial, name: str) -> Polynomial:
    return exact_divide(p, _content(p, name))


def _pseudo_remainder(a: Polynomial, b: Polynomial, name: str) -> Polynomial:
    """``prem(a, b)``: the remainder of ``lc(b)^(deg a - deg b + 1) * a`` by b."""
    n = b.degree_in(name)
    lead_b = b.coefficients_in(name)[n]
    var = b.ring.gen(name)
    steps = a.degree_in(name) - n + 1
    r = a
    while not r.is_zero() and r.degree_in(name) >= n:
        k = r.degree_in(name)
        lead_r = r.coefficients_in(name)[k]
        r = lead_b * r - lead_r * (var ** (k - n)) * b
        steps -= 1
    return r * lead_b**steps if steps > 0 else r


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor over Q, monic in the default order.

    Subresultant pseudo-remainder sequences in the first occurring variable,
    with contents handled by recursion on the coefficients.
    """
    if p.ring != q.ring:
        raise DomainError(f"Ring mismatch: {p.ring} vs {q.ring}")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.is_constant() or q.is_constant():
        return p.ring.one()
    p_vars, q_vars = set(p.variables()), set(q.variables())
    name = next(v for v in p.ring.variables if v in p_vars or v in q_vars)
    if name not in p_vars:
        return poly_gcd(p, _content(q, name))
    if name not in q_vars:
        return poly_gcd(_content(p, name), q)
    content = poly_gcd(_content(p, name), _content(q, name))
    a, b = _primitive_part(p, name), _primitive_part(q, name)
    if a.degree_in(name) < b.degree_in(name):
        a, b = b, a
    g = h = p.ring.one()
    while True:
        delta = a.degree_in(name) - b.degree_in(name)
        r = _pseudo_remainder(a, b, name)
        if r.is_zero():
            common = b
            break
        if r.degree_in(name) == 0:
            common = p.ring.one()
            break
        a, b = b, exact_divide(r, g * h**delta)
        g = a.coefficients_in(name)[a.degree_in(name)]
        if delta:
            h = exact_divide(g**delta, h ** (delta - 1))
    return (content * _primitive_part(common, name)).monic()
