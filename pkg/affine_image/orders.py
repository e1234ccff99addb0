"""Monomial term orders."""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

from affine_image.errors import DomainError

Monomial = Tuple[int, ...]

LEX = "lex"
GREVLEX = "grevlex"
BLOCK = "block"
SATURATION = "saturation"


@dataclass(frozen=True)
class TermOrder:
    """A global monomial order.

    ``block`` compares the ``front`` variables first (grevlex inside the block)
    and breaks ties with grevlex on the remaining variables, which makes it an
    elimination order for ``front``.

    ``saturation`` compares weighted degrees (the ring's weights), then prefers
    the smaller power of its single ``front`` variable, then grevlex. For
    polynomials homogeneous in the weights, that variable divides the
    polynomial exactly when it divides the leading monomial.
    """

    kind: str
    front: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (LEX, GREVLEX, BLOCK, SATURATION):
            raise DomainError(f"Unknown term order kind {self.kind!r}")
        if self.kind in (LEX, GREVLEX) and self.front:
            raise DomainError("Only block and saturation orders take front variables")
        if self.kind == SATURATION and len(self.front) != 1:
            raise DomainError("A saturation order takes exactly one variable")

    @classmethod
    def lex(cls) -> "TermOrder":
        return cls(LEX)

    @classmethod
    def grevlex(cls) -> "TermOrder":
        return cls(GREVLEX)

    @classmethod
    def block(cls, front) -> "TermOrder":
        return cls(BLOCK, tuple(sorted(set(front))))

    @classmethod
    def saturation(cls, name: str) -> "TermOrder":
        return cls(SATURATION, (name,))

    def key(self, ring) -> Callable[[Monomial], tuple]:
        """Flat integer sort key on exponent vectors of ``ring``; larger key,
        larger monomial."""
        return _key_function(self, ring)

    def __str__(self) -> str:
        if self.kind in (BLOCK, SATURATION):
            return f"{self.kind}({', '.join(self.front)})"
        return self.kind


def _grevlex_key(m: Monomial) -> tuple:
    return (sum(m),) + tuple(-e for e in reversed(m))


@lru_cache(maxsize=256)
def _key_function(order: TermOrder, ring) -> Callable[[Monomial], tuple]:
    if order.kind == LEX:
        return tuple
    if order.kind == GREVLEX:
        return _grevlex_key
    missing = [v for v in order.front if v not in ring]
    if missing:
        raise DomainError(f"Order variables {missing} are not in the ring")

    if order.kind == SATURATION:
        index = ring.index(order.front[0])
        weights = ring.weights
        if weights[index] < 1:
            raise DomainError(f"Saturation variable {order.front[0]!r} has weight 0")

        def saturation_key(m: Monomial) -> tuple:
            weighted = sum(w * e for w, e in zip(weights, m))
            return (weighted, -m[index]) + _grevlex_key(m)

        return saturation_key

    front = tuple(sorted(ring.index(v) for v in order.front))
    back = tuple(i for i in range(len(ring.variables)) if i not in front)

    def block_key(m: Monomial) -> tuple:
        head = [m[i] for i in front]
        tail = [m[i] for i in back]
        return (
            (sum(head),)
            + tuple(-e for e in reversed(head))
            + (sum(tail),)
            + tuple(-e for e in reversed(tail))
        )

    return block_key


DEFAULT_ORDER = TermOrder.lex()
