"""Surjections from affine space onto the complement of a target variety.

Targets have the shape Z = V(w1, q_1, ..., q_m) with every q_j free of w1.
The maps are built from a base point by one-parameter additive actions
w_i -> w_i + t*f_i, where f_i vanishes on the projection of Z that forgets w_i.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from affine_image.config import BuilderConfig
from affine_image.errors import (
    DomainError,
    GenericityError,
    GroupLawError,
    NoGeneratorError,
    PurePowerError,
)
from affine_image.ideal import Ideal, eliminate
from affine_image.image import PolynomialMap
from affine_image.orders import DEFAULT_ORDER
from affine_image.polynomial import Polynomial, RingContext

logger = structlog.get_logger()

THEOREM_MAIN = "theorem-main"
PURE_POWERS = "pure-powers"
VARIANTS = (THEOREM_MAIN, PURE_POWERS)


@dataclass(frozen=True)
class TargetVariety:
    """Z = V(w1, q_1, ..., q_m) inside A^n.

    With ``in_hyperplane`` off the target is V(q_1, ..., q_m) for arbitrary
    q_j; such targets can be verified against but not built for.
    """

    ring: RingContext
    q_list: Tuple[Polynomial, ...]
    in_hyperplane: bool = True

    def __post_init__(self):
        if self.ring.ngens < 2:
            raise DomainError("Targets need an ambient dimension of at least 2")
        first = self.ring.variables[0]
        kept = []
        for q in self.q_list:
            if q.ring != self.ring:
                raise DomainError(f"Target generator {q} is not over {self.ring}")
            if q.is_zero():
                continue
            if q.is_constant():
                raise DomainError(
                    f"Constant target generator {q} makes the target empty"
                )
            if self.in_hyperplane and q.degree_in(first) > 0:
                raise DomainError(f"Target generator {q} must not involve {first}")
            kept.append(q)
        if not kept:
            raise DomainError("A target needs at least one nonzero generator")
        object.__setattr__(self, "q_list", tuple(kept))

    @property
    def n(self) -> int:
        return self.ring.ngens

    @property
    def m(self) -> int:
        return len(self.q_list)

    @property
    def d_list(self) -> Tuple[int, ...]:
        return tuple(q.total_degree() for q in self.q_list)

    @property
    def d_max(self) -> int:
        return max(self.d_list)

    def ideal(self) -> Ideal:
        if not self.in_hyperplane:
            return Ideal(self.ring, self.q_list)
        return Ideal(self.ring, (self.ring.gen(self.ring.variables[0]),) + self.q_list)

    def render(self) -> List[str]:
        return self.ideal().render()


def require_hyperplane(z: TargetVariety) -> None:
    if not z.in_hyperplane:
        raise DomainError(
            f"Surjections are only built for targets V({z.ring.variables[0]}, q_1, ...)"
        )


def exponent_schedule(d: int, n: int) -> List[int]:
    """p_0..p_{n-1} with p_0 = 1 and p_k = d*p_{k-1} + 1."""
    if d < 1 or n < 1:
        raise DomainError(f"Exponent schedule needs d, n >= 1, got d={d}, n={n}")
    schedule = [1]
    for _ in range(1, n):
        schedule.append(d * schedule[-1] + 1)
    return schedule


def theorem_main_exponents(z: TargetVariety) -> List[int]:
    p = exponent_schedule(z.d_max, z.n)
    return [1] + [(j - 1) * (1 + p[-1]) for j in range(2, z.m + 1)]


def pure_power_exponents(z: TargetVariety) -> List[int]:
    return [(j - 1) * (z.d_max + 1) + 1 for j in range(1, z.m + 1)]


# -- domain naming ------------------------------------------------------------


def _stems(
    codomain: RingContext, stems: Sequence[str], n: int, m: int
) -> Dict[str, str]:
    """Domain variable stems, suffixed with "_" until they avoid the codomain names."""
    resolved = {}
    taken = set(codomain.variables)
    for stem in stems:
        candidate = stem
        while candidate in taken or any(
            f"{candidate}{k}" in taken for k in range(1, max(n, m) + 1)
        ):
            candidate += "_"
        resolved[stem] = candidate
    return resolved


def _pull_back_target(z: TargetVariety, ring: RingContext, names: Sequence[Polynomial]):
    """q_j with w_2..w_n replaced by the given polynomials of ``ring``."""
    assignment = dict(zip(z.ring.variables[1:], names))
    assignment[z.ring.variables[0]] = ring.zero()
    return [q.substitute(assignment, ring) for q in z.q_list]


# -- the maps -----------------------------------------------------------------


def build_psi(z: TargetVariety) -> PolynomialMap:
    """The map A^{m+2n-2} -> A^n built from the base point (1, 0, ..., 0).

    Domain variables are ordered a_1..a_{n-1}, c_1..c_m, b_1..b_{n-1} and the
    coordinates are W = 1 + sum_j c_j q_j(a) followed by a_i + b_i W.
    """
    require_hyperplane(z)
    stems = _stems(z.ring, ("a", "c", "b"), z.n, z.m)
    a_names = [f"{stems['a']}{i}" for i in range(1, z.n)]
    c_names = [f"{stems['c']}{j}" for j in range(1, z.m + 1)]
    b_names = [f"{stems['b']}{i}" for i in range(1, z.n)]
    ring = RingContext(tuple(a_names + c_names + b_names))
    a = [ring.gen(name) for name in a_names]
    first = ring.one()
    for c_name, q in zip(c_names, _pull_back_target(z, ring, a)):
        first = first + ring.gen(c_name) * q
    coordinates = [first] + [a_i + ring.gen(b) * first for a_i, b in zip(a, b_names)]
    return PolynomialMap(ring, z.ring, tuple(coordinates))


def _restricted_ring(z: TargetVariety) -> RingContext:
    require_hyperplane(z)
    stems = _stems(z.ring, ("a", "c"), z.n, z.m)
    return RingContext(tuple(f"{stems['a']}{i}" for i in range(1, z.n)) + (stems["c"],))


def restrict_theorem_main(z: TargetVariety) -> PolynomialMap:
    """F(a, c) = (W, a_1 + c^{p_0} W, ..., a_{n-1} + c^{p_{n-2}} W).

    W = 1 + c q_1(a) + sum_{j >= 2} c^{(j-1)(1+p_{n-1})} q_j(a).
    """
    ring = _restricted_ring(z)
    a, c = list(ring.gens()[:-1]), ring.gens()[-1]
    p = exponent_schedule(z.d_max, z.n)
    first = ring.one()
    for e, q in zip(theorem_main_exponents(z), _pull_back_target(z, ring, a)):
        first = first + c**e * q
    coordinates = [first] + [a[i] + c ** p[i] * first for i in range(z.n - 1)]
    return PolynomialMap(ring, z.ring, tuple(coordinates))


def has_pure_power(q: Polynomial, name: str) -> bool:
    """Whether q carries a nonzero monomial name^deg(q)."""
    degree = q.total_degree()
    return degree >= 0 and q.degree_in(name) == degree


def restrict_pure_powers(z: TargetVariety) -> PolynomialMap:
    """F(a, c) = (W, a_1, ..., a_{n-2}, a_{n-1} + c W).

    W = 1 + sum_j c^{(j-1)(d+1)+1} q_j(a).
    """
    last = z.ring.variables[-1]
    for q in z.q_list:
        if not has_pure_power(q, last):
            raise PurePowerError(
                f"Target generator {q} has no pure power of {last} in top degree; "
                "apply a generic linear change first (--generic-change)"
            )
    ring = _restricted_ring(z)
    a, c = list(ring.gens()[:-1]), ring.gens()[-1]
    first = ring.one()
    for e, q in zip(pure_power_exponents(z), _pull_back_target(z, ring, a)):
        first = first + c**e * q
    coordinates = [first] + a[:-1] + [a[-1] + c * first]
    return PolynomialMap(ring, z.ring, tuple(coordinates))


@dataclass(frozen=True)
class Restriction:
    """Substitution of domain variables by polynomials over a smaller free ring."""

    substitution: Mapping[str, Polynomial]
    ring: RingContext

    def __post_init__(self):
        for name, value in self.substitution.items():
            if value.ring != self.ring:
                raise DomainError(f"Image of {name} is not over {self.ring}")


def theorem_main_restriction(z: TargetVariety) -> Restriction:
    """c_j = c^{e_j} and b_i = c^{p_{i-1}} inside the domain of ``build_psi``."""
    psi = build_psi(z)
    ring = _restricted_ring(z)
    c = ring.gens()[-1]
    p = exponent_schedule(z.d_max, z.n)
    c_names = psi.domain.variables[z.n - 1 : z.n - 1 + z.m]
    b_names = psi.domain.variables[z.n - 1 + z.m :]
    substitution = {name: c**e for name, e in zip(c_names, theorem_main_exponents(z))}
    substitution.update({name: c ** p[i] for i, name in enumerate(b_names)})
    return Restriction(substitution, ring)


def pure_powers_restriction(z: TargetVariety) -> Restriction:
    psi = build_psi(z)
    ring = _restricted_ring(z)
    c = ring.gens()[-1]
    c_names = psi.domain.variables[z.n - 1 : z.n - 1 + z.m]
    b_names = psi.domain.variables[z.n - 1 + z.m :]
    substitution = {name: c**e for name, e in zip(c_names, pure_power_exponents(z))}
    substitution.update({name: ring.zero() for name in b_names[:-1]})
    substitution[b_names[-1]] = c
    return Restriction(substitution, ring)


def restrict_to_subvariety(f: PolynomialMap, restriction: Restriction) -> PolynomialMap:
    clash = set(restriction.ring.variables) & set(f.codomain.variables)
    if clash:
        raise DomainError(f"Restriction introduces codomain variables {sorted(clash)}")
    for name in restriction.substitution:
        f.domain.index(name)
    for name in f.domain.variables:
        if name not in restriction.substitution and name not in restriction.ring:
            raise DomainError(
                f"Domain variable {name!r} is neither substituted nor kept"
            )
    coordinates = tuple(
        c.substitute(restriction.substitution, restriction.ring) for c in f.coordinates
    )
    return PolynomialMap(restriction.ring, f.codomain, coordinates)


def conjugate_by_automorphism(
    f: PolynomialMap, tau: PolynomialMap, tau_inverse: PolynomialMap
) -> PolynomialMap:
    """``tau_inverse ∘ f``, after checking that the two maps are mutually inverse."""
    if f.codomain.variables != tau_inverse.domain.variables:
        raise DomainError(
            f"Map lands in {f.codomain}, automorphism starts in {tau_inverse.domain}"
        )
    identity = tau_inverse.then(tau)
    if identity.coordinates != tau_inverse.domain.gens():
        raise DomainError("Automorphism and inverse do not compose to the identity")
    return f.then(tau_inverse)


# -- generic linear change ----------------------------------------------------


@dataclass(frozen=True)
class LinearChange:
    """w_i -> w_i + A_i w_n for 2 <= i < n; ``target`` is tau(Z)."""

    tau: PolynomialMap
    tau_inverse: PolynomialMap
    target: TargetVariety
    coefficients: Tuple[int, ...]


def _shear(ring: RingContext, coefficients: Sequence[int], sign: int) -> PolynomialMap:
    w = ring.gens()
    coordinates = [w[0]]
    middle = range(1, ring.ngens - 1)
    coordinates += [w[i] + w[-1] * (sign * a) for i, a in zip(middle, coefficients)]
    coordinates.append(w[-1])
    return PolynomialMap(ring, ring, tuple(coordinates))


def generic_linear_change(
    z: TargetVariety, seed: int = 0, config: Optional[BuilderConfig] = None
) -> LinearChange:
    """A shear after which every q_j carries a pure power of w_n."""
    require_hyperplane(z)
    config = config or BuilderConfig()
    rng = np.random.default_rng(seed)
    bound = config.change_coefficient_bound
    last = z.ring.variables[-1]
    for attempt in range(1, config.change_retries + 1):
        if attempt == 1:
            coefficients = (0,) * (z.n - 2)
        else:
            draws = rng.integers(-bound, bound + 1, size=z.n - 2)
            coefficients = tuple(int(x) for x in draws)
        tau = _shear(z.ring, coefficients, 1)
        tau_inverse = _shear(z.ring, coefficients, -1)
        assignment = dict(zip(z.ring.variables, tau_inverse.coordinates))
        changed = tuple(q.substitute(assignment, z.ring) for q in z.q_list)
        if all(has_pure_power(q, last) for q in changed):
            logger.info(
                "Generic linear change found",
                attempt=attempt,
                coefficients=coefficients,
            )
            changed_target = TargetVariety(z.ring, changed)
            return LinearChange(tau, tau_inverse, changed_target, coefficients)
        logger.warning("Linear change was not generic, retrying", attempt=attempt)
    raise GenericityError("No generic linear change found", config.change_retries)


# -- additive actions ---------------------------------------------------------


def _action_ring(ring: RingContext, parameter: str) -> RingContext:
    if parameter in ring:
        raise DomainError(f"Action parameter {parameter!r} clashes with {ring}")
    return ring.extend([parameter])


@dataclass(frozen=True)
class ParametricAction:
    """phi(t, w), an additive one-parameter action on A^n."""

    ring: RingContext
    parameter: str
    formula: Tuple[Polynomial, ...]
    fixed_locus: Ideal = field(compare=False)

    @property
    def action_ring(self) -> RingContext:
        return _action_ring(self.ring, self.parameter)

    def apply(
        self, value: Polynomial, point: Sequence[Polynomial]
    ) -> Tuple[Polynomial, ...]:
        """phi(value, point), all arguments polynomials over one ring."""
        target = value.ring
        assignment = dict(zip(self.ring.variables, point))
        assignment[self.parameter] = value
        return tuple(c.substitute(assignment, target) for c in self.formula)

    def check_group_law(self) -> None:
        ring = self.action_ring
        s_name = ring.fresh_name("s")
        big = ring.extend([s_name])
        t, s = big.gen(self.parameter), big.gen(s_name)
        w = tuple(big.gen(v) for v in self.ring.variables)
        inner = tuple(c.change_ring(big) for c in self.formula)
        if self.apply(big.zero(), w) != w:
            raise GroupLawError(
                "Action at parameter 0 is not the identity", "phi(0, w) = w"
            )
        if self.apply(s, inner) != self.apply(s + t, w):
            raise GroupLawError(
                "Action violates the group law", "phi(s, phi(t, w)) = phi(s + t, w)"
            )

    def check_fixed_locus(self) -> None:
        ring = self.action_ring
        locus = self.fixed_locus.change_ring(ring)
        for name, c in zip(self.ring.variables, self.formula):
            if not locus.contains(c - ring.gen(name)):
                raise GroupLawError(
                    f"Coordinate {name} moves points of the fixed locus",
                    "phi(t, w) = w on the fixed locus",
                )

    def render(self) -> List[str]:
        return [c.render() for c in self.formula]


def _fixed_locus(
    ring: RingContext, parameter: str, formula: Sequence[Polynomial]
) -> Ideal:
    """Points with phi(t, w) = w for all t: the t-coefficients of phi - w."""
    action_ring = _action_ring(ring, parameter)
    gens = []
    for name, c in zip(ring.variables, formula):
        moved = c - action_ring.gen(name)
        for power, coefficient in sorted(moved.coefficients_in(parameter).items()):
            if power > 0:
                gens.append(coefficient.change_ring(ring))
    return Ideal(ring, gens)


def action_from_formula(
    ring: RingContext, parameter: str, coordinates: Sequence[Polynomial]
) -> ParametricAction:
    """An explicit action, rejected with the violated identity if it is not one."""
    action_ring = _action_ring(ring, parameter)
    if len(coordinates) != ring.ngens:
        raise DomainError(f"An action on {ring} needs {ring.ngens} coordinates")
    formula = tuple(c.change_ring(action_ring) for c in coordinates)
    locus = _fixed_locus(ring, parameter, formula)
    action = ParametricAction(ring, parameter, formula, locus)
    action.check_group_law()
    action.check_fixed_locus()
    return action


def winkelmann_generator(
    target_ideal: Ideal, index: int, parameter: str = "t"
) -> ParametricAction:
    """w_i -> w_i + t*f_i, f_i of minimal degree in I(Z) ∩ k[w without w_i].

    ``index`` counts coordinates from 1.
    """
    ring = target_ideal.ring
    if not 1 <= index <= ring.ngens:
        raise DomainError(f"Coordinate index {index} is out of range for {ring}")
    if target_ideal.contains_one():
        raise DomainError("The target ideal is the unit ideal")
    name = ring.variables[index - 1]
    projection = eliminate(target_ideal, [name])
    if projection.is_zero():
        raise NoGeneratorError(f"The projection forgetting {name} is dominant")
    basis = projection.groebner_basis()
    lowest = min(g.total_degree() for g in basis)
    candidates = [g for g in basis if g.total_degree() == lowest]
    key = DEFAULT_ORDER.key(projection.ring)
    generator = max(candidates, key=lambda g: key(g.leading_monomial())).monic()
    generator = generator.change_ring(ring)
    action_ring = _action_ring(ring, parameter)
    shift = action_ring.gen(parameter) * generator.change_ring(action_ring)
    formula = tuple(
        action_ring.gen(v) + shift if v == name else action_ring.gen(v)
        for v in ring.variables
    )
    action = ParametricAction(ring, parameter, formula, Ideal(ring, [generator]))
    action.check_group_law()
    action.check_fixed_locus()
    return action


def conjugate_action(
    action: ParametricAction, tau: PolynomialMap, tau_inverse: PolynomialMap
) -> ParametricAction:
    """t -> tau_inverse ∘ phi(t, ·) ∘ tau; the fixed locus is pulled back by tau."""
    ring = action.ring
    if tau.domain != ring or tau_inverse.domain != ring:
        raise DomainError(f"Automorphisms must act on {ring}")
    if tau_inverse.then(tau).coordinates != ring.gens():
        raise DomainError("Automorphism and inverse do not compose to the identity")
    action_ring = action.action_ring
    lifted = [c.change_ring(action_ring) for c in tau.coordinates]
    moved = action.apply(action_ring.gen(action.parameter), lifted)
    back = dict(zip(ring.variables, moved))
    formula = tuple(c.substitute(back, action_ring) for c in tau_inverse.coordinates)
    pull = dict(zip(ring.variables, tau.coordinates))
    locus = Ideal(
        ring, [g.substitute(pull, ring) for g in action.fixed_locus.generators]
    )
    conjugated = ParametricAction(ring, action.parameter, formula, locus)
    conjugated.check_group_law()
    return conjugated


def compose_actions(
    actions: Sequence[ParametricAction],
    point: Sequence,
    parameters: Optional[Sequence[str]] = None,
    ring: Optional[RingContext] = None,
) -> PolynomialMap:
    """(a_1, ..., a_N) -> G_N(a_N) ∘ ... ∘ G_1(a_1) applied to ``point``."""
    if ring is None:
        if not actions:
            raise DomainError("An empty composition needs the codomain ring")
        ring = actions[0].ring
    for action in actions:
        if action.ring != ring:
            raise DomainError(f"Action on {action.ring} cannot compose on {ring}")
    if len(point) != ring.ngens:
        raise DomainError(f"Base point {tuple(point)} does not lie in A^{ring.ngens}")
    names = list(parameters) if parameters is not None else [
        f"a{k}" for k in range(1, len(actions) + 1)
    ]
    if len(names) != len(actions) or len(set(names)) != len(names):
        raise DomainError("One distinct parameter name per action is required")
    renamed = []
    for name in names:
        while name in ring or name in renamed:
            name += "_"
        renamed.append(name)
    domain = RingContext(tuple(renamed))
    current = tuple(domain.constant(x) for x in point)
    for action, name in zip(actions, renamed):
        current = action.apply(domain.gen(name), current)
    return PolynomialMap(domain, ring, current)


# -- the whole pipeline -------------------------------------------------------


def fiber_equation(z: TargetVariety, variant: str = THEOREM_MAIN) -> Polynomial:
    """The equation in c left after solving the later graph equations for the a's.

    Over ``Q[w, c]`` this is
    1 - w1 + sum_j c^{e_j} q_j(w_2 - c^{p_0} w1, ..., w_n - c^{p_{n-2}} w1)
    for the main variant; for pure powers only w_n is shifted, by c w1.
    """
    if variant not in VARIANTS:
        raise DomainError(f"Unknown variant {variant!r}")
    c_name = _restricted_ring(z).variables[-1]
    ring = z.ring.extend([c_name])
    w = [ring.gen(v) for v in z.ring.variables]
    c = ring.gen(c_name)
    if variant == THEOREM_MAIN:
        p = exponent_schedule(z.d_max, z.n)
        solved = [w[i + 1] - c ** p[i] * w[0] for i in range(z.n - 1)]
        exponents = theorem_main_exponents(z)
    else:
        solved = w[1:-1] + [w[-1] - c * w[0]]
        exponents = pure_power_exponents(z)
    equation = 1 - w[0]
    for e, q in zip(exponents, _pull_back_target(z, ring, solved)):
        equation = equation + c**e * q
    return equation


@dataclass(frozen=True)
class Construction:
    variant: str
    surjection: PolynomialMap
    target: TargetVariety
    change: Optional[LinearChange] = None


def construct_surjection(
    z: TargetVariety,
    variant: str = THEOREM_MAIN,
    generic_change: bool = False,
    seed: int = 0,
    config: Optional[BuilderConfig] = None,
) -> Construction:
    if variant == THEOREM_MAIN:
        return Construction(variant, restrict_theorem_main(z), z)
    if variant != PURE_POWERS:
        raise DomainError(
            f"Unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}"
        )
    if not generic_change:
        return Construction(variant, restrict_pure_powers(z), z)
    change = generic_linear_change(z, seed, config)
    changed = restrict_pure_powers(change.target)
    surjection = conjugate_by_automorphism(changed, change.tau, change.tau_inverse)
    return Construction(variant, surjection, z, change)
