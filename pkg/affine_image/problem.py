"""Problem files: INI-style sections describing rings, targets, maps and actions.

Example::

    [ring]
    domain = a, b, c
    codomain = w1, w2, w3

    [target]
    q1 = w2^2 - w3^3 - w3

    [map]
    w1 = 1 + c*(a^2 - b^3 - b)
    w2 = a
    w3 = b + c + c^2*(a^2 - b^3 - b)

    [options]
    variant = theorem-main
    seed = 0
"""

import configparser
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import structlog
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from affine_image.config import Config
from affine_image.errors import DomainError, ParseError, ProblemFileError
from affine_image.ideal import Ideal
from affine_image.image import PolynomialMap
from affine_image.parser import parse_polynomial
from affine_image.polynomial import Polynomial, RingContext
from affine_image.surjection import (
    VARIANTS,
    ParametricAction,
    Restriction,
    TargetVariety,
    action_from_formula,
    compose_actions,
    conjugate_action,
    restrict_to_subvariety,
    winkelmann_generator,
)

logger = structlog.get_logger()

_STEP_KEY = re.compile(r"action(\d+)$")
_TARGET_KEY = re.compile(r"q(\d+)$")
_WINKELMANN = re.compile(r"winkelmann\s+(\d+)$")


class RingSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    codomain: str = Field(description="Comma-separated codomain variables")
    domain: Optional[str] = Field(
        default=None, description="Comma-separated domain variables"
    )


class TargetSection(BaseModel):
    """Target equations q1, q2, ... as extra keys, plus the hyperplane flag."""

    model_config = ConfigDict(extra="allow")

    general: bool = Field(
        default=False, description="Target not contained in the hyperplane w1 = 0"
    )

    @model_validator(mode="after")
    def equation_keys_valid(self):
        for key, value in (self.model_extra or {}).items():
            if not _TARGET_KEY.match(key):
                raise ValueError(f"Target keys are q1, q2, ..., general; got {key!r}")
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"Target equation {key} must be a polynomial")
        return self

    def equations(self) -> List[Tuple[str, str]]:
        extra = self.model_extra or {}
        keys = sorted(extra, key=lambda k: int(_TARGET_KEY.match(k).group(1)))
        return [(k, extra[k]) for k in keys]


class ExpectSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    complement: Optional[str] = Field(
        default=None,
        description="Comma-separated generators of the stated image complement",
    )


class ActionsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    point: str = Field(description="Base point, comma-separated rationals")
    parameters: Optional[str] = Field(default=None, description="One name per action")
    restrict: Optional[str] = Field(default=None, description="'name -> poly; ...'")
    image: bool = Field(default=False, description="Compute the image of the orbit map")
    automorphism: Optional[str] = Field(
        default=None, description="tau; actions are conjugated to tau^-1 ∘ phi ∘ tau"
    )
    inverse: Optional[str] = Field(default=None, description="tau^-1")
    steps: List[str] = Field(default_factory=list, description="action1, action2, ...")


class OptionsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Optional[str] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    generic_change: bool = False
    round_limit_extra: Optional[int] = None
    slice_retries: Optional[int] = None

    @field_validator("variant")
    @classmethod
    def variant_valid(cls, v):
        if v is not None and v not in VARIANTS:
            raise ValueError(f"Variant must be one of {', '.join(VARIANTS)}")
        return v


class ProblemFile(BaseModel):
    """A validated problem file; polynomials are parsed on demand."""

    model_config = ConfigDict(extra="forbid")

    source: str = "<string>"
    ring: RingSection
    target: Optional[TargetSection] = None
    map: Dict[str, str] = Field(default_factory=dict)
    actions: Optional[ActionsSection] = None
    options: OptionsSection = Field(default_factory=OptionsSection)
    expect: Optional[ExpectSection] = None

    # -- compilation --------------------------------------------------------

    def codomain_ring(self) -> RingContext:
        return _ring(self.ring.codomain, "[ring] codomain")

    def domain_ring(self) -> RingContext:
        if self.ring.domain is None:
            raise ProblemFileError(f"{self.source}: [ring] needs a domain for a map")
        return _ring(self.ring.domain, "[ring] domain")

    def target_variety(self) -> TargetVariety:
        equations = self.target.equations() if self.target is not None else []
        if not equations:
            raise ProblemFileError(f"{self.source}: a [target] section is required")
        ring = self.codomain_ring()
        qs = [_parse(q, ring, f"[target] {k}") for k, q in equations]
        return TargetVariety(ring, tuple(qs), in_hyperplane=not self.target.general)

    def stated_complement(self) -> Optional[Ideal]:
        """The image complement the problem claims, from [expect] complement."""
        if self.expect is None or self.expect.complement is None:
            return None
        ring = self.codomain_ring()
        parts = [p for p in self.expect.complement.split(",") if p.strip()]
        return Ideal(ring, [_parse(p, ring, "[expect] complement") for p in parts])

    def polynomial_map(self) -> PolynomialMap:
        if not self.map:
            raise ProblemFileError(f"{self.source}: a [map] section is required")
        domain, codomain = self.domain_ring(), self.codomain_ring()
        if set(self.map) != set(codomain.variables):
            raise ProblemFileError(
                f"{self.source}: [map] needs exactly one entry per codomain variable "
                f"{', '.join(codomain.variables)}"
            )
        coordinates = tuple(
            _parse(self.map[v], domain, f"[map] {v}") for v in codomain.variables
        )
        return PolynomialMap(domain, codomain, coordinates)

    def _actions_section(self) -> ActionsSection:
        if self.actions is None:
            raise ProblemFileError(f"{self.source}: an [actions] section is required")
        return self.actions

    def base_point(self) -> Tuple[Fraction, ...]:
        section = self._actions_section()
        try:
            point = tuple(Fraction(x.strip()) for x in section.point.split(","))
        except (ValueError, ZeroDivisionError) as e:
            raise ProblemFileError(f"{self.source}: bad base point: {e}") from e
        if len(point) != self.codomain_ring().ngens:
            raise ProblemFileError(f"{self.source}: base point has the wrong arity")
        return point

    def _automorphisms(self) -> Optional[Tuple[PolynomialMap, PolynomialMap]]:
        section = self._actions_section()
        if (section.automorphism is None) != (section.inverse is None):
            raise ProblemFileError(
                f"{self.source}: automorphism and inverse must be given together"
            )
        if section.automorphism is None:
            return None
        ring = self.codomain_ring()
        maps = []
        given = (("automorphism", section.automorphism), ("inverse", section.inverse))
        for key, text in given:
            parts = text.split(",")
            if len(parts) != ring.ngens:
                raise ProblemFileError(
                    f"{self.source}: [actions] {key} needs {ring.ngens} entries"
                )
            maps.append(
                PolynomialMap(
                    ring,
                    ring,
                    tuple(_parse(p, ring, f"[actions] {key}") for p in parts),
                )
            )
        return maps[0], maps[1]

    def action_list(self) -> List[ParametricAction]:
        """Actions in application order, conjugated when an automorphism is given."""
        section = self._actions_section()
        ring = self.codomain_ring()
        automorphisms = self._automorphisms()
        actions = []
        for number, step in enumerate(section.steps, start=1):
            where = f"[actions] action{number}"
            match = _WINKELMANN.match(step.strip())
            if match:
                target = self.target_variety().ideal()
                if automorphisms is not None:
                    pull = dict(zip(ring.variables, automorphisms[1].coordinates))
                    pulled = [g.substitute(pull, ring) for g in target.generators]
                    target = Ideal(ring, pulled)
                action = winkelmann_generator(target, int(match.group(1)))
            else:
                action = _explicit_action(step, ring, where)
            if automorphisms is not None:
                action = conjugate_action(action, *automorphisms)
            actions.append(action)
        return actions

    def orbit_map(self) -> PolynomialMap:
        section = self._actions_section()
        parameters = None
        if section.parameters is not None:
            parameters = [p.strip() for p in section.parameters.split(",")]
        composed = compose_actions(
            self.action_list(), self.base_point(), parameters, self.codomain_ring()
        )
        if section.restrict is None:
            return composed
        return restrict_to_subvariety(composed, self.restriction(composed.domain))

    def restriction(self, domain: RingContext) -> Restriction:
        text = self._actions_section().restrict or ""
        pairs = []
        for entry in filter(None, (e.strip() for e in text.split(";"))):
            if "->" not in entry:
                raise ProblemFileError(
                    f"{self.source}: restriction entry {entry!r} needs '->'"
                )
            name, value = (s.strip() for s in entry.split("->", 1))
            if name not in domain:
                raise ProblemFileError(
                    f"{self.source}: {name!r} is not an orbit parameter"
                )
            pairs.append((name, value))
        substituted = {name for name, _ in pairs}
        ring = domain.without(substituted)
        substitution = {
            name: _parse(value, ring, "[actions] restrict") for name, value in pairs
        }
        return Restriction(substitution, ring)

    def configure(
        self, config: Config, seed: Optional[int] = None, samples: Optional[int] = None
    ) -> Config:
        """Problem options over ``config``; explicit command-line values win."""
        options = self.options
        data = config.model_dump()
        if options.seed is not None:
            data["seed"] = options.seed
        if options.samples is not None:
            data["sampling"]["samples"] = options.samples
        if options.round_limit_extra is not None:
            data["engine"]["round_limit_extra"] = options.round_limit_extra
        if options.slice_retries is not None:
            data["engine"]["slice_retries"] = options.slice_retries
        if seed is not None:
            data["seed"] = seed
        if samples is not None:
            data["sampling"]["samples"] = samples
        try:
            return Config.model_validate(data)
        except ValidationError as e:
            raise ProblemFileError(f"{self.source}: invalid options: {e}") from e


def _ring(text: str, where: str) -> RingContext:
    names = [name.strip() for name in text.split(",") if name.strip()]
    try:
        return RingContext(tuple(names))
    except DomainError as e:
        raise ProblemFileError(f"{where}: {e}") from e


def _parse(source: str, ring: RingContext, where: str) -> Polynomial:
    try:
        return parse_polynomial(source.strip(), ring)
    except ParseError as e:
        raise ParseError(f"{where}: {e.message}", e.line, e.column, source) from e


def _explicit_action(step: str, ring: RingContext, where: str) -> ParametricAction:
    if ":" not in step:
        raise ProblemFileError(
            f"{where}: expected 'winkelmann i' or 'parameter: formula, ...'"
        )
    parameter, formula = (s.strip() for s in step.split(":", 1))
    if not re.fullmatch(r"[a-zA-Z][a-zA-Z0-9_]*", parameter):
        raise ProblemFileError(f"{where}: bad parameter name {parameter!r}")
    action_ring = ring.extend([parameter])
    parts = formula.split(",")
    if len(parts) != ring.ngens:
        raise ProblemFileError(
            f"{where}: an action on {ring} needs {ring.ngens} coordinates"
        )
    coordinates = [_parse(p, action_ring, where) for p in parts]
    return action_from_formula(ring, parameter, coordinates)


def parse_problem(text: str, source: str = "<string>") -> ProblemFile:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ProblemFileError(f"{source}: {e}") from e
    data: Dict[str, object] = {"source": source}
    for section in parser.sections():
        items = dict(parser.items(section))
        if section == "actions":
            steps = sorted(
                (int(m.group(1)), key) for key in items if (m := _STEP_KEY.match(key))
            )
            items["steps"] = [items.pop(key) for _, key in steps]
        data[section] = items
    try:
        problem = ProblemFile.model_validate(data)
    except ValidationError as e:
        raise ProblemFileError(f"{source}: {e}") from e
    logger.debug("Problem file loaded", source=source, sections=parser.sections())
    return problem


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"Cannot read {path}: {e}") from e
    return parse_problem(text, str(path))
