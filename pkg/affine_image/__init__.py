"""Exact polynomial algebra, constructible images and surjections onto A^n minus Z."""

from affine_image.errors import (
    AffineImageError,
    DegreeUndefinedError,
    DomainError,
    GenericityError,
    GroupLawError,
    NoGeneratorError,
    ParseError,
    ProblemFileError,
    PurePowerError,
    RoundLimitExceededError,
    UnsupportedOperationError,
)
from affine_image.ideal import Ideal
from affine_image.image import PolynomialMap, complement_ideal, constructible_image
from affine_image.orders import TermOrder
from affine_image.parser import parse_polynomial
from affine_image.polynomial import Polynomial, RingContext
from affine_image.surjection import (
    TargetVariety,
    build_psi,
    construct_surjection,
    restrict_pure_powers,
    restrict_theorem_main,
)
from affine_image.verifier import verify_surjection

__version__ = "0.1.0"

__all__ = [
    "AffineImageError",
    "DegreeUndefinedError",
    "DomainError",
    "GenericityError",
    "GroupLawError",
    "Ideal",
    "NoGeneratorError",
    "ParseError",
    "Polynomial",
    "PolynomialMap",
    "ProblemFileError",
    "PurePowerError",
    "RingContext",
    "RoundLimitExceededError",
    "TargetVariety",
    "TermOrder",
    "UnsupportedOperationError",
    "build_psi",
    "complement_ideal",
    "construct_surjection",
    "constructible_image",
    "parse_polynomial",
    "restrict_pure_powers",
    "restrict_theorem_main",
    "verify_surjection",
]
