"""Command-line entry point: ``affine-image construct|image|verify|orbit <file>``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from affine_image.config import LOG_LEVELS, Config
from affine_image.errors import AffineImageError, DomainError, RoundLimitExceededError
from affine_image.ideal import Ideal
from affine_image.image import (
    complement_discrepancy,
    complement_ideal,
    constructible_image,
)
from affine_image.problem import ProblemFile, load_problem
from affine_image.report import (
    ImageReport,
    Report,
    certificate_report,
    construction_report,
    image_report,
    map_report,
    render_summary,
    to_json,
    trace_report,
)
from affine_image.surjection import THEOREM_MAIN, VARIANTS, construct_surjection
from affine_image.verifier import check_degree_bound, verify_surjection

logger = structlog.get_logger("affine_image")

EXIT_OK = 0
EXIT_UNVERIFIED = 1
EXIT_INPUT = 2
EXIT_ENGINE = 3


def configure_logging(level: str) -> None:
    """stdlib logging to stderr plus structlog on top; stdout is kept for reports."""
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    logging.getLogger().setLevel(level)
    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        context_class=dict,
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affine-image",
        description=(
            "Surjections onto complements of affine varieties, and image computation."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)
    helps = {
        "construct": "build a surjection onto A^n minus the target",
        "image": "compute the constructible image of a map",
        "verify": "certify that a map surjects onto A^n minus the target",
        "orbit": "compose additive actions from a base point",
    }
    for name, text in helps.items():
        sub = commands.add_parser(name, help=text)
        sub.add_argument("file", type=Path, help="problem file")
        sub.add_argument("--variant", choices=VARIANTS, default=None)
        sub.add_argument(
            "--generic-change",
            action="store_true",
            help="apply a random linear change before the pure-powers restriction",
        )
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--samples", type=int, default=None)
        sub.add_argument("--jobs", type=int, default=None)
        sub.add_argument(
            "--json",
            dest="json_path",
            default=None,
            help="write the JSON report here ('-' for stdout)",
        )
        sub.add_argument(
            "--log-level", choices=LOG_LEVELS, default=None, type=str.upper
        )
    return parser


def _variant(args, problem: ProblemFile) -> str:
    return args.variant or problem.options.variant or THEOREM_MAIN


def run_construct(problem: ProblemFile, args, config: Config) -> Report:
    target = problem.target_variety()
    variant = _variant(args, problem)
    construction = construct_surjection(
        target,
        variant,
        generic_change=args.generic_change or problem.options.generic_change,
        seed=config.seed,
        config=config.builder,
    )
    audit = check_degree_bound(construction.surjection, target, variant)
    return Report(
        command="construct",
        problem=problem.source,
        seed=config.seed,
        construction=construction_report(construction, audit),
    )


def _image(
    f, report: Report, config: Config, stated: Optional[Ideal] = None
) -> Report:
    try:
        result, trace = constructible_image(f, seed=config.seed, config=config.engine)
    except RoundLimitExceededError as e:
        report.error = str(e)
        report.exit_status = EXIT_ENGINE
        if e.trace is not None:
            report.image = ImageReport(pieces=[], trace=trace_report(e.trace))
        return report
    complement = complement_ideal(result)
    notes = []
    if stated is not None:
        note = complement_discrepancy(complement, stated)
        if note is not None:
            logger.warning("Stated complement does not match", note=note)
            notes.append(note)
    report.image = image_report(result, trace, complement, notes)
    return report


def run_image(problem: ProblemFile, args, config: Config) -> Report:
    report = Report(command="image", problem=problem.source, seed=config.seed)
    return _image(
        problem.polynomial_map(), report, config, problem.stated_complement()
    )


def run_verify(problem: ProblemFile, args, config: Config) -> Report:
    target = problem.target_variety()
    variant = args.variant or problem.options.variant
    if problem.map:
        f = problem.polynomial_map()
    elif problem.actions is not None:
        f = problem.orbit_map()
    else:
        variant = variant or THEOREM_MAIN
        f = construct_surjection(
            target,
            variant,
            generic_change=args.generic_change or problem.options.generic_change,
            seed=config.seed,
            config=config.builder,
        ).surjection
    certificate = verify_surjection(
        f, target, seed=config.seed, variant=variant, config=config
    )
    return Report(
        command="verify",
        problem=problem.source,
        seed=config.seed,
        certificate=certificate_report(certificate),
        exit_status=EXIT_OK if certificate.verdict else EXIT_UNVERIFIED,
    )


def run_orbit(problem: ProblemFile, args, config: Config) -> Report:
    f = problem.orbit_map()
    report = Report(
        command="orbit", problem=problem.source, seed=config.seed, orbit=map_report(f)
    )
    if problem.actions.image:
        report = _image(f, report, config, problem.stated_complement())
    return report


COMMANDS = {
    "construct": run_construct,
    "image": run_image,
    "verify": run_verify,
    "orbit": run_orbit,
}


def _emit(report: Report, json_path: Optional[str]) -> None:
    if json_path == "-":
        sys.stdout.write(to_json(report))
        return
    sys.stdout.write(render_summary(report))
    if json_path is not None:
        Path(json_path).write_text(to_json(report), encoding="utf-8")


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = Config.from_env().with_overrides(
            jobs=args.jobs, log_level=args.log_level
        )
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    configure_logging(config.log_level)
    try:
        problem = load_problem(args.file)
        config = problem.configure(config, seed=args.seed, samples=args.samples)
        logger.info("Running command", command=args.command, problem=problem.source)
        report = COMMANDS[args.command](problem, args, config)
    except DomainError as e:
        logger.error("Invalid input", error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except AffineImageError as e:
        logger.error("Computation failed", error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ENGINE
    except Exception as e:
        logger.error("Unexpected failure", error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ENGINE
    _emit(report, args.json_path)
    return report.exit_status


def main():
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
