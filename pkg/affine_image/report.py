"""JSON and plain-text reports for the command-line interface."""

import json
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from affine_image.ideal import Ideal
from affine_image.image import ConstructibleSet, ImageTrace, PolynomialMap
from affine_image.surjection import Construction
from affine_image.verifier import Certificate, DegreeAudit

SCHEMA_VERSION = 1


class MapReport(BaseModel):
    domain: List[str]
    codomain: List[str]
    coordinates: List[str]
    degree: int


class PieceReport(BaseModel):
    closed: List[str]
    removed: List[str]


class ChartReport(BaseModel):
    variable: str
    eliminated: List[str]
    reduced: List[str]
    radical_applied: bool


class RoundReport(BaseModel):
    index: int
    graph: List[str]
    graph_basis_size: int
    domain_dimension: int
    image_dimension: int
    slice_forms: List[str]
    closure: List[str]
    at_infinity_generators: int
    charts: List[ChartReport]
    boundary: List[str]


class TraceReport(BaseModel):
    rounds: List[RoundReport]
    terminated: bool


class ImageReport(BaseModel):
    pieces: List[PieceReport]
    complement: Optional[List[str]] = None
    surjective: bool = False
    notes: List[str] = Field(default_factory=list)
    trace: Optional[TraceReport] = None


class DegreeReport(BaseModel):
    observed: int
    bound: int
    within: bool
    stated_bound: int
    stated_within: bool


class FiberSampleReport(BaseModel):
    point: List[str]
    on_target: bool
    nonempty: bool
    ok: bool


class CertificateReport(BaseModel):
    verdict: bool
    variant: Optional[str] = None
    avoidance: Optional[bool] = None
    complement_match: Optional[bool] = None
    complement: Optional[List[str]] = None
    fiber_samples: List[FiberSampleReport] = Field(default_factory=list)
    degree: Optional[DegreeReport] = None
    notes: List[str] = Field(default_factory=list)
    trace: Optional[TraceReport] = None


class ConstructionReport(BaseModel):
    variant: str
    target: List[str]
    surjection: MapReport
    change_coefficients: Optional[List[int]] = None
    changed_target: Optional[List[str]] = None
    degree: DegreeReport


class Report(BaseModel):
    """Top-level report; serialized with ``schema`` as the version key."""

    schema_version: int = Field(default=SCHEMA_VERSION, serialization_alias="schema")
    command: str
    problem: str
    seed: int
    exit_status: int = 0
    construction: Optional[ConstructionReport] = None
    image: Optional[ImageReport] = None
    certificate: Optional[CertificateReport] = None
    orbit: Optional[MapReport] = None
    error: Optional[str] = None


# -- builders -----------------------------------------------------------------


def _render(ideal: Optional[Ideal]) -> Optional[List[str]]:
    if ideal is None:
        return None
    return [g.render() for g in ideal.groebner_basis()]


def map_report(f: PolynomialMap) -> MapReport:
    return MapReport(
        domain=list(f.domain.variables),
        codomain=list(f.codomain.variables),
        coordinates=f.render(),
        degree=f.total_degree(),
    )


def degree_report(audit: DegreeAudit) -> DegreeReport:
    return DegreeReport(
        observed=audit.observed,
        bound=audit.bound,
        within=audit.within,
        stated_bound=audit.stated_bound,
        stated_within=audit.stated_within,
    )


def trace_report(trace: ImageTrace) -> TraceReport:
    rounds = []
    for record in trace.rounds:
        charts = [
            ChartReport(
                variable=chart.variable,
                eliminated=_render(chart.eliminated),
                reduced=_render(chart.reduced),
                radical_applied=chart.radical_applied,
            )
            for chart in record.boundary.charts
        ]
        rounds.append(
            RoundReport(
                index=record.index,
                graph=record.graph.render(),
                graph_basis_size=len(record.graph.groebner_basis()),
                domain_dimension=record.domain_dimension,
                image_dimension=record.image_dimension,
                slice_forms=[form.render() for form in record.slice_forms],
                closure=_render(record.closure),
                at_infinity_generators=len(record.boundary.at_infinity.generators),
                charts=charts,
                boundary=_render(record.boundary.locus),
            )
        )
    return TraceReport(rounds=rounds, terminated=trace.terminated)


def image_report(
    result: ConstructibleSet,
    trace: ImageTrace,
    complement: Optional[Ideal],
    notes: Sequence[str] = (),
) -> ImageReport:
    return ImageReport(
        pieces=[
            PieceReport(closed=_render(p.closed), removed=_render(p.removed))
            for p in result.pieces
        ],
        complement=_render(complement),
        surjective=complement is not None and complement.contains_one(),
        notes=list(notes),
        trace=trace_report(trace),
    )


def certificate_report(certificate: Certificate) -> CertificateReport:
    return CertificateReport(
        verdict=certificate.verdict,
        variant=certificate.variant,
        avoidance=certificate.avoidance,
        complement_match=certificate.complement_match,
        complement=_render(certificate.complement),
        fiber_samples=[
            FiberSampleReport(
                point=[str(x) for x in sample.point],
                on_target=sample.on_target,
                nonempty=sample.nonempty,
                ok=sample.ok,
            )
            for sample in certificate.fiber_samples
        ],
        degree=degree_report(certificate.degree) if certificate.degree else None,
        notes=list(certificate.notes),
        trace=trace_report(certificate.trace) if certificate.trace else None,
    )


def construction_report(
    construction: Construction, audit: DegreeAudit
) -> ConstructionReport:
    change = construction.change
    return ConstructionReport(
        variant=construction.variant,
        target=construction.target.render(),
        surjection=map_report(construction.surjection),
        change_coefficients=list(change.coefficients) if change else None,
        changed_target=change.target.render() if change else None,
        degree=degree_report(audit),
    )


# -- output -------------------------------------------------------------------


def to_json(report: Report) -> str:
    payload = report.model_dump(by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _ideal_text(gens: Optional[List[str]]) -> str:
    if gens is None:
        return "n/a"
    return "(" + ", ".join(gens or ["0"]) + ")"


def _map_lines(title: str, f: MapReport) -> List[str]:
    shape = f"A^{len(f.domain)} -> A^{len(f.codomain)}"
    lines = [f"{title}: {shape} in {', '.join(f.domain)}"]
    lines += [f"  {w} = {c}" for w, c in zip(f.codomain, f.coordinates)]
    lines.append(f"  degree {f.degree}")
    return lines


def render_summary(report: Report) -> str:
    """Human-readable summary for standard output."""
    lines = [f"{report.command}: {report.problem} (seed {report.seed})"]
    if report.construction is not None:
        c = report.construction
        lines.append(f"target: V{_ideal_text(c.target)}")
        if c.change_coefficients is not None:
            lines.append(f"linear change A = {c.change_coefficients}")
            lines.append(f"changed target: V{_ideal_text(c.changed_target)}")
        lines += _map_lines(f"surjection ({c.variant})", c.surjection)
        lines.append(
            f"  bound {c.degree.bound} ({'ok' if c.degree.within else 'EXCEEDED'})"
        )
    if report.orbit is not None:
        lines += _map_lines("orbit map", report.orbit)
    if report.image is not None:
        image = report.image
        for k, piece in enumerate(image.pieces, start=1):
            lines.append(
                f"piece {k}: V{_ideal_text(piece.closed)} "
                f"\\ V{_ideal_text(piece.removed)}"
            )
        if image.surjective:
            lines.append("image = A^n")
        elif image.complement is not None:
            lines.append(f"complement: V{_ideal_text(image.complement)}")
        else:
            lines.append("image is not the complement of a closed set")
        lines += [f"note: {note}" for note in image.notes]
        if image.trace is not None:
            lines.append(f"rounds: {len(image.trace.rounds)}")
    if report.certificate is not None:
        cert = report.certificate
        lines.append(f"avoidance: {cert.avoidance}")
        lines.append(f"complement match: {cert.complement_match}")
        if cert.complement is not None:
            lines.append(f"complement: V{_ideal_text(cert.complement)}")
        bad = sum(not s.ok for s in cert.fiber_samples)
        lines.append(f"fiber samples: {len(cert.fiber_samples)} ({bad} failed)")
        if cert.degree is not None:
            lines.append(
                f"degree: {cert.degree.observed} <= {cert.degree.bound}: "
                f"{cert.degree.within}"
            )
        lines += [f"note: {note}" for note in cert.notes]
        lines.append(f"verdict: {'PASS' if cert.verdict else 'FAIL'}")
    if report.error is not None:
        lines.append(f"error: {report.error}")
    return "\n".join(lines) + "\n"
