"""Core domain vocabulary: statements, concepts, evidence, polarity, belief.

All types here are immutable values. Mutation of curation state (discarding,
re-grounding, polarity correction) happens in the store overlay, which
materializes fresh statement values via :func:`dataclasses.replace`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Any

from .errors import ValidationFailed

__all__ = [
    "Polarity",
    "AggregatePolarity",
    "Concept",
    "Evidence",
    "GeoTemporalContext",
    "CausalStatement",
    "validate_statement",
    "statement_to_record",
    "statement_from_record",
    "display_name_for",
]


class Polarity(Enum):
    """Direction of influence carried by a single statement.

    Unknown marks extractions that lacked a direction cue; it is never a
    user-chosen value.
    """

    SAME = "same"
    OPPOSITE = "opposite"
    UNKNOWN = "unknown"

    @classmethod
    def from_wire(cls, value: int) -> "Polarity":
        """Decode the integer wire encoding: 1=same, -1=opposite, 0=unknown."""
        try:
            return _POLARITY_FROM_INT[value]
        except (KeyError, TypeError):
            raise ValueError(f"bad polarity value: {value!r}") from None

    def to_wire(self) -> int:
        return _POLARITY_TO_INT[self]


_POLARITY_FROM_INT = {1: Polarity.SAME, -1: Polarity.OPPOSITE, 0: Polarity.UNKNOWN}
_POLARITY_TO_INT = {v: k for k, v in _POLARITY_FROM_INT.items()}


class AggregatePolarity(Enum):
    """Polarity of a concept-pair edge after rolling up its statements."""

    SAME = "same"
    OPPOSITE = "opposite"
    AMBIGUOUS = "ambiguous"
    NO_EVIDENCE = "no_evidence"


def display_name_for(concept_id: str) -> str:
    """Derive a human label from the last path segment of a concept id."""
    leaf = concept_id.rsplit("/", 1)[-1]
    return leaf.replace("_", " ").title()


@dataclass(frozen=True)
class Concept:
    """A factor node identified by an ontology path like ``wm/concept/agriculture/crop_production``."""

    id: str
    display_name: str = ""

    def __post_init__(self) -> None:
        if not self.display_name:
            object.__setattr__(self, "display_name", display_name_for(self.id))

    @property
    def depth(self) -> int:
        return len(self.id.split("/"))

    @property
    def parent(self) -> str:
        """Ontology compartment: the path minus its last segment ('' at the root)."""
        head, _, _ = self.id.rpartition("/")
        return head

    @staticmethod
    def valid_id(concept_id: Any) -> bool:
        if not isinstance(concept_id, str) or not concept_id:
            return False
        if any(ch.isspace() for ch in concept_id):
            return False
        return all(seg for seg in concept_id.split("/"))


@dataclass(frozen=True)
class Evidence:
    """One source snippet backing a statement."""

    doc_id: str
    text: str
    source: str = ""
    publication_date: date | None = None
    location_in_doc: tuple[int, int] | None = None


@dataclass(frozen=True)
class GeoTemporalContext:
    """Where and when a statement applies; every field optional."""

    region_path: str | None = None
    lat_lon: tuple[float, float] | None = None
    time_interval: tuple[date, date] | None = None


@dataclass(frozen=True)
class CausalStatement:
    """One extracted subject -> object assertion with its evidence."""

    id: str
    subject: str
    object: str
    subject_text: str
    object_text: str
    polarity: Polarity
    belief: float
    evidence: tuple[Evidence, ...]
    context: GeoTemporalContext = field(default_factory=GeoTemporalContext)
    discarded: bool = False

    def mentions(self, concept_id: str) -> bool:
        return self.subject == concept_id or self.object == concept_id


def _derive_statement_id(subject: str, obj: str, polarity: Polarity, ev: Evidence) -> str:
    """Content hash used when the ingest record lacks an id.

    Stable across re-ingests so appends dedup instead of duplicating.
    """
    h = hashlib.sha256()
    for part in (subject, obj, str(polarity.to_wire()), ev.doc_id, ev.text):
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return "st-" + h.hexdigest()[:16]


def _parse_date(value: Any, where: str, errors: list[str]) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError):
        errors.append(f"BadDate:{where}")
        return None


def validate_statement(raw: dict[str, Any]) -> CausalStatement:
    """Validate one ingest record and build a statement from it.

    Collects every violated invariant before failing: raises
    :class:`ValidationFailed` whose ``errors`` list names all problems,
    never just the first one. Total over arbitrary JSON-shaped input.
    """
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ValidationFailed(["MissingField:record"])

    def str_field(container: Any, key: str, where: str, required: bool = True) -> str:
        value = container.get(key) if isinstance(container, dict) else None
        if isinstance(value, str) and value:
            return value
        if required:
            errors.append(f"MissingField:{where}")
        return ""

    subj = raw.get("subj")
    obj = raw.get("obj")
    subject = str_field(subj, "concept", "subj.concept")
    subject_text = str_field(subj, "text", "subj.text", required=False)
    object_ = str_field(obj, "concept", "obj.concept")
    object_text = str_field(obj, "text", "obj.text", required=False)

    if subject and not Concept.valid_id(subject):
        errors.append("BadConcept:subj")
    if object_ and not Concept.valid_id(object_):
        errors.append("BadConcept:obj")
    if subject and object_ and subject == object_:
        errors.append("SelfLoop")

    try:
        polarity = Polarity.from_wire(raw.get("polarity"))
    except ValueError:
        errors.append("MissingField:polarity")
        polarity = Polarity.UNKNOWN

    belief = raw.get("belief")
    if not isinstance(belief, (int, float)) or isinstance(belief, bool):
        errors.append("MissingField:belief")
        belief = 0.0
    elif not 0.0 <= belief <= 1.0:
        errors.append("BeliefOutOfRange")

    evidence: list[Evidence] = []
    raw_evidence = raw.get("evidence")
    if not isinstance(raw_evidence, list) or not raw_evidence:
        errors.append("EmptyEvidence")
    else:
        for i, item in enumerate(raw_evidence):
            doc_id = str_field(item, "doc_id", f"evidence[{i}].doc_id")
            text = str_field(item, "text", f"evidence[{i}].text")
            source = str_field(item, "source", f"evidence[{i}].source", required=False)
            pub = _parse_date(
                item.get("date") if isinstance(item, dict) else None,
                f"evidence[{i}].date",
                errors,
            )
            evidence.append(Evidence(doc_id=doc_id, text=text, source=source, publication_date=pub))

    context = _validate_context(raw.get("context"), errors)

    if errors:
        raise ValidationFailed(sorted(set(errors)))

    statement_id = raw.get("id")
    if not isinstance(statement_id, str) or not statement_id:
        statement_id = _derive_statement_id(subject, object_, polarity, evidence[0])

    return CausalStatement(
        id=statement_id,
        subject=subject,
        object=object_,
        subject_text=subject_text,
        object_text=object_text,
        polarity=polarity,
        belief=float(belief),
        evidence=tuple(evidence),
        context=context,
    )


def _validate_context(raw: Any, errors: list[str]) -> GeoTemporalContext:
    if raw is None:
        return GeoTemporalContext()
    if not isinstance(raw, dict):
        errors.append("MissingField:context")
        return GeoTemporalContext()

    region = raw.get("region")
    if region is not None:
        if not isinstance(region, str) or not region or not all(
            seg.strip() and seg == seg.strip() for seg in region.split("/")
        ):
            errors.append("BadRegionPath")
            region = None

    lat, lon = raw.get("lat"), raw.get("lon")
    lat_lon: tuple[float, float] | None = None
    if lat is not None or lon is not None:
        if (
            isinstance(lat, (int, float))
            and isinstance(lon, (int, float))
            and -90.0 <= lat <= 90.0
            and -180.0 <= lon <= 180.0
        ):
            lat_lon = (float(lat), float(lon))
        else:
            errors.append("BadCoordinates")

    start = _parse_date(raw.get("start"), "context.start", errors)
    end = _parse_date(raw.get("end"), "context.end", errors)
    interval: tuple[date, date] | None = None
    if start is not None and end is not None:
        if start <= end:
            interval = (start, end)
        else:
            errors.append("BadDateOrder")
    elif start is not None or end is not None:
        # open-ended intervals are stored as degenerate single-day spans
        point = start or end
        interval = (point, point)  # type: ignore[arg-type]

    return GeoTemporalContext(region_path=region, lat_lon=lat_lon, time_interval=interval)


def statement_to_record(s: CausalStatement) -> dict[str, Any]:
    """Encode a statement back into the line-delimited ingest format."""
    record: dict[str, Any] = {
        "id": s.id,
        "subj": {"concept": s.subject, "text": s.subject_text},
        "obj": {"concept": s.object, "text": s.object_text},
        "polarity": s.polarity.to_wire(),
        "belief": s.belief,
        "evidence": [],
    }
    for ev in s.evidence:
        item: dict[str, Any] = {"doc_id": ev.doc_id, "text": ev.text}
        if ev.source:
            item["source"] = ev.source
        if ev.publication_date is not None:
            item["date"] = ev.publication_date.isoformat()
        record["evidence"].append(item)
    ctx = s.context
    context: dict[str, Any] = {}
    if ctx.region_path is not None:
        context["region"] = ctx.region_path
    if ctx.lat_lon is not None:
        context["lat"], context["lon"] = ctx.lat_lon
    if ctx.time_interval is not None:
        context["start"] = ctx.time_interval[0].isoformat()
        context["end"] = ctx.time_interval[1].isoformat()
    if context:
        record["context"] = context
    return record


def statement_from_record(record: dict[str, Any]) -> CausalStatement:
    """Inverse of :func:`statement_to_record` (same validation path as ingest)."""
    return validate_statement(record)
