"""Three-level faceted search: document, relationship, and factor/geo-temporal.

All filter groups are conjunctive; within a group's value set the match is
disjunctive. Facet counts follow the remove-own-filter convention so the
filter panel can advertise "what would I get if I picked this value".
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from typing import Any, Iterable, Sequence

from .aggregate import AggregatedEdge, BeliefPolicy, aggregate_edge
from .errors import InvalidQuery
from .model import CausalStatement, Evidence, Polarity
from .store import StatementStore, region_prefixes

__all__ = [
    "FacetQuery",
    "FacetResult",
    "NestedProjection",
    "run_query",
    "nested_graph_projection",
]


@dataclass(frozen=True)
class FacetQuery:
    # document level
    doc_ids: frozenset[str] | None = None
    sources: frozenset[str] | None = None
    year_range: tuple[int, int] | None = None
    # relationship level
    polarities: frozenset[Polarity] | None = None
    min_evidence: int | None = None
    min_belief: float | None = None
    # factor / geo-temporal level
    concepts: frozenset[str] | None = None
    exact_concepts: bool = False
    region_prefix: str | None = None
    bbox: tuple[float, float, float, float] | None = None  # lat_min, lat_max, lon_min, lon_max
    time_overlap: tuple[date, date] | None = None

    def validate(self) -> None:
        if self.min_evidence is not None and self.min_evidence < 1:
            raise InvalidQuery("min_evidence must be >= 1")
        if self.year_range is not None and self.year_range[0] > self.year_range[1]:
            raise InvalidQuery("year_range start must not exceed end")
        if self.min_belief is not None and not 0.0 <= self.min_belief <= 1.0:
            raise InvalidQuery("min_belief must be within [0, 1]")
        if self.time_overlap is not None and self.time_overlap[0] > self.time_overlap[1]:
            raise InvalidQuery("time_overlap start must not exceed end")

    @classmethod
    def from_dict(cls, body: dict[str, Any]) -> "FacetQuery":
        """Parse the grouped JSON wire shape used by the /search endpoint."""
        if not isinstance(body, dict):
            raise InvalidQuery("query body must be an object")
        groups: dict[str, dict[str, Any]] = {}
        for name in ("doc", "rel", "factor"):
            value = body.get(name)
            if value is None:
                value = {}
            if not isinstance(value, dict):
                raise InvalidQuery(f"{name} filters must be an object")
            groups[name] = value
        doc, rel, factor = groups["doc"], groups["rel"], groups["factor"]
        try:
            polarities = rel.get("polarities")
            query = cls(
                doc_ids=frozenset(doc["doc_ids"]) if doc.get("doc_ids") else None,
                sources=frozenset(doc["sources"]) if doc.get("sources") else None,
                year_range=tuple(doc["year_range"]) if doc.get("year_range") else None,
                polarities=(
                    frozenset(Polarity.from_wire(p) for p in polarities)
                    if polarities
                    else None
                ),
                min_evidence=rel.get("min_evidence"),
                min_belief=rel.get("min_belief"),
                concepts=frozenset(factor["concepts"]) if factor.get("concepts") else None,
                exact_concepts=bool(factor.get("exact", False)),
                region_prefix=factor.get("region_prefix"),
                bbox=tuple(factor["bbox"]) if factor.get("bbox") else None,
                time_overlap=(
                    (
                        date.fromisoformat(factor["time_overlap"][0]),
                        date.fromisoformat(factor["time_overlap"][1]),
                    )
                    if factor.get("time_overlap")
                    else None
                ),
            )
        except (TypeError, ValueError, KeyError, IndexError) as exc:
            raise InvalidQuery(f"malformed query: {exc}") from exc
        if query.year_range is not None and len(query.year_range) != 2:
            raise InvalidQuery("year_range must be [start, end]")
        if query.bbox is not None and len(query.bbox) != 4:
            raise InvalidQuery("bbox must be [lat_min, lat_max, lon_min, lon_max]")
        query.validate()
        return query

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        rel: dict[str, Any] = {}
        factor: dict[str, Any] = {}
        if self.doc_ids is not None:
            doc["doc_ids"] = sorted(self.doc_ids)
        if self.sources is not None:
            doc["sources"] = sorted(self.sources)
        if self.year_range is not None:
            doc["year_range"] = list(self.year_range)
        if self.polarities is not None:
            rel["polarities"] = sorted(p.to_wire() for p in self.polarities)
        if self.min_evidence is not None:
            rel["min_evidence"] = self.min_evidence
        if self.min_belief is not None:
            rel["min_belief"] = self.min_belief
        if self.concepts is not None:
            factor["concepts"] = sorted(self.concepts)
            if self.exact_concepts:
                factor["exact"] = True
        if self.region_prefix is not None:
            factor["region_prefix"] = self.region_prefix
        if self.bbox is not None:
            factor["bbox"] = list(self.bbox)
        if self.time_overlap is not None:
            factor["time_overlap"] = [d.isoformat() for d in self.time_overlap]
        out: dict[str, Any] = {}
        if doc:
            out["doc"] = doc
        if rel:
            out["rel"] = rel
        if factor:
            out["factor"] = factor
        return out


@dataclass(frozen=True)
class FacetResult:
    statement_ids: tuple[str, ...]
    total: int
    facet_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "statement_ids": list(self.statement_ids),
            "total": self.total,
            "facet_counts": self.facet_counts,
        }


# ------------------------------------------------------------------ matching


def _evidence_matches_doc(ev: Evidence, q: FacetQuery, skip: str | None = None) -> bool:
    """One evidence item against the document-level filters (minus ``skip``)."""
    if skip != "doc_ids" and q.doc_ids is not None and ev.doc_id not in q.doc_ids:
        return False
    if skip != "sources" and q.sources is not None and ev.source not in q.sources:
        return False
    if skip != "year" and q.year_range is not None:
        if ev.publication_date is None:
            return False
        if not q.year_range[0] <= ev.publication_date.year <= q.year_range[1]:
            return False
    return True


def _region_matches(region_path: str | None, prefix: str) -> bool:
    if not region_path:
        return False
    return region_path == prefix or region_path.startswith(prefix + "/")


def _concept_in_filter(concept_id: str, q: FacetQuery) -> bool:
    assert q.concepts is not None
    if concept_id in q.concepts:
        return True
    if q.exact_concepts:
        return False
    return any(concept_id.startswith(c + "/") for c in q.concepts)


def matches(s: CausalStatement, q: FacetQuery) -> bool:
    """Full conjunctive predicate; discarded statements never match."""
    if s.discarded:
        return False
    if q.doc_ids is not None or q.sources is not None or q.year_range is not None:
        if not any(_evidence_matches_doc(ev, q) for ev in s.evidence):
            return False
    if q.polarities is not None and s.polarity not in q.polarities:
        return False
    if q.min_evidence is not None and len(s.evidence) < q.min_evidence:
        return False
    if q.min_belief is not None and s.belief < q.min_belief:
        return False
    if q.concepts is not None:
        if not (_concept_in_filter(s.subject, q) or _concept_in_filter(s.object, q)):
            return False
    if q.region_prefix is not None and not _region_matches(s.context.region_path, q.region_prefix):
        return False
    if q.bbox is not None:
        if s.context.lat_lon is None:
            return False
        lat, lon = s.context.lat_lon
        lat_min, lat_max, lon_min, lon_max = q.bbox
        if not (lat_min <= lat <= lat_max and lon_min <= lon <= lon_max):
            return False
    if q.time_overlap is not None:
        interval = s.context.time_interval
        if interval is None:
            return False
        if interval[1] < q.time_overlap[0] or interval[0] > q.time_overlap[1]:
            return False
    return True


# ------------------------------------------------------------------- indexed


def _candidate_ids(store: StatementStore, q: FacetQuery) -> set[str] | None:
    """Smallest index-derived candidate superset, or None for 'scan all'."""
    index = store.index
    candidates: list[set[str]] = []
    if q.doc_ids is not None:
        candidates.append(set().union(*(index.by_doc.get(d, set()) for d in q.doc_ids)) if q.doc_ids else set())
    if q.sources is not None:
        candidates.append(set().union(*(index.by_source.get(s, set()) for s in q.sources)) if q.sources else set())
    if q.year_range is not None:
        years = range(q.year_range[0], q.year_range[1] + 1)
        candidates.append(set().union(*(index.by_year.get(y, set()) for y in years)) if q.year_range else set())
    if q.region_prefix is not None:
        candidates.append(set(index.by_region.get(q.region_prefix, set())))
    if q.concepts is not None:
        ids: set[str] = set()
        for concept in _expand_concepts(store, q):
            ids |= index.by_subject.get(concept, set())
            ids |= index.by_object.get(concept, set())
        candidates.append(ids)
    if not candidates:
        return None
    return min(candidates, key=len)


def _expand_concepts(store: StatementStore, q: FacetQuery) -> set[str]:
    assert q.concepts is not None
    if q.exact_concepts:
        return set(q.concepts)
    expanded = set(q.concepts)
    for concept_id in store.concepts():
        if any(concept_id.startswith(c + "/") for c in q.concepts):
            expanded.add(concept_id)
    return expanded


_FACET_FIELDS = ("polarity", "source", "year", "region", "concept")

_FIELD_CLEARED: dict[str, dict[str, Any]] = {
    "polarity": {"polarities": None},
    "source": {"sources": None},
    "year": {"year_range": None},
    "region": {"region_prefix": None},
    "concept": {"concepts": None},
}


def _facet_values(s: CausalStatement, q: FacetQuery, fieldname: str) -> Iterable[str]:
    """Facet values this statement counts toward, joint with the other filters.

    For document-level facets the value must appear on an evidence item that
    also satisfies the remaining document filters, so advertised counts stay
    exact under re-query.
    """
    if fieldname == "polarity":
        return (s.polarity.value,)
    if fieldname == "source":
        return {
            ev.source
            for ev in s.evidence
            if ev.source and _evidence_matches_doc(ev, q, skip="sources")
        }
    if fieldname == "year":
        return {
            str(ev.publication_date.year)
            for ev in s.evidence
            if ev.publication_date is not None and _evidence_matches_doc(ev, q, skip="year")
        }
    if fieldname == "region":
        if not s.context.region_path:
            return ()
        return region_prefixes(s.context.region_path)
    if fieldname == "concept":
        values: set[str] = set()
        for concept_id in (s.subject, s.object):
            values.add(concept_id)
            if not q.exact_concepts:
                parts = concept_id.split("/")
                values.update("/".join(parts[:i]) for i in range(1, len(parts)))
        return values
    raise ValueError(fieldname)


def run_query(store: StatementStore, q: FacetQuery, with_facets: bool = True) -> FacetResult:
    """Evaluate a facet query against the store's indexes.

    Matches exactly the statements satisfying every present filter;
    statement ids come back sorted for determinism.
    """
    q.validate()
    matched = _evaluate(store, q)
    facet_counts: dict[str, dict[str, int]] = {}
    if with_facets:
        for fieldname in _FACET_FIELDS:
            reduced = replace(q, **_FIELD_CLEARED[fieldname])
            base = matched if reduced == q else _evaluate(store, reduced)
            counts: dict[str, int] = {}
            for s in base:
                for value in _facet_values(s, reduced, fieldname):
                    counts[value] = counts.get(value, 0) + 1
            facet_counts[fieldname] = dict(sorted(counts.items()))
    ids = tuple(sorted(s.id for s in matched))
    return FacetResult(statement_ids=ids, total=len(ids), facet_counts=facet_counts)


def _evaluate(store: StatementStore, q: FacetQuery) -> list[CausalStatement]:
    candidates = _candidate_ids(store, q)
    if candidates is None:
        rows = store.all_statements()
    else:
        rows = [s for sid in candidates if (s := store.statement(sid)) is not None]
    return [s for s in rows if matches(s, q)]


# -------------------------------------------------------------- nested view


@dataclass(frozen=True)
class NestedProjection:
    """Ontology-compartment grouping of a search result.

    ``edges`` is None when the distinct relationship count exceeded the
    limit; ``suppressed_edge_count`` then carries the hidden count.
    """

    compartments: dict[str, list[tuple[str, int]]]
    edges: list[AggregatedEdge] | None
    suppressed_edge_count: int | None = None

    @property
    def suppressed(self) -> bool:
        return self.edges is None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "compartments": {
                parent: [{"concept": c, "count": n} for c, n in members]
                for parent, members in self.compartments.items()
            }
        }
        if self.suppressed:
            out["edges"] = "SUPPRESSED"
            out["suppressed_edge_count"] = self.suppressed_edge_count
        else:
            out["edges"] = [
                {
                    "subj": e.subject,
                    "obj": e.object,
                    "polarity": e.aggregate_polarity.value,
                    "belief": e.aggregate_belief,
                    "support": e.support,
                }
                for e in (self.edges or [])
            ]
        return out


def nested_graph_projection(
    store: StatementStore,
    result: FacetResult,
    edge_limit: int = 2000,
    belief_policy: BeliefPolicy = "max",
) -> NestedProjection:
    """Group result concepts by ontology parent and aggregate result edges.

    Above ``edge_limit`` distinct relationships the edges are withheld and
    only the count is reported (the anti-clutter rule).
    """
    rows: list[CausalStatement] = [
        s for sid in result.statement_ids if (s := store.statement(sid, include_discarded=False))
    ]
    concept_counts: dict[str, int] = {}
    pairs: dict[tuple[str, str], list[CausalStatement]] = {}
    for s in rows:
        for concept_id in {s.subject, s.object}:
            concept_counts[concept_id] = concept_counts.get(concept_id, 0) + 1
        pairs.setdefault((s.subject, s.object), []).append(s)

    compartments: dict[str, list[tuple[str, int]]] = {}
    for concept_id in sorted(concept_counts):
        parent = concept_id.rsplit("/", 1)[0] if "/" in concept_id else ""
        compartments.setdefault(parent, []).append((concept_id, concept_counts[concept_id]))

    if len(pairs) > edge_limit:
        return NestedProjection(
            compartments=compartments, edges=None, suppressed_edge_count=len(pairs)
        )
    edges = [
        aggregate_edge(subj, obj, group, belief_policy=belief_policy)
        for (subj, obj), group in sorted(pairs.items())
    ]
    return NestedProjection(compartments=compartments, edges=edges)
