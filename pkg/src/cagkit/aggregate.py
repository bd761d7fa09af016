"""Statement-to-edge roll-up: counts by polarity, aggregate polarity and belief.

Pure functions over immutable inputs; safe to call from anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Literal

from .errors import MismatchedStatement
from .model import AggregatePolarity, CausalStatement, Polarity

__all__ = [
    "PolarityCounts",
    "AggregatedEdge",
    "BeliefPolicy",
    "polarity_for_counts",
    "aggregate_edge",
    "aggregate_graph",
]

BeliefPolicy = Literal["max", "mean"]


@dataclass(frozen=True)
class PolarityCounts:
    same: int = 0
    opposite: int = 0
    unknown: int = 0

    def total(self) -> int:
        return self.same + self.opposite + self.unknown


def polarity_for_counts(counts: PolarityCounts) -> AggregatePolarity:
    """Map active-statement polarity counts to the edge's aggregate polarity.

    Same and Opposite require unanimity among directed statements; mixed
    directions, or only direction-less statements, read as Ambiguous
    (the review-the-evidence cue); an empty edge has no evidence at all.
    """
    if counts.total() == 0:
        return AggregatePolarity.NO_EVIDENCE
    if counts.same >= 1 and counts.opposite == 0:
        return AggregatePolarity.SAME
    if counts.opposite >= 1 and counts.same == 0:
        return AggregatePolarity.OPPOSITE
    return AggregatePolarity.AMBIGUOUS


@dataclass(frozen=True)
class AggregatedEdge:
    """A concept-pair edge rolling up its (active) backing statements."""

    subject: str
    object: str
    statement_ids: tuple[str, ...]
    counts: PolarityCounts
    aggregate_polarity: AggregatePolarity
    aggregate_belief: float
    evidence_count: int
    user_polarity_override: Polarity | None = None

    @property
    def support(self) -> int:
        """Number of active backing statements."""
        return len(self.statement_ids)

    def with_override(self, override: Polarity | None) -> "AggregatedEdge":
        """Return a copy with the override set or cleared; counts untouched."""
        if override is not None and override is Polarity.UNKNOWN:
            raise ValueError("override must be same or opposite")
        polarity = (
            _OVERRIDE_TO_AGGREGATE[override]
            if override is not None
            else polarity_for_counts(self.counts)
        )
        return replace(self, user_polarity_override=override, aggregate_polarity=polarity)


_OVERRIDE_TO_AGGREGATE = {
    Polarity.SAME: AggregatePolarity.SAME,
    Polarity.OPPOSITE: AggregatePolarity.OPPOSITE,
}


def _aggregate_belief(beliefs: list[float], policy: BeliefPolicy) -> float:
    if not beliefs:
        return 0.0
    if policy == "mean":
        return sum(beliefs) / len(beliefs)
    return max(beliefs)


def aggregate_edge(
    subject: str,
    object: str,
    statements: Iterable[CausalStatement],
    override: Polarity | None = None,
    belief_policy: BeliefPolicy = "max",
) -> AggregatedEdge:
    """Roll statements for one concept pair into an edge.

    Discarded statements are dropped before counting. Statement order in the
    result is normalized to belief descending, id ascending, so the edge is
    identical however the inputs were gathered.
    """
    active: list[CausalStatement] = []
    for s in statements:
        if (s.subject, s.object) != (subject, object):
            raise MismatchedStatement(
                f"statement {s.id} is {s.subject}->{s.object}, edge is {subject}->{object}"
            )
        if not s.discarded:
            active.append(s)
    active.sort(key=lambda s: (-s.belief, s.id))

    counts = PolarityCounts(
        same=sum(1 for s in active if s.polarity is Polarity.SAME),
        opposite=sum(1 for s in active if s.polarity is Polarity.OPPOSITE),
        unknown=sum(1 for s in active if s.polarity is Polarity.UNKNOWN),
    )
    edge = AggregatedEdge(
        subject=subject,
        object=object,
        statement_ids=tuple(s.id for s in active),
        counts=counts,
        aggregate_polarity=polarity_for_counts(counts),
        aggregate_belief=_aggregate_belief([s.belief for s in active], belief_policy),
        evidence_count=sum(len(s.evidence) for s in active),
    )
    if override is not None:
        edge = edge.with_override(override)
    return edge


def aggregate_graph(
    statements: Iterable[CausalStatement],
    belief_policy: BeliefPolicy = "max",
) -> list[AggregatedEdge]:
    """One edge per distinct (subject, object) pair, sorted by pair.

    The edges' statement lists partition the active input set exactly.
    """
    groups: dict[tuple[str, str], list[CausalStatement]] = {}
    for s in statements:
        if s.discarded:
            continue
        groups.setdefault((s.subject, s.object), []).append(s)
    return [
        aggregate_edge(subj, obj, group, belief_policy=belief_policy)
        for (subj, obj), group in sorted(groups.items())
    ]
