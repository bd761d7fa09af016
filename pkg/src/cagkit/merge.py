"""Model integration: imports, near-duplicate node detection, node fusion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .cag import ActionKind, CAGModel, CAGWorkspace, CurationAction, MutationReport, Pair
from .errors import SelfImport, UnknownNode
from .model import AggregatePolarity, Polarity, display_name_for
from .suggest import EmbeddingTable

__all__ = [
    "NodeMatch",
    "MergeReport",
    "string_similarity",
    "levenshtein",
    "find_near_duplicates",
    "import_models",
    "apply_node_merge",
]

# matches below the merge threshold but above this floor are surfaced as
# reviewable ("keep") so the curation checklist shows near misses
REPORT_FLOOR = 0.75


@dataclass(frozen=True)
class NodeMatch:
    a: str
    b: str
    score: float
    recommendation: str  # "merge" | "keep"

    def to_dict(self) -> dict[str, Any]:
        return {"a": self.a, "b": self.b, "score": self.score, "recommendation": self.recommendation}


@dataclass
class MergeReport:
    imported_models: list[str]
    node_matches: list[NodeMatch] = field(default_factory=list)
    ambiguous_edges: list[Pair] = field(default_factory=list)
    skipped_edges: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "imported_models": self.imported_models,
            "node_matches": [m.to_dict() for m in self.node_matches],
            "ambiguous_edges": [list(p) for p in self.ambiguous_edges],
            "skipped_edges": self.skipped_edges,
        }


def levenshtein(a: str, b: str) -> int:
    """Plain dynamic-programming edit distance."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def _normalize(name: str) -> str:
    cleaned = [c if c.isalnum() or c.isspace() else " " for c in name.lower().replace("_", " ")]
    return " ".join("".join(cleaned).split())


def string_similarity(a: str, b: str) -> float:
    """1 - normalized edit distance over cleaned lowercase display names."""
    na, nb = _normalize(a), _normalize(b)
    if not na and not nb:
        return 1.0
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


def _display_name(workspace: CAGWorkspace, model: CAGModel, concept_id: str) -> str:
    override = model.nodes.get(concept_id)
    if override:
        return override
    concept = workspace.store.concept(concept_id)
    if concept is not None:
        return concept.display_name
    return display_name_for(concept_id)


def find_near_duplicates(
    workspace: CAGWorkspace,
    model_id: str,
    threshold: float = 0.9,
    embeddings: EmbeddingTable | None = None,
) -> list[NodeMatch]:
    """Scored candidate node fusions: max of name and embedding similarity.

    Each unordered pair appears once, sorted by score descending.
    """
    model = workspace.get(model_id)
    nodes = sorted(model.nodes)
    matches: list[NodeMatch] = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            score = string_similarity(
                _display_name(workspace, model, a), _display_name(workspace, model, b)
            )
            if embeddings is not None:
                score = max(score, max(0.0, embeddings.cosine(a, b)))
            if score >= threshold:
                matches.append(NodeMatch(a, b, round(score, 6), "merge"))
    matches.sort(key=lambda m: (-m.score, m.a, m.b))
    return matches


def import_models(
    workspace: CAGWorkspace,
    target_id: str,
    source_ids: list[str],
    threshold: float = 0.9,
    embeddings: EmbeddingTable | None = None,
    actor: str = "analyst",
    expected_version: int | None = None,
) -> MergeReport:
    """Union one or more models into the target under a single audit action.

    Override reconciliation: a lone override survives; two different ones
    cancel and the edge is flagged for curation. Under the enforced
    acyclicity policy, source edges apply in descending support order and
    cycle-closing edges are skipped (reported, never silently dropped).
    """
    target = workspace.get(target_id)
    if target_id in source_ids:
        raise SelfImport(f"model {target_id} cannot import itself")
    sources = [workspace.get(sid) for sid in source_ids]

    nodes: list[dict[str, Any]] = []
    seen_nodes: set[str] = set()
    edge_rows: list[tuple[int, Pair, int, dict[str, Any]]] = []
    for order, source in enumerate(sources):
        for concept, display in sorted(source.nodes.items()):
            if concept not in seen_nodes:
                seen_nodes.add(concept)
                row: dict[str, Any] = {"concept": concept}
                if display:
                    row["display"] = display
                nodes.append(row)
        for pair, edge in sorted(source.edges.items()):
            row = {"subj": pair[0], "obj": pair[1]}
            if edge.user_polarity_override is not None:
                row["override"] = edge.user_polarity_override.to_wire()
            edge_rows.append((-edge.support, pair, order, row))
    edge_rows.sort(key=lambda t: (t[0], t[1], t[2]))

    # simulate override reconciliation to spot conflicts before applying
    conflicts: set[Pair] = set()
    override_state: dict[Pair, Polarity | None] = {
        pair: e.user_polarity_override for pair, e in target.edges.items()
    }
    for _, pair, _, row in edge_rows:
        incoming = Polarity.from_wire(row["override"]) if "override" in row else None
        if pair not in override_state:
            override_state[pair] = incoming
            continue
        current = override_state[pair]
        if current is not None and incoming is not None and current is not incoming:
            conflicts.add(pair)
            override_state[pair] = None
        elif current is None:
            override_state[pair] = incoming

    action = CurationAction(
        kind=ActionKind.MERGE_IMPORT,
        payload={
            "sources": list(source_ids),
            "nodes": nodes,
            "edges": [row for _, _, _, row in edge_rows],
        },
        actor=actor,
    )
    mutation = workspace.apply_import(target_id, action, expected_version=expected_version)

    merged = workspace.get(target_id)
    ambiguous = {p for p in conflicts if p in merged.edges}
    ambiguous |= {
        pair
        for pair, edge in merged.edges.items()
        if edge.aggregate_polarity is AggregatePolarity.AMBIGUOUS
    }
    return MergeReport(
        imported_models=list(source_ids),
        node_matches=find_near_duplicates(workspace, target_id, threshold, embeddings),
        ambiguous_edges=sorted(ambiguous),
        skipped_edges=mutation.skipped_edges,
    )


def apply_node_merge(
    workspace: CAGWorkspace,
    model_id: str,
    survivor: str,
    absorbed: str,
    actor: str = "analyst",
    expected_version: int | None = None,
) -> MutationReport:
    """Fuse two nodes: absorbed's statements re-ground to the survivor and
    its edges re-point, with parallel edges collapsing and merge-created
    self-loops dropped (reported)."""
    model = workspace.get(model_id)
    if survivor == absorbed:
        raise ValueError("survivor and absorbed must differ")
    for concept in (survivor, absorbed):
        if concept not in model.nodes:
            raise UnknownNode(f"no node {concept} in model {model_id}")
    statement_ids: set[str] = set()
    for pair, edge in model.edges.items():
        if absorbed in pair:
            statement_ids.update(edge.statement_ids)
    action = CurationAction(
        kind=ActionKind.REMAP_CONCEPT,
        payload={
            "statement_ids": sorted(statement_ids),
            "from_concept": absorbed,
            "to_concept": survivor,
            "fuse": True,
        },
        actor=actor,
    )
    return workspace.curate(model_id, [action], actor=actor, expected_version=expected_version)
