"""Machine-initiative features: concept lookup, ranked relationship
suggestions, and indirect-path discovery over the aggregated concept graph.

Path ranking folds in an embedding-cluster affinity term when an embedding
table has been built; without one the term is zero and everything still
works off graph structure alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .aggregate import BeliefPolicy, aggregate_edge
from .errors import (
    DimensionMismatch,
    EmptyEmbeddingFile,
    EmptyQuery,
    FileMissing,
    NoPathFound,
)
from .model import AggregatePolarity, Concept
from .store import StatementStore

__all__ = [
    "ConceptSuggestion",
    "RelationshipSuggestion",
    "PathSuggestion",
    "EmbeddingTable",
    "NOISE",
    "suggest_concepts",
    "suggest_relationships",
    "indirect_paths",
    "build_embeddings_and_clusters",
    "load_embeddings",
]

NOISE = -1

MAX_HOPS_CAP = 4


@dataclass(frozen=True)
class ConceptSuggestion:
    concept: Concept
    statement_count: int


@dataclass(frozen=True)
class RelationshipSuggestion:
    subject: str
    object: str
    support: int
    aggregate_polarity: AggregatePolarity
    direction: str  # "incoming" | "outgoing"


@dataclass(frozen=True)
class PathSuggestion:
    concepts: tuple[str, ...]
    hop_support: tuple[int, ...]
    affinity: float

    @property
    def hops(self) -> int:
        return len(self.concepts) - 1


def suggest_concepts(
    store: StatementStore, query: str, k: int = 10
) -> list[ConceptSuggestion]:
    """Concepts whose display name or leaf segment contains the query.

    Ranked by how much the corpus says about them (active statement count
    descending), ties broken by concept id.
    """
    needle = query.strip().lower()
    if not needle:
        raise EmptyQuery("concept query is empty")
    hits: list[ConceptSuggestion] = []
    for concept_id, concept in store.concepts().items():
        leaf = concept_id.rsplit("/", 1)[-1].lower()
        if needle in leaf or needle in concept.display_name.lower():
            hits.append(ConceptSuggestion(concept, store.concept_statement_count(concept_id)))
    hits.sort(key=lambda h: (-h.statement_count, h.concept.id))
    return hits[:k]


def suggest_relationships(
    store: StatementStore,
    node: str,
    k: int = 5,
    exclude: Iterable[tuple[str, str]] = (),
    belief_policy: BeliefPolicy = "max",
) -> dict[str, list[RelationshipSuggestion]]:
    """Top-k incoming and outgoing relationships around a node by support."""
    excluded = set(exclude)
    support = store.pair_support()

    def build(pairs: list[tuple[str, str]], direction: str, counterpart) -> list[RelationshipSuggestion]:
        pairs.sort(key=lambda p: (-support[p], counterpart(p)))
        out = []
        for pair in pairs[:k]:
            edge = aggregate_edge(
                pair[0], pair[1], store.statements_for_pair(*pair), belief_policy=belief_policy
            )
            out.append(
                RelationshipSuggestion(
                    subject=pair[0],
                    object=pair[1],
                    support=support[pair],
                    aggregate_polarity=edge.aggregate_polarity,
                    direction=direction,
                )
            )
        return out

    incoming = [p for p in support if p[1] == node and p not in excluded]
    outgoing = [p for p in support if p[0] == node and p not in excluded]
    return {
        "incoming": build(incoming, "incoming", lambda p: p[0]),
        "outgoing": build(outgoing, "outgoing", lambda p: p[1]),
    }


def indirect_paths(
    store: StatementStore,
    source: str,
    target: str,
    max_hops: int = 2,
    k: int = 5,
    embeddings: "EmbeddingTable | None" = None,
) -> list[PathSuggestion]:
    """Directed simple paths source -> ... -> target of at most ``max_hops`` edges.

    Every hop is backed by at least one active statement. Ranking: fewer
    hops first, then stronger weakest hop, then higher embedding affinity,
    then lexicographic path order. Raises :class:`NoPathFound` when the
    bounded search finds nothing (the knowledge-gap signal).
    """
    if max_hops < 2:
        raise ValueError("max_hops must be >= 2")
    if source == target:
        raise ValueError("source and target must differ")
    max_hops = min(max_hops, MAX_HOPS_CAP)

    support = store.pair_support()
    adjacency: dict[str, list[str]] = {}
    for subj, obj in support:
        adjacency.setdefault(subj, []).append(obj)
    for neighbors in adjacency.values():
        neighbors.sort()

    found: list[tuple[tuple[str, ...], tuple[int, ...]]] = []

    def walk(path: list[str], supports: list[int]) -> None:
        head = path[-1]
        if len(path) - 1 > max_hops:
            return
        if head == target:
            found.append((tuple(path), tuple(supports)))
            return
        if len(path) - 1 == max_hops:
            return
        for nxt in adjacency.get(head, ()):
            if nxt in path:
                continue
            walk(path + [nxt], supports + [support[(head, nxt)]])

    walk([source], [])
    if not found:
        raise NoPathFound(f"no path from {source} to {target} within {max_hops} hops")

    suggestions = [
        PathSuggestion(
            concepts=concepts,
            hop_support=supports,
            affinity=path_affinity(concepts, embeddings),
        )
        for concepts, supports in found
    ]
    suggestions.sort(
        key=lambda p: (p.hops, -min(p.hop_support), -p.affinity, p.concepts)
    )
    return suggestions[:k]


def path_affinity(concepts: Sequence[str], embeddings: "EmbeddingTable | None") -> float:
    """Mean cosine similarity of consecutive concept embeddings; 0 without vectors."""
    if embeddings is None or len(concepts) < 2:
        return 0.0
    sims = [
        embeddings.cosine(a, b) for a, b in zip(concepts, concepts[1:])
    ]
    return sum(sims) / len(sims)


# ------------------------------------------------------------ embeddings


@dataclass
class EmbeddingTable:
    """Per-concept vector and cluster assignment, persisted alongside the store."""

    dim: int
    vectors: dict[str, tuple[float, ...]]
    clusters: dict[str, int]

    def cluster_of(self, concept_id: str) -> int:
        return self.clusters.get(concept_id, NOISE)

    def cosine(self, a: str, b: str) -> float:
        va, vb = self.vectors.get(a), self.vectors.get(b)
        if va is None or vb is None:
            return 0.0
        na = math.sqrt(sum(x * x for x in va))
        nb = math.sqrt(sum(x * x for x in vb))
        if na == 0.0 or nb == 0.0:
            return 0.0
        return sum(x * y for x, y in zip(va, vb)) / (na * nb)

    def save(self, path: Path) -> None:
        doc = {
            "dim": self.dim,
            "concepts": {
                cid: {"vector": list(self.vectors[cid]), "cluster": self.clusters[cid]}
                for cid in sorted(self.vectors)
            },
        }
        path.write_text(json.dumps(doc), "utf-8")

    @classmethod
    def load(cls, path: Path) -> "EmbeddingTable":
        doc = json.loads(path.read_text("utf-8"))
        vectors = {cid: tuple(row["vector"]) for cid, row in doc["concepts"].items()}
        clusters = {cid: row["cluster"] for cid, row in doc["concepts"].items()}
        return cls(dim=doc["dim"], vectors=vectors, clusters=clusters)


def load_embeddings(store: StatementStore) -> EmbeddingTable | None:
    path = store.embeddings_path()
    if not path.exists():
        return None
    return EmbeddingTable.load(path)


def _read_token_vectors(path: Path) -> tuple[dict[str, np.ndarray], int]:
    """Parse a text embedding file: one ``token v1 v2 ... vD`` line per token."""
    if not path.exists():
        raise FileMissing(f"embedding file not found: {path}")
    vectors: dict[str, np.ndarray] = {}
    dim = 0
    for line in path.read_text("utf-8").splitlines():
        parts = line.split()
        if len(parts) < 2:
            continue
        token = parts[0].lower()
        try:
            values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            continue
        if not np.all(np.isfinite(values)):
            continue
        if dim == 0:
            dim = values.size
        elif values.size != dim:
            raise DimensionMismatch(
                f"token {token!r} has dimension {values.size}, expected {dim}"
            )
        vectors[token] = values
    if not vectors:
        raise EmptyEmbeddingFile(f"no usable vectors in {path}")
    return vectors, dim


def build_embeddings_and_clusters(
    store: StatementStore,
    embedding_file: str | Path,
    min_cluster_size: int = 3,
    persist: bool = True,
) -> EmbeddingTable:
    """Assign every known concept a vector and a density-based cluster.

    A concept's vector is the mean of the token vectors of its leaf path
    segment; concepts whose tokens are all missing inherit the mean of
    their ontology siblings, and failing that a zero vector flagged NOISE.
    Clustering is HDBSCAN over cosine distance with the given minimum
    cluster size.
    """
    token_vectors, dim = _read_token_vectors(Path(embedding_file))
    concepts = store.concepts()

    vectors: dict[str, np.ndarray] = {}
    missing: list[str] = []
    for concept_id in sorted(concepts):
        tokens = concept_id.rsplit("/", 1)[-1].lower().split("_")
        rows = [token_vectors[t] for t in tokens if t in token_vectors]
        if rows:
            vectors[concept_id] = np.mean(rows, axis=0)
        else:
            missing.append(concept_id)

    forced_noise: set[str] = set()
    for concept_id in missing:
        parent = concept_id.rsplit("/", 1)[0] if "/" in concept_id else ""
        siblings = [
            vectors[other]
            for other in vectors
            if (other.rsplit("/", 1)[0] if "/" in other else "") == parent
        ]
        if siblings:
            vectors[concept_id] = np.mean(siblings, axis=0)
        else:
            vectors[concept_id] = np.zeros(dim)
            forced_noise.add(concept_id)

    clusters = _cluster_cosine(vectors, forced_noise, min_cluster_size)
    table = EmbeddingTable(
        dim=dim,
        vectors={cid: tuple(float(x) for x in vec) for cid, vec in vectors.items()},
        clusters=clusters,
    )
    if persist:
        table.save(store.embeddings_path())
    return table


def _cluster_cosine(
    vectors: dict[str, np.ndarray], forced_noise: set[str], min_cluster_size: int
) -> dict[str, int]:
    candidates = [cid for cid in sorted(vectors) if cid not in forced_noise]
    labels: dict[str, int] = {cid: NOISE for cid in vectors}
    if len(candidates) < max(2, min_cluster_size):
        return labels
    matrix = np.vstack([vectors[cid] for cid in candidates])
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    unit = matrix / norms
    distance = np.clip(1.0 - unit @ unit.T, 0.0, 2.0)
    np.fill_diagonal(distance, 0.0)

    from sklearn.cluster import HDBSCAN  # deferred: import cost matters for the CLI

    model = HDBSCAN(
        min_cluster_size=min_cluster_size,
        metric="precomputed",
        allow_single_cluster=True,
    )
    assigned = model.fit_predict(distance)
    for cid, label in zip(candidates, assigned):
        labels[cid] = int(label)
    return labels
