"""Facade wiring the store, workspace, suggestions, and layout together.

The HTTP service and the CLI both drive this class, so behavior is identical
whether reached over REST or headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable

from .aggregate import AggregatedEdge
from .cag import CAGModel, CAGWorkspace, MutationReport
from .config import EngineConfig
from .layout import (
    LayoutResult,
    NestedLayoutResult,
    Spacing,
    flow_layout,
    layout_to_svg,
    nested_layout,
    nested_layout_to_svg,
    size_for_label,
)
from .merge import MergeReport, NodeMatch, apply_node_merge, find_near_duplicates, import_models
from .model import Polarity
from .search import FacetQuery, FacetResult, NestedProjection, nested_graph_projection, run_query
from .store import IngestReport, StatementStore
from .suggest import (
    ConceptSuggestion,
    EmbeddingTable,
    PathSuggestion,
    build_embeddings_and_clusters,
    indirect_paths,
    load_embeddings,
    suggest_concepts,
    suggest_relationships,
)

__all__ = ["Engine"]


class Engine:
    def __init__(self, store_dir: str | Path, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.config.validate()
        self.store = StatementStore(store_dir)
        self.workspace = CAGWorkspace(self.store, belief_policy=self.config.belief_policy)  # type: ignore[arg-type]
        self._embeddings: EmbeddingTable | None = None
        self._embeddings_loaded = False

    # ---------------------------------------------------------------- corpus

    def health(self) -> dict[str, Any]:
        stats = self.store.stats()
        stats["models"] = len(self.workspace.list_models())
        return stats

    def ingest_file(self, path: str | Path, mode: str = "append") -> IngestReport:
        return self.store.ingest(path, mode=mode)

    def ingest_records(self, records: Iterable[dict[str, Any]], mode: str = "append") -> IngestReport:
        return self.store.add_statements(records, mode=mode)

    def load_ontology(self, path: str | Path) -> int:
        return self.store.load_ontology(path)

    # ---------------------------------------------------------------- search

    def search(self, query: FacetQuery | dict[str, Any], with_facets: bool = True) -> FacetResult:
        if isinstance(query, dict):
            query = FacetQuery.from_dict(query)
        return run_query(self.store, query, with_facets=with_facets)

    def nested_projection(
        self, result: FacetResult, edge_limit: int | None = None
    ) -> NestedProjection:
        return nested_graph_projection(
            self.store,
            result,
            edge_limit=edge_limit if edge_limit is not None else self.config.edge_limit,
            belief_policy=self.config.belief_policy,  # type: ignore[arg-type]
        )

    def nested_view(self, projection: NestedProjection) -> NestedLayoutResult:
        return nested_layout(
            projection, grid_step=self.config.grid_step, turn_penalty=self.config.turn_penalty
        )

    # ----------------------------------------------------------- suggestions

    @property
    def embeddings(self) -> EmbeddingTable | None:
        if not self._embeddings_loaded:
            self._embeddings = load_embeddings(self.store)
            self._embeddings_loaded = True
        return self._embeddings

    def build_embeddings(self, vectors_file: str | Path, min_cluster_size: int | None = None) -> EmbeddingTable:
        table = build_embeddings_and_clusters(
            self.store,
            vectors_file,
            min_cluster_size=min_cluster_size or self.config.min_cluster_size,
        )
        self._embeddings = table
        self._embeddings_loaded = True
        return table

    def concept_suggestions(self, query: str, k: int = 10) -> list[ConceptSuggestion]:
        return suggest_concepts(self.store, query, k=k)

    def relationship_suggestions(
        self, node: str, k: int = 5, exclude: Iterable[tuple[str, str]] = ()
    ) -> dict[str, list]:
        return suggest_relationships(
            self.store, node, k=k, exclude=exclude, belief_policy=self.config.belief_policy  # type: ignore[arg-type]
        )

    def paths(self, source: str, target: str, max_hops: int = 2, k: int = 5) -> list[PathSuggestion]:
        return indirect_paths(
            self.store, source, target, max_hops=max_hops, k=k, embeddings=self.embeddings
        )

    # ------------------------------------------------------------------ CAGs

    def spacing(self, node_count: int) -> Spacing:
        if node_count <= self.config.spacing_threshold:
            return Spacing(self.config.layer_gap, self.config.node_gap)
        factor = 1 - self.config.spacing_reduction
        return Spacing(int(self.config.layer_gap * factor), int(self.config.node_gap * factor))

    def display_name(self, model: CAGModel, concept_id: str) -> str:
        override = model.nodes.get(concept_id)
        if override:
            return override
        concept = self.store.concept(concept_id)
        if concept is not None:
            return concept.display_name
        return concept_id.rsplit("/", 1)[-1].replace("_", " ").title()

    def model_layout(self, model_id: str) -> LayoutResult:
        model = self.workspace.get(model_id)
        sizes = {
            concept: size_for_label(self.display_name(model, concept)) for concept in model.nodes
        }
        return flow_layout(
            sizes,
            list(model.edges),
            spacing=self.spacing(len(sizes)),
            grid_step=self.config.grid_step,
            turn_penalty=self.config.turn_penalty,
        )

    def model_payload(self, model_id: str, include_layout: bool = True) -> dict[str, Any]:
        """Full model document the UI renders from: structure, edges, layout."""
        model = self.workspace.get(model_id)
        payload: dict[str, Any] = {
            "id": model.id,
            "name": model.name,
            "created_at": model.created_at,
            "acyclicity": model.acyclicity,
            "version": model.version,
            "nodes": [
                {"concept": concept, "display": self.display_name(model, concept)}
                for concept in sorted(model.nodes)
            ],
            "edges": [edge_payload(edge) for _, edge in sorted(model.edges.items())],
        }
        if include_layout:
            payload["layout"] = self.model_layout(model_id).to_dict()
        return payload

    def model_svg(self, model_id: str) -> str:
        model = self.workspace.get(model_id)
        layout = self.model_layout(model_id)
        labels = {c: self.display_name(model, c) for c in model.nodes}
        styles = {
            pair: (edge.aggregate_polarity, edge.aggregate_belief)
            for pair, edge in model.edges.items()
        }
        return layout_to_svg(layout, labels, styles)

    def nested_svg(self, projection: NestedProjection) -> str:
        layout = self.nested_view(projection)
        styles = {}
        for edge in projection.edges or []:
            styles[(edge.subject, edge.object)] = (edge.aggregate_polarity, edge.aggregate_belief)
        return nested_layout_to_svg(layout, edge_styles=styles)

    # ------------------------------------------------------------- merge ops

    def near_duplicates(self, model_id: str, threshold: float | None = None) -> list[NodeMatch]:
        return find_near_duplicates(
            self.workspace,
            model_id,
            threshold=threshold if threshold is not None else self.config.near_duplicate_threshold,
            embeddings=self.embeddings,
        )

    def import_models(
        self,
        target_id: str,
        source_ids: list[str],
        threshold: float | None = None,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> MergeReport:
        return import_models(
            self.workspace,
            target_id,
            source_ids,
            threshold=threshold if threshold is not None else self.config.near_duplicate_threshold,
            embeddings=self.embeddings,
            actor=actor,
            expected_version=expected_version,
        )

    def merge_nodes(
        self,
        model_id: str,
        survivor: str,
        absorbed: str,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> MutationReport:
        return apply_node_merge(
            self.workspace, model_id, survivor, absorbed, actor=actor, expected_version=expected_version
        )


def edge_payload(edge: AggregatedEdge) -> dict[str, Any]:
    """Wire shape for one aggregated edge (API responses and exports)."""
    return {
        "subj": edge.subject,
        "obj": edge.object,
        "polarity": edge.aggregate_polarity.value,
        "belief": edge.aggregate_belief,
        "counts": {
            "same": edge.counts.same,
            "opposite": edge.counts.opposite,
            "unknown": edge.counts.unknown,
        },
        "evidence_count": edge.evidence_count,
        "statement_ids": list(edge.statement_ids),
        "override": (
            edge.user_polarity_override.to_wire()
            if edge.user_polarity_override is not None
            else None
        ),
    }
