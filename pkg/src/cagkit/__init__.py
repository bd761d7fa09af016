"""cagkit: assemble qualitative causal models from extracted statement corpora."""

from .aggregate import AggregatedEdge, PolarityCounts, aggregate_edge, aggregate_graph
from .cag import ActionKind, CAGModel, CAGWorkspace, CurationAction
from .config import EngineConfig, load_config
from .engine import Engine
from .model import (
    AggregatePolarity,
    CausalStatement,
    Concept,
    Evidence,
    GeoTemporalContext,
    Polarity,
    validate_statement,
)
from .search import FacetQuery, FacetResult, nested_graph_projection, run_query
from .store import StatementStore
from .suggest import indirect_paths, suggest_concepts, suggest_relationships

__version__ = "0.1.0"

__all__ = [
    "ActionKind",
    "AggregatePolarity",
    "AggregatedEdge",
    "CAGModel",
    "CAGWorkspace",
    "CausalStatement",
    "Concept",
    "CurationAction",
    "Engine",
    "EngineConfig",
    "Evidence",
    "FacetQuery",
    "FacetResult",
    "GeoTemporalContext",
    "Polarity",
    "PolarityCounts",
    "StatementStore",
    "aggregate_edge",
    "aggregate_graph",
    "indirect_paths",
    "load_config",
    "nested_graph_projection",
    "run_query",
    "suggest_concepts",
    "suggest_relationships",
    "validate_statement",
    "__version__",
]
