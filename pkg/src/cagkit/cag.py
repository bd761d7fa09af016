"""Model management: nodes, edges, curation with audit, overrides, acyclicity.

A model's durable state is its structure (nodes, edge pairs, overrides) plus
the append-only audit log; edge aggregations are derived from the store and
recomputed after every audited mutation, so a model always reflects the
corpus as of its own last edit. The model version is ``1 + len(audit_log)``:
exactly one increment per applied action, which makes replay verification a
pure fold over the log.

Statement-level curation (discard, polarity fix, re-grounding) writes through
to the store overlay; those writes are absolute-valued and therefore
idempotent under replay.
"""

from __future__ import annotations

import copy
import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from .aggregate import AggregatedEdge, BeliefPolicy, aggregate_edge
from .errors import (
    SelfLoop,
    UnknownEdge,
    UnknownModel,
    UnknownNode,
    UnknownStatement,
    VersionConflict,
    WouldCreateCycle,
)
from .model import AggregatePolarity, Concept, Polarity
from .store import StatementStore

__all__ = [
    "ActionKind",
    "CurationAction",
    "CAGModel",
    "CAGWorkspace",
    "MutationReport",
    "find_cycle_path",
]

Pair = tuple[str, str]


class ActionKind(str, Enum):
    DISCARD_STATEMENT = "DiscardStatement"
    RESTORE_STATEMENT = "RestoreStatement"
    SET_STATEMENT_POLARITY = "SetStatementPolarity"
    REMAP_CONCEPT = "RemapConcept"
    SET_EDGE_OVERRIDE = "SetEdgeOverride"
    CLEAR_EDGE_OVERRIDE = "ClearEdgeOverride"
    ADD_NODE = "AddNode"
    REMOVE_NODE = "RemoveNode"
    ADD_EDGE = "AddEdge"
    REMOVE_EDGE = "RemoveEdge"
    MERGE_IMPORT = "MergeImport"


@dataclass(frozen=True)
class CurationAction:
    kind: ActionKind
    payload: dict[str, Any]
    actor: str = "analyst"
    timestamp: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "payload": self.payload,
            "actor": self.actor,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "CurationAction":
        return cls(
            kind=ActionKind(raw["kind"]),
            payload=dict(raw.get("payload", {})),
            actor=raw.get("actor", "analyst"),
            timestamp=raw.get("timestamp", ""),
        )


@dataclass
class CAGModel:
    id: str
    name: str
    created_at: str
    acyclicity: str = "enforced"  # "enforced" | "relaxed"
    nodes: dict[str, str | None] = field(default_factory=dict)
    edges: dict[Pair, AggregatedEdge] = field(default_factory=dict)
    audit_log: list[CurationAction] = field(default_factory=list)

    @property
    def version(self) -> int:
        return 1 + len(self.audit_log)

    @property
    def enforced(self) -> bool:
        return self.acyclicity == "enforced"

    def edge(self, subject: str, object: str) -> AggregatedEdge:
        try:
            return self.edges[(subject, object)]
        except KeyError:
            raise UnknownEdge(f"no edge {subject} -> {object} in model {self.id}") from None

    def to_export(self) -> dict[str, Any]:
        """The import/export document; also the persistence format."""
        nodes = []
        for concept, display in sorted(self.nodes.items()):
            row: dict[str, Any] = {"concept": concept}
            if display:
                row["display"] = display
            nodes.append(row)
        edges = []
        for (subj, obj), edge in sorted(self.edges.items()):
            row = {"subj": subj, "obj": obj, "statement_ids": list(edge.statement_ids)}
            if edge.user_polarity_override is not None:
                row["override"] = edge.user_polarity_override.to_wire()
            edges.append(row)
        return {
            "id": self.id,
            "name": self.name,
            "created_at": self.created_at,
            "acyclicity": self.acyclicity,
            "version": self.version,
            "nodes": nodes,
            "edges": edges,
            "audit": [a.to_dict() for a in self.audit_log],
        }

    def summary(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "created_at": self.created_at,
            "version": self.version,
            "nodes": len(self.nodes),
            "edges": len(self.edges),
        }


@dataclass
class MutationReport:
    """What a mutation changed, for the caller and the UI."""

    polarity_changes: list[dict[str, Any]] = field(default_factory=list)
    added_edges: list[Pair] = field(default_factory=list)
    skipped_edges: list[dict[str, Any]] = field(default_factory=list)
    dropped_self_loops: list[Pair] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "polarity_changes": self.polarity_changes,
            "added_edges": [list(p) for p in self.added_edges],
            "skipped_edges": self.skipped_edges,
            "dropped_self_loops": [list(p) for p in self.dropped_self_loops],
        }


def find_cycle_path(pairs: Iterable[Pair], subject: str, object: str) -> list[str] | None:
    """Cycle the edge subject->object would close, as a concept path, else None.

    Looks for a directed path object -> ... -> subject among existing pairs;
    the returned list is the full cycle starting and ending at subject.
    """
    if subject == object:
        return [subject, subject]
    adjacency: dict[str, list[str]] = {}
    for a, b in pairs:
        adjacency.setdefault(a, []).append(b)
    for neighbors in adjacency.values():
        neighbors.sort()
    # DFS from object looking for subject
    stack: list[tuple[str, list[str]]] = [(object, [object])]
    seen = {object}
    while stack:
        node, path = stack.pop()
        if node == subject:
            return [subject] + path
        for nxt in reversed(adjacency.get(node, ())):
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, path + [nxt]))
    return None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class CAGWorkspace:
    """Owns all models over one store: mutation, versioning, persistence."""

    def __init__(
        self,
        store: StatementStore,
        belief_policy: BeliefPolicy = "max",
        persist: bool = True,
    ):
        self.store = store
        self.belief_policy: BeliefPolicy = belief_policy
        self.persist = persist
        self._models: dict[str, CAGModel] = {}
        self._lock = threading.RLock()
        if persist:
            self._load_existing()

    # ------------------------------------------------------------- lifecycle

    def _load_existing(self) -> None:
        for path in sorted(self.store.model_dir().glob("*.json")):
            try:
                doc = json.loads(path.read_text("utf-8"))
                model = self._model_from_export(doc)
            except (json.JSONDecodeError, KeyError, ValueError):
                continue
            self._models[model.id] = model

    def _model_from_export(self, doc: dict[str, Any]) -> CAGModel:
        model = CAGModel(
            id=doc["id"],
            name=doc["name"],
            created_at=doc.get("created_at", _now()),
            acyclicity=doc.get("acyclicity", "enforced"),
        )
        for row in doc.get("nodes", []):
            model.nodes[row["concept"]] = row.get("display")
        for row in doc.get("edges", []):
            override = (
                Polarity.from_wire(row["override"]) if row.get("override") is not None else None
            )
            model.edges[(row["subj"], row["obj"])] = self._aggregate(
                row["subj"], row["obj"], override
            )
        model.audit_log = [CurationAction.from_dict(a) for a in doc.get("audit", [])]
        return model

    def _persist(self, model: CAGModel) -> None:
        if self.persist:
            path = self.store.model_dir() / f"{model.id}.json"
            path.write_text(json.dumps(model.to_export(), sort_keys=True), "utf-8")

    def create_model(
        self,
        name: str,
        acyclicity: str = "enforced",
        model_id: str | None = None,
        created_at: str | None = None,
    ) -> CAGModel:
        if acyclicity not in ("enforced", "relaxed"):
            raise ValueError(f"bad acyclicity policy: {acyclicity}")
        with self._lock:
            model_id = model_id or f"cag-{uuid.uuid4().hex[:10]}"
            if model_id in self._models:
                raise ValueError(f"model id already exists: {model_id}")
            model = CAGModel(
                id=model_id, name=name, created_at=created_at or _now(), acyclicity=acyclicity
            )
            self._models[model_id] = model
            self._persist(model)
            return model

    def get(self, model_id: str) -> CAGModel:
        with self._lock:
            return self._require(model_id)

    def list_models(self) -> list[CAGModel]:
        with self._lock:
            return sorted(self._models.values(), key=lambda m: m.id)

    def delete(self, model_id: str) -> None:
        with self._lock:
            self._require(model_id)
            del self._models[model_id]
            if self.persist:
                path = self.store.model_dir() / f"{model_id}.json"
                if path.exists():
                    path.unlink()

    def _require(self, model_id: str) -> CAGModel:
        model = self._models.get(model_id)
        if model is None:
            raise UnknownModel(f"no such model: {model_id}")
        return model

    # ------------------------------------------------------------- mutation

    def _mutate(
        self,
        model_id: str,
        expected_version: int | None,
        fn: Callable[[CAGModel], Any],
    ) -> Any:
        """Run a mutation against a working copy; swap in only on success.

        A failed mutation leaves the stored model untouched. The working
        copy's edges are re-aggregated from the store whenever the mutation
        actually appended audit entries.
        """
        with self._lock:
            current = self._require(model_id)
            if expected_version is not None and current.version != expected_version:
                raise VersionConflict(expected_version, current.version)
            working = copy.deepcopy(current)
            result = fn(working)
            if working.version != current.version:
                self._refresh_all_edges(working)
            self._models[model_id] = working
            self._persist(working)
            return result

    def _aggregate(
        self, subject: str, object: str, override: Polarity | None
    ) -> AggregatedEdge:
        return aggregate_edge(
            subject,
            object,
            self.store.statements_for_pair(subject, object),
            override=override,
            belief_policy=self.belief_policy,
        )

    def _refresh_all_edges(self, model: CAGModel) -> None:
        for pair, edge in model.edges.items():
            model.edges[pair] = self._aggregate(*pair, edge.user_polarity_override)

    def _record(self, model: CAGModel, kind: ActionKind, payload: dict[str, Any], actor: str) -> None:
        model.audit_log.append(
            CurationAction(kind=kind, payload=payload, actor=actor, timestamp=_now())
        )

    # ------------------------------------------------------------ operations

    def add_node(
        self,
        model_id: str,
        concept: str,
        display: str | None = None,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> CAGModel:
        def fn(model: CAGModel) -> CAGModel:
            if concept not in model.nodes:
                action = CurationAction(
                    ActionKind.ADD_NODE,
                    {"concept": concept, **({"display": display} if display else {})},
                    actor,
                    _now(),
                )
                self._apply(model, action)
                model.audit_log.append(action)
            return model

        if not Concept.valid_id(concept):
            raise ValueError(f"bad concept id: {concept}")
        return self._mutate(model_id, expected_version, fn)

    def add_edge(
        self,
        model_id: str,
        subject: str,
        object: str,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> AggregatedEdge:
        if subject == object:
            raise SelfLoop(f"self-loop edge rejected: {subject}")

        def fn(model: CAGModel) -> AggregatedEdge:
            if (subject, object) not in model.edges:
                action = CurationAction(
                    ActionKind.ADD_EDGE, {"subject": subject, "object": object}, actor, _now()
                )
                self._apply(model, action)
                model.audit_log.append(action)
            return model.edges[(subject, object)]

        return self._mutate(model_id, expected_version, fn)

    def remove_node(
        self, model_id: str, concept: str, actor: str = "analyst", expected_version: int | None = None
    ) -> CAGModel:
        def fn(model: CAGModel) -> CAGModel:
            if concept not in model.nodes:
                raise UnknownNode(f"no node {concept} in model {model.id}")
            action = CurationAction(ActionKind.REMOVE_NODE, {"concept": concept}, actor, _now())
            self._apply(model, action)
            model.audit_log.append(action)
            return model

        return self._mutate(model_id, expected_version, fn)

    def remove_edge(
        self,
        model_id: str,
        subject: str,
        object: str,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> CAGModel:
        def fn(model: CAGModel) -> CAGModel:
            model.edge(subject, object)
            action = CurationAction(
                ActionKind.REMOVE_EDGE, {"subject": subject, "object": object}, actor, _now()
            )
            self._apply(model, action)
            model.audit_log.append(action)
            return model

        return self._mutate(model_id, expected_version, fn)

    def set_edge_override(
        self,
        model_id: str,
        subject: str,
        object: str,
        override: Polarity | None,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> AggregatedEdge:
        if override is Polarity.UNKNOWN:
            raise ValueError("override must be same, opposite, or None")

        def fn(model: CAGModel) -> AggregatedEdge:
            model.edge(subject, object)
            if override is None:
                action = CurationAction(
                    ActionKind.CLEAR_EDGE_OVERRIDE,
                    {"subject": subject, "object": object},
                    actor,
                    _now(),
                )
            else:
                action = CurationAction(
                    ActionKind.SET_EDGE_OVERRIDE,
                    {"subject": subject, "object": object, "override": override.to_wire()},
                    actor,
                    _now(),
                )
            self._apply(model, action)
            model.audit_log.append(action)
            return model.edges[(subject, object)]

        return self._mutate(model_id, expected_version, fn)

    def curate(
        self,
        model_id: str,
        actions: Sequence[CurationAction | dict[str, Any]],
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> MutationReport:
        """Apply a batch of curation actions atomically.

        The whole batch is validated against a structural simulation first;
        any invalid action rejects the batch with the model untouched. The
        report lists every edge whose aggregate polarity changed.
        """
        prepared: list[CurationAction] = []
        for item in actions:
            if isinstance(item, CurationAction):
                action = item
            else:
                action = CurationAction.from_dict(item)
            if not action.timestamp:
                action = CurationAction(action.kind, action.payload, action.actor or actor, _now())
            prepared.append(action)

        def fn(model: CAGModel) -> MutationReport:
            before = {pair: e.aggregate_polarity for pair, e in model.edges.items()}
            self._validate_batch(model, prepared)
            report = MutationReport()
            for action in prepared:
                self._apply(model, action, report)
                model.audit_log.append(action)
            self._refresh_all_edges(model)
            report.polarity_changes = self._polarity_diff(before, model)
            return report

        return self._mutate(model_id, expected_version, fn)

    def materialize(
        self,
        model_id: str,
        statement_ids: Iterable[str],
        selected_pairs: Iterable[Pair] | None = None,
        actor: str = "analyst",
        expected_version: int | None = None,
    ) -> MutationReport:
        """Merge search-result relationships into the model.

        Adds one edge per distinct effective pair among the given statements
        (optionally restricted to ``selected_pairs``); existing edges pick up
        new statements through re-aggregation. Cycle-closing edges are
        skipped and reported, never silently dropped.
        """
        wanted = {tuple(p) for p in selected_pairs} if selected_pairs is not None else None

        def fn(model: CAGModel) -> MutationReport:
            before = {pair: e.aggregate_polarity for pair, e in model.edges.items()}
            pairs: set[Pair] = set()
            for sid in statement_ids:
                s = self.store.statement(sid, include_discarded=False)
                if s is None:
                    continue
                pair = (s.subject, s.object)
                if wanted is None or pair in wanted:
                    pairs.add(pair)
            report = MutationReport()
            for pair in sorted(pairs):
                if pair in model.edges:
                    continue
                cycle = (
                    find_cycle_path(model.edges, pair[0], pair[1]) if model.enforced else None
                )
                if cycle:
                    report.skipped_edges.append(
                        {"subj": pair[0], "obj": pair[1], "cycle": cycle}
                    )
                    continue
                action = CurationAction(
                    ActionKind.ADD_EDGE, {"subject": pair[0], "object": pair[1]}, actor, _now()
                )
                self._apply(model, action)
                model.audit_log.append(action)
                report.added_edges.append(pair)
            self._refresh_all_edges(model)
            report.polarity_changes = self._polarity_diff(before, model)
            return report

        return self._mutate(model_id, expected_version, fn)

    def apply_import(
        self,
        model_id: str,
        action: CurationAction,
        expected_version: int | None = None,
    ) -> MutationReport:
        """Apply a prepared MergeImport action (built by the merge module)."""

        def fn(model: CAGModel) -> MutationReport:
            report = MutationReport()
            self._apply(model, action, report)
            model.audit_log.append(action)
            self._refresh_all_edges(model)
            return report

        return self._mutate(model_id, expected_version, fn)

    # -------------------------------------------------------------- exports

    def export(self, model_id: str) -> dict[str, Any]:
        with self._lock:
            return self._require(model_id).to_export()

    def import_export(self, doc: dict[str, Any]) -> CAGModel:
        """Load an exported model document as a new model.

        If the document's id is already taken, the import gets a fresh id.
        Edges are re-aggregated against the current corpus.
        """
        with self._lock:
            model = self._model_from_export(doc)
            if model.id in self._models:
                model.id = f"cag-{uuid.uuid4().hex[:10]}"
            self._models[model.id] = model
            self._persist(model)
            return model

    def replay(self, model_id: str) -> CAGModel:
        """Rebuild the model by folding its audit log over an empty model."""
        with self._lock:
            source = self._require(model_id)
            fresh = CAGModel(
                id=source.id,
                name=source.name,
                created_at=source.created_at,
                acyclicity=source.acyclicity,
            )
            for action in source.audit_log:
                self._apply(fresh, action)
                fresh.audit_log.append(action)
                self._refresh_all_edges(fresh)
            return fresh

    # ------------------------------------------------------ action semantics

    def _polarity_diff(
        self, before: dict[Pair, AggregatePolarity], model: CAGModel
    ) -> list[dict[str, Any]]:
        changes = []
        for pair, edge in sorted(model.edges.items()):
            old = before.get(pair)
            if old is not None and old is not edge.aggregate_polarity:
                changes.append(
                    {
                        "subj": pair[0],
                        "obj": pair[1],
                        "before": old.value,
                        "after": edge.aggregate_polarity.value,
                    }
                )
        return changes

    def _validate_batch(self, model: CAGModel, actions: Sequence[CurationAction]) -> None:
        """Structural dry-run: existence and cycle checks without store writes."""
        nodes = set(model.nodes)
        pairs = set(model.edges)
        for action in actions:
            kind, p = action.kind, action.payload
            if kind in (
                ActionKind.DISCARD_STATEMENT,
                ActionKind.RESTORE_STATEMENT,
                ActionKind.SET_STATEMENT_POLARITY,
                ActionKind.REMAP_CONCEPT,
            ):
                missing = [
                    sid for sid in p.get("statement_ids", []) if self.store.statement(sid) is None
                ]
                if missing:
                    raise UnknownStatement(f"unknown statement ids: {', '.join(sorted(missing))}")
            if kind is ActionKind.REMAP_CONCEPT:
                pairs, nodes = self._sim_remap(pairs, nodes, p, model.enforced)
            elif kind in (ActionKind.SET_EDGE_OVERRIDE, ActionKind.CLEAR_EDGE_OVERRIDE):
                pair = (p["subject"], p["object"])
                if pair not in pairs:
                    raise UnknownEdge(f"no edge {pair[0]} -> {pair[1]} in model {model.id}")
            elif kind is ActionKind.ADD_NODE:
                nodes.add(p["concept"])
            elif kind is ActionKind.REMOVE_NODE:
                if p["concept"] not in nodes:
                    raise UnknownNode(f"no node {p['concept']} in model {model.id}")
                nodes.discard(p["concept"])
                pairs = {pr for pr in pairs if p["concept"] not in pr}
            elif kind is ActionKind.ADD_EDGE:
                pair = (p["subject"], p["object"])
                if pair[0] == pair[1]:
                    raise SelfLoop(f"self-loop edge rejected: {pair[0]}")
                if pair not in pairs:
                    if model.enforced:
                        cycle = find_cycle_path(pairs, *pair)
                        if cycle:
                            raise WouldCreateCycle(cycle)
                    pairs.add(pair)
                    nodes.update(pair)
            elif kind is ActionKind.REMOVE_EDGE:
                pair = (p["subject"], p["object"])
                if pair not in pairs:
                    raise UnknownEdge(f"no edge {pair[0]} -> {pair[1]} in model {model.id}")
                pairs.discard(pair)

    def _sim_remap(
        self, pairs: set[Pair], nodes: set[str], payload: dict[str, Any], enforced: bool
    ) -> tuple[set[Pair], set[str]]:
        """Structural image of a remap (and optional node fusion) for validation."""
        from_concept = payload["from_concept"]
        to_concept = payload["to_concept"]
        fuse = payload.get("fuse", False)
        affected = [pr for pr in pairs if from_concept in pr]
        new_pairs = set(pairs)
        for pr in affected:
            image = (
                to_concept if pr[0] == from_concept else pr[0],
                to_concept if pr[1] == from_concept else pr[1],
            )
            if fuse:
                new_pairs.discard(pr)
            if image[0] == image[1]:
                continue
            new_pairs.add(image)
        new_nodes = set(nodes)
        if affected or fuse:
            new_nodes.add(to_concept)
        if fuse:
            if from_concept not in nodes:
                raise UnknownNode(f"no node {from_concept}")
            new_nodes.discard(from_concept)
            if enforced:
                order = sorted(new_pairs)
                acyclic: set[Pair] = set()
                for pr in order:
                    cycle = find_cycle_path(acyclic, *pr)
                    if cycle:
                        raise WouldCreateCycle(cycle)
                    acyclic.add(pr)
        return new_pairs, new_nodes

    def _apply(
        self, model: CAGModel, action: CurationAction, report: MutationReport | None = None
    ) -> None:
        """Apply one action's structural and store effects to the model.

        Used identically for live mutation and replay: all payload values are
        absolute, and store writes are idempotent, so folding the audit log
        over an empty model reconverges on the same state.
        """
        kind, p = action.kind, action.payload
        if kind is ActionKind.ADD_NODE:
            model.nodes.setdefault(p["concept"], p.get("display"))
        elif kind is ActionKind.REMOVE_NODE:
            concept = p["concept"]
            if concept not in model.nodes:
                raise UnknownNode(f"no node {concept} in model {model.id}")
            del model.nodes[concept]
            for pair in [pr for pr in model.edges if concept in pr]:
                del model.edges[pair]
        elif kind is ActionKind.ADD_EDGE:
            subject, object_ = p["subject"], p["object"]
            if subject == object_:
                raise SelfLoop(f"self-loop edge rejected: {subject}")
            if (subject, object_) not in model.edges:
                if model.enforced:
                    cycle = find_cycle_path(model.edges, subject, object_)
                    if cycle:
                        raise WouldCreateCycle(cycle)
                model.nodes.setdefault(subject, None)
                model.nodes.setdefault(object_, None)
                model.edges[(subject, object_)] = self._aggregate(subject, object_, None)
        elif kind is ActionKind.REMOVE_EDGE:
            pair = (p["subject"], p["object"])
            if pair not in model.edges:
                raise UnknownEdge(f"no edge {pair[0]} -> {pair[1]} in model {model.id}")
            del model.edges[pair]
        elif kind is ActionKind.SET_EDGE_OVERRIDE:
            pair = (p["subject"], p["object"])
            edge = model.edge(*pair)
            model.edges[pair] = edge.with_override(Polarity.from_wire(p["override"]))
        elif kind is ActionKind.CLEAR_EDGE_OVERRIDE:
            pair = (p["subject"], p["object"])
            edge = model.edge(*pair)
            model.edges[pair] = edge.with_override(None)
        elif kind is ActionKind.DISCARD_STATEMENT:
            self.store.set_discarded(p["statement_ids"], True)
        elif kind is ActionKind.RESTORE_STATEMENT:
            self.store.set_discarded(p["statement_ids"], False)
        elif kind is ActionKind.SET_STATEMENT_POLARITY:
            self.store.set_statement_polarity(
                p["statement_ids"], Polarity.from_wire(p["polarity"])
            )
        elif kind is ActionKind.REMAP_CONCEPT:
            self._apply_remap(model, p, report)
        elif kind is ActionKind.MERGE_IMPORT:
            self._apply_merge_import(model, p, report)
        else:  # pragma: no cover - exhaustive enum
            raise ValueError(f"unhandled action kind: {kind}")

    def _apply_remap(
        self, model: CAGModel, payload: dict[str, Any], report: MutationReport | None
    ) -> None:
        """Re-ground statements and re-partition the model's edges.

        With ``fuse`` set this is a node merge: edges of the absorbed concept
        are re-pointed at the survivor, parallels collapse, and merge-created
        self-loops are dropped (and reported).
        """
        from_concept = payload["from_concept"]
        to_concept = payload["to_concept"]
        fuse = payload.get("fuse", False)
        if fuse and from_concept not in model.nodes:
            raise UnknownNode(f"no node {from_concept} in model {model.id}")
        self.store.remap_concept(payload["statement_ids"], from_concept, to_concept)

        affected = [pair for pair in model.edges if from_concept in pair]
        for pair in affected:
            image = (
                to_concept if pair[0] == from_concept else pair[0],
                to_concept if pair[1] == from_concept else pair[1],
            )
            if image[0] == image[1]:
                # a merge folding an absorbed<->survivor edge onto itself
                if fuse:
                    model.edges.pop(pair)
                    if report is not None:
                        report.dropped_self_loops.append(pair)
                continue
            if image not in model.edges:
                if model.enforced and not fuse:
                    cycle = find_cycle_path(model.edges, *image)
                    if cycle:
                        if report is not None:
                            report.skipped_edges.append(
                                {"subj": image[0], "obj": image[1], "cycle": cycle}
                            )
                        continue
                model.nodes.setdefault(image[0], None)
                model.nodes.setdefault(image[1], None)
                model.edges[image] = self._aggregate(
                    *image, model.edges[pair].user_polarity_override if fuse else None
                )
            elif fuse:
                # parallel edge collapse: reconcile overrides like an import
                override = _merge_overrides(
                    model.edges[image].user_polarity_override,
                    model.edges[pair].user_polarity_override,
                )
                model.edges[image] = model.edges[image].with_override(override)
            if fuse:
                model.edges.pop(pair, None)
        if fuse:
            model.nodes.setdefault(to_concept, None)
            del model.nodes[from_concept]
            if model.enforced:
                cycle = _first_cycle(model.edges)
                if cycle:
                    raise WouldCreateCycle(cycle)

    def _apply_merge_import(
        self, model: CAGModel, payload: dict[str, Any], report: MutationReport | None
    ) -> None:
        """Union a snapshot of source models into this one.

        Edges arrive in the payload's order (descending support at import
        time); under the enforced policy, cycle-closing edges are skipped
        and reported.
        """
        for row in payload.get("nodes", []):
            model.nodes.setdefault(row["concept"], row.get("display"))
        for row in payload.get("edges", []):
            pair = (row["subj"], row["obj"])
            incoming_override = (
                Polarity.from_wire(row["override"]) if row.get("override") is not None else None
            )
            if pair in model.edges:
                existing = model.edges[pair]
                merged = _merge_overrides(existing.user_polarity_override, incoming_override)
                model.edges[pair] = existing.with_override(merged)
                continue
            if model.enforced:
                cycle = find_cycle_path(model.edges, *pair)
                if cycle:
                    if report is not None:
                        report.skipped_edges.append(
                            {"subj": pair[0], "obj": pair[1], "cycle": cycle}
                        )
                    continue
            model.nodes.setdefault(pair[0], None)
            model.nodes.setdefault(pair[1], None)
            model.edges[pair] = self._aggregate(*pair, incoming_override)


def _merge_overrides(a: Polarity | None, b: Polarity | None) -> Polarity | None:
    """Exactly one side set: it survives. Both set and different: dropped."""
    if a is None:
        return b
    if b is None or a is b:
        return a
    return None


def _first_cycle(pairs: Iterable[Pair]) -> list[str] | None:
    """Any directed cycle among the pairs, as a concept path, else None."""
    pair_list = sorted(pairs)
    for subject, object_ in pair_list:
        others = [p for p in pair_list if p != (subject, object_)]
        cycle = find_cycle_path(others, subject, object_)
        if cycle:
            return cycle
    return None
