"""Corpus persistence and indexing.

Layout of a store directory:

    statements.log    append-only JSONL of ingested records (id-keyed, last wins)
    curation.journal  append-only JSONL overlay: discards, polarity fixes, re-groundings
    ontology.txt      one concept path per line, optional tab-separated display name
    meta.json         ingest bookkeeping
    embeddings.json   concept embedding/cluster table (written by the suggest module)

The log and journal are the source of truth; all indexes live in memory and
are rebuilt on open. Writes are serialized by an in-process lock plus a
cross-process file lock shared with the CLI, and every write lands in the
on-disk log before it becomes visible to readers.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator

from filelock import FileLock

from .errors import FileMissing, UnknownStatement, ValidationFailed
from .model import (
    CausalStatement,
    Concept,
    Polarity,
    statement_to_record,
    validate_statement,
)

__all__ = ["StatementStore", "IngestReport", "CorpusIndex"]


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    errors: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {"accepted": self.accepted, "rejected": self.rejected, "errors": self.errors}


@dataclass
class CorpusIndex:
    """Inverted indexes over effective (overlay-applied) statements.

    Discarded statements stay indexed; readers filter them out so that
    curation stays reversible.
    """

    by_subject: dict[str, set[str]] = field(default_factory=dict)
    by_object: dict[str, set[str]] = field(default_factory=dict)
    by_pair: dict[tuple[str, str], set[str]] = field(default_factory=dict)
    by_doc: dict[str, set[str]] = field(default_factory=dict)
    by_source: dict[str, set[str]] = field(default_factory=dict)
    by_region: dict[str, set[str]] = field(default_factory=dict)  # flattened prefix trie
    by_year: dict[int, set[str]] = field(default_factory=dict)

    def add(self, s: CausalStatement) -> None:
        self.by_subject.setdefault(s.subject, set()).add(s.id)
        self.by_object.setdefault(s.object, set()).add(s.id)
        self.by_pair.setdefault((s.subject, s.object), set()).add(s.id)
        for ev in s.evidence:
            self.by_doc.setdefault(ev.doc_id, set()).add(s.id)
            if ev.source:
                self.by_source.setdefault(ev.source, set()).add(s.id)
            if ev.publication_date is not None:
                self.by_year.setdefault(ev.publication_date.year, set()).add(s.id)
        if s.context.region_path:
            for prefix in region_prefixes(s.context.region_path):
                self.by_region.setdefault(prefix, set()).add(s.id)

    def remove(self, s: CausalStatement) -> None:
        def drop(index: dict, key: Any) -> None:
            ids = index.get(key)
            if ids is not None:
                ids.discard(s.id)
                if not ids:
                    del index[key]

        drop(self.by_subject, s.subject)
        drop(self.by_object, s.object)
        drop(self.by_pair, (s.subject, s.object))
        for ev in s.evidence:
            drop(self.by_doc, ev.doc_id)
            if ev.source:
                drop(self.by_source, ev.source)
            if ev.publication_date is not None:
                drop(self.by_year, ev.publication_date.year)
        if s.context.region_path:
            for prefix in region_prefixes(s.context.region_path):
                drop(self.by_region, prefix)


def region_prefixes(region_path: str) -> list[str]:
    """All segment-aligned prefixes: 'a/b/c' -> ['a', 'a/b', 'a/b/c']."""
    segments = region_path.split("/")
    return ["/".join(segments[: i + 1]) for i in range(len(segments))]


# Overlay journal entries set absolute values, so replaying is idempotent.
_OVERLAY_FIELDS = ("discarded", "polarity", "subject", "object")


class StatementStore:
    """Single-directory corpus store with rebuildable in-memory indexes."""

    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        if not self.root.exists():
            if not create:
                raise FileMissing(f"store directory not found: {self.root}")
            self.root.mkdir(parents=True)
        self._log_path = self.root / "statements.log"
        self._journal_path = self.root / "curation.journal"
        self._ontology_path = self.root / "ontology.txt"
        self._meta_path = self.root / "meta.json"
        self._lock = threading.RLock()
        self._file_lock = FileLock(str(self.root / ".store.lock"))
        self._raw: dict[str, CausalStatement] = {}
        self._overlay: dict[str, dict[str, Any]] = {}
        self._effective: dict[str, CausalStatement] = {}
        self._concepts: dict[str, Concept] = {}
        self._index = CorpusIndex()
        self._last_ingest: str | None = None
        self._reload()

    # ------------------------------------------------------------------ open

    def _reload(self) -> None:
        with self._lock:
            self._raw.clear()
            self._overlay.clear()
            self._effective.clear()
            self._concepts.clear()
            self._index = CorpusIndex()
            if self._ontology_path.exists():
                self._load_ontology_lines(self._ontology_path.read_text("utf-8").splitlines())
            if self._log_path.exists():
                for line in self._log_path.read_text("utf-8").splitlines():
                    if not line.strip():
                        continue
                    try:
                        statement = validate_statement(json.loads(line))
                    except (json.JSONDecodeError, ValidationFailed):
                        continue  # tolerated: a torn tail line must not block open
                    self._raw[statement.id] = statement
            if self._journal_path.exists():
                for line in self._journal_path.read_text("utf-8").splitlines():
                    if not line.strip():
                        continue
                    try:
                        entry = json.loads(line)
                    except json.JSONDecodeError:
                        continue
                    self._merge_overlay(entry)
            for sid in self._raw:
                self._materialize(sid)
            if self._meta_path.exists():
                meta = json.loads(self._meta_path.read_text("utf-8"))
                self._last_ingest = meta.get("last_ingest")

    def _merge_overlay(self, entry: dict[str, Any]) -> None:
        sid = entry.get("id")
        if not isinstance(sid, str):
            return
        slot = self._overlay.setdefault(sid, {})
        for key in _OVERLAY_FIELDS:
            if key in entry:
                slot[key] = entry[key]

    def _materialize(self, sid: str) -> None:
        """Recompute the effective statement for ``sid`` and reindex it."""
        old = self._effective.get(sid)
        if old is not None:
            self._index.remove(old)
        raw = self._raw.get(sid)
        if raw is None:
            self._effective.pop(sid, None)
            return
        overlay = self._overlay.get(sid, {})
        effective = raw
        if overlay:
            changes: dict[str, Any] = {}
            if "discarded" in overlay:
                changes["discarded"] = bool(overlay["discarded"])
            if "polarity" in overlay:
                changes["polarity"] = Polarity.from_wire(overlay["polarity"])
            if "subject" in overlay:
                changes["subject"] = overlay["subject"]
            if "object" in overlay:
                changes["object"] = overlay["object"]
            if changes:
                effective = replace(raw, **changes)
        self._effective[sid] = effective
        self._index.add(effective)
        self._register_concept(effective.subject)
        self._register_concept(effective.object)

    def _register_concept(self, concept_id: str) -> None:
        if concept_id not in self._concepts:
            self._concepts[concept_id] = Concept(concept_id)

    # --------------------------------------------------------------- ontology

    def _load_ontology_lines(self, lines: Iterable[str]) -> int:
        count = 0
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            concept_id, _, name = line.partition("\t")
            concept_id = concept_id.strip()
            if not Concept.valid_id(concept_id):
                continue
            self._concepts[concept_id] = Concept(concept_id, name.strip())
            count += 1
        return count

    def load_ontology(self, path: str | Path) -> int:
        """Merge an ontology file into the store; returns concepts loaded."""
        path = Path(path)
        if not path.exists():
            raise FileMissing(f"ontology file not found: {path}")
        lines = path.read_text("utf-8").splitlines()
        with self._lock, self._file_lock:
            count = self._load_ontology_lines(lines)
            existing = ""
            if self._ontology_path.exists():
                existing = self._ontology_path.read_text("utf-8")
                if existing and not existing.endswith("\n"):
                    existing += "\n"
            self._ontology_path.write_text(existing + "\n".join(lines) + "\n", "utf-8")
        return count

    # ----------------------------------------------------------------- ingest

    def ingest(self, path: str | Path, mode: str = "append") -> IngestReport:
        """Load a line-delimited record file; bad lines are reported, not fatal."""
        path = Path(path)
        if not path.exists():
            raise FileMissing(f"ingest file not found: {path}")
        if mode not in ("append", "replace"):
            raise ValueError(f"bad ingest mode: {mode}")
        report = IngestReport()
        accepted: list[CausalStatement] = []
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    statement = validate_statement(record)
                except json.JSONDecodeError as exc:
                    report.rejected += 1
                    report.errors.append({"line": line_no, "errors": [f"MalformedLine:{exc.msg}"]})
                    continue
                except ValidationFailed as exc:
                    report.rejected += 1
                    report.errors.append({"line": line_no, "errors": exc.errors})
                    continue
                accepted.append(statement)
                report.accepted += 1
        self._commit_statements(accepted, mode)
        return report

    def add_statements(self, records: Iterable[dict[str, Any]], mode: str = "append") -> IngestReport:
        """Ingest in-memory records (the inline variant of the ingest endpoint)."""
        report = IngestReport()
        accepted: list[CausalStatement] = []
        for i, record in enumerate(records, start=1):
            try:
                statement = validate_statement(record)
            except ValidationFailed as exc:
                report.rejected += 1
                report.errors.append({"line": i, "errors": exc.errors})
                continue
            accepted.append(statement)
            report.accepted += 1
        self._commit_statements(accepted, mode)
        return report

    def _commit_statements(self, statements: list[CausalStatement], mode: str) -> None:
        with self._lock, self._file_lock:
            if mode == "replace":
                self._log_path.write_text("", "utf-8")
                self._journal_path.write_text("", "utf-8")
                self._raw.clear()
                self._overlay.clear()
                self._effective.clear()
                self._index = CorpusIndex()
            with self._log_path.open("a", encoding="utf-8") as fh:
                for s in statements:
                    fh.write(json.dumps(statement_to_record(s), sort_keys=True) + "\n")
            for s in statements:
                self._raw[s.id] = s
                self._materialize(s.id)
            self._last_ingest = datetime.now(timezone.utc).isoformat(timespec="seconds")
            self._meta_path.write_text(json.dumps({"last_ingest": self._last_ingest}), "utf-8")

    # ---------------------------------------------------------------- queries

    def statement(self, sid: str, include_discarded: bool = True) -> CausalStatement | None:
        with self._lock:
            s = self._effective.get(sid)
            if s is None or (s.discarded and not include_discarded):
                return None
            return s

    def __contains__(self, sid: str) -> bool:
        return self.statement(sid) is not None

    def __len__(self) -> int:
        with self._lock:
            return sum(1 for s in self._effective.values() if not s.discarded)

    def all_statements(self, include_discarded: bool = False) -> list[CausalStatement]:
        with self._lock:
            return [
                s
                for s in self._effective.values()
                if include_discarded or not s.discarded
            ]

    def statements_for_pair(
        self, subject: str, object: str, include_discarded: bool = False
    ) -> list[CausalStatement]:
        """Statements whose effective pair matches, belief desc then id asc."""
        with self._lock:
            ids = self._index.by_pair.get((subject, object), set())
            rows = [self._effective[sid] for sid in ids]
        rows = [s for s in rows if include_discarded or not s.discarded]
        rows.sort(key=lambda s: (-s.belief, s.id))
        return rows

    def concept_statement_count(self, concept_id: str) -> int:
        """Active statements mentioning the concept as subject or object."""
        with self._lock:
            ids = self._index.by_subject.get(concept_id, set()) | self._index.by_object.get(
                concept_id, set()
            )
            return sum(1 for sid in ids if not self._effective[sid].discarded)

    def statement_count_per_concept(self) -> dict[str, int]:
        with self._lock:
            concepts = set(self._index.by_subject) | set(self._index.by_object)
            return {c: self.concept_statement_count(c) for c in concepts}

    def concepts(self) -> dict[str, Concept]:
        with self._lock:
            return dict(self._concepts)

    def concept(self, concept_id: str) -> Concept | None:
        with self._lock:
            return self._concepts.get(concept_id)

    def pair_support(self, include_discarded: bool = False) -> dict[tuple[str, str], int]:
        """Active statement count per (subject, object) pair."""
        with self._lock:
            out: dict[tuple[str, str], int] = {}
            for pair, ids in self._index.by_pair.items():
                n = sum(
                    1
                    for sid in ids
                    if include_discarded or not self._effective[sid].discarded
                )
                if n:
                    out[pair] = n
            return out

    @property
    def index(self) -> CorpusIndex:
        return self._index

    @property
    def last_ingest(self) -> str | None:
        return self._last_ingest

    def stats(self) -> dict[str, Any]:
        with self._lock:
            return {
                "statements": len(self),
                "concepts": len(self._concepts),
                "last_ingest": self._last_ingest,
            }

    # --------------------------------------------------------------- curation

    def _require_known(self, statement_ids: Iterable[str]) -> list[str]:
        missing = [sid for sid in statement_ids if sid not in self._raw]
        if missing:
            raise UnknownStatement(f"unknown statement ids: {', '.join(sorted(missing))}")
        return list(statement_ids)

    def _append_journal(self, entries: list[dict[str, Any]]) -> None:
        with self._journal_path.open("a", encoding="utf-8") as fh:
            for entry in entries:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        for entry in entries:
            self._merge_overlay(entry)
            self._materialize(entry["id"])

    def set_discarded(self, statement_ids: Iterable[str], discarded: bool) -> None:
        with self._lock, self._file_lock:
            ids = self._require_known(statement_ids)
            self._append_journal([{"id": sid, "discarded": discarded} for sid in ids])

    def set_statement_polarity(self, statement_ids: Iterable[str], polarity: Polarity) -> None:
        with self._lock, self._file_lock:
            ids = self._require_known(statement_ids)
            self._append_journal(
                [{"id": sid, "polarity": polarity.to_wire()} for sid in ids]
            )

    def remap_concept(
        self, statement_ids: Iterable[str], from_concept: str, to_concept: str
    ) -> list[str]:
        """Re-ground statements from one concept to another.

        Applies to whichever role (subject, object, or both sides of
        different statements) currently resolves to ``from_concept``. A
        remap that would leave a statement pointing at itself is skipped.
        Returns the ids actually changed.
        """
        with self._lock, self._file_lock:
            ids = self._require_known(statement_ids)
            entries = []
            for sid in ids:
                s = self._effective[sid]
                new_subject = to_concept if s.subject == from_concept else s.subject
                new_object = to_concept if s.object == from_concept else s.object
                if new_subject == new_object:
                    continue
                entry: dict[str, Any] = {"id": sid}
                if new_subject != s.subject:
                    entry["subject"] = new_subject
                if new_object != s.object:
                    entry["object"] = new_object
                if len(entry) > 1:
                    entries.append(entry)
            self._register_concept(to_concept)
            self._append_journal(entries)
            return [e["id"] for e in entries]

    # ------------------------------------------------------------------ files

    def model_dir(self) -> Path:
        path = self.root / "models"
        path.mkdir(exist_ok=True)
        return path

    def embeddings_path(self) -> Path:
        return self.root / "embeddings.json"

    def snapshot(self) -> Iterator[CausalStatement]:
        return iter(self.all_statements())
