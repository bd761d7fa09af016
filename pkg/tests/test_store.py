"""Store ingest, indexing, overlay curation, and persistence."""

from __future__ import annotations

import json
import random

import pytest

from cagkit.errors import FileMissing, UnknownStatement
from cagkit.model import Polarity
from cagkit.store import StatementStore, region_prefixes

from conftest import build_store, random_record, write_corpus


def test_ingest_counts_and_errors(tmp_path, rng):
    records = [random_record(rng) for _ in range(10)]
    records[3]["belief"] = 4.2
    records[7]["evidence"] = []
    corpus = write_corpus(tmp_path / "c.jsonl", records)
    store = StatementStore(tmp_path / "s")
    report = store.ingest(corpus, mode="replace")
    assert report.accepted == 8
    assert report.rejected == 2
    assert [e["line"] for e in report.errors] == [4, 8]
    assert "BeliefOutOfRange" in report.errors[0]["errors"]
    assert len(store) == 8


def test_malformed_line_is_collected_not_fatal(tmp_path, rng):
    corpus = tmp_path / "c.jsonl"
    good = json.dumps(random_record(rng))
    corpus.write_text(good + "\n{not json}\n" + good + "\n", "utf-8")
    store = StatementStore(tmp_path / "s")
    report = store.ingest(corpus)
    assert report.rejected == 1
    assert report.errors[0]["line"] == 2
    assert report.errors[0]["errors"][0].startswith("MalformedLine")


def test_missing_file_raises(tmp_path):
    store = StatementStore(tmp_path / "s")
    with pytest.raises(FileMissing):
        store.ingest(tmp_path / "nope.jsonl")


def test_double_append_equals_single_ingest(tmp_path, rng):
    """Re-ingesting the same file must replace statements in place."""
    records = [random_record(rng) for _ in range(50)]
    corpus = write_corpus(tmp_path / "c.jsonl", records)
    once = StatementStore(tmp_path / "once")
    once.ingest(corpus)
    twice = StatementStore(tmp_path / "twice")
    twice.ingest(corpus)
    twice.ingest(corpus)
    assert len(once) == len(twice)
    assert {s.id for s in once.all_statements()} == {s.id for s in twice.all_statements()}
    assert once.statement_count_per_concept() == twice.statement_count_per_concept()


def test_reopen_rebuilds_same_state(tmp_path, rng):
    records = [random_record(rng) for _ in range(60)]
    store = build_store(tmp_path, records)
    sid = store.all_statements()[0].id
    store.set_discarded([sid], True)
    reopened = StatementStore(store.root)
    assert {s.id for s in reopened.all_statements(include_discarded=True)} == {
        s.id for s in store.all_statements(include_discarded=True)
    }
    assert reopened.statement(sid).discarded
    assert len(reopened) == len(store)


def test_statements_for_pair_matches_linear_scan(tmp_path, rng):
    records = [random_record(rng) for _ in range(1000)]
    store = build_store(tmp_path, records)
    everything = store.all_statements(include_discarded=True)
    pairs = {(s.subject, s.object) for s in everything}
    check = random.Random(3).sample(sorted(pairs), 25)
    for subject, obj in check:
        got = store.statements_for_pair(subject, obj)
        oracle = [s for s in everything if (s.subject, s.object) == (subject, obj) and not s.discarded]
        oracle.sort(key=lambda s: (-s.belief, s.id))
        assert got == oracle
    assert store.statements_for_pair("wm/none", "wm/nowhere") == []


def test_concept_count_matches_brute_force(tmp_path, rng):
    records = [random_record(rng) for _ in range(800)]
    store = build_store(tmp_path, records)
    everything = store.all_statements()
    for concept in random.Random(5).sample(sorted({s.subject for s in everything}), 10):
        oracle = sum(1 for s in everything if s.mentions(concept))
        assert store.concept_statement_count(concept) == oracle
    assert store.concept_statement_count("wm/unknown/concept") == 0


def test_discard_is_non_destructive_and_excluded_from_counts(tmp_path, rng):
    store = build_store(tmp_path, [random_record(rng) for _ in range(40)])
    victim = store.all_statements()[0]
    pair = (victim.subject, victim.object)
    before = store.concept_statement_count(victim.subject)
    store.set_discarded([victim.id], True)
    assert store.statement(victim.id).discarded
    assert victim.id not in {s.id for s in store.statements_for_pair(*pair)}
    assert victim.id in {s.id for s in store.statements_for_pair(*pair, include_discarded=True)}
    assert store.concept_statement_count(victim.subject) == before - 1
    store.set_discarded([victim.id], False)
    assert not store.statement(victim.id).discarded
    assert store.concept_statement_count(victim.subject) == before


def test_polarity_override_and_remap(tmp_path, rng):
    store = build_store(tmp_path, [random_record(rng) for _ in range(30)])
    s = store.all_statements()[0]
    store.set_statement_polarity([s.id], Polarity.OPPOSITE)
    assert store.statement(s.id).polarity is Polarity.OPPOSITE
    changed = store.remap_concept([s.id], s.subject, "wm/concept/economy/labor_supply")
    assert changed == [s.id]
    effective = store.statement(s.id)
    assert effective.subject == "wm/concept/economy/labor_supply"
    # index follows the effective grounding
    assert s.id in {
        st.id for st in store.statements_for_pair("wm/concept/economy/labor_supply", s.object)
    }
    assert s.id not in {st.id for st in store.statements_for_pair(s.subject, s.object)}
    # raw log untouched: a fresh open still sees the overlay applied
    reopened = StatementStore(store.root)
    assert reopened.statement(s.id).subject == "wm/concept/economy/labor_supply"


def test_curation_on_unknown_statement_rejected(tmp_path, rng):
    store = build_store(tmp_path, [random_record(rng) for _ in range(5)])
    with pytest.raises(UnknownStatement):
        store.set_discarded(["missing-id"], True)


def test_index_invariants(tmp_path, rng):
    store = build_store(tmp_path, [random_record(rng) for _ in range(300)])
    index = store.index
    everything = store.all_statements(include_discarded=True)
    by_id = {s.id: s for s in everything}
    # every statement id appears exactly once in each structural index
    for s in everything:
        assert sum(1 for ids in index.by_subject.values() if s.id in ids) == 1
        assert sum(1 for ids in index.by_pair.values() if s.id in ids) == 1
        assert sum(1 for ids in index.by_object.values() if s.id in ids) == 1
    counts = store.statement_count_per_concept()
    for concept, count in counts.items():
        ids = index.by_subject.get(concept, set()) | index.by_object.get(concept, set())
        assert count == sum(1 for sid in ids if not by_id[sid].discarded)


def test_ontology_loading_and_auto_registration(tmp_path, rng):
    onto = tmp_path / "ontology.txt"
    onto.write_text(
        "wm/concept/economy/food_price\tFood Price Index\nwm/concept/custom/thing\n", "utf-8"
    )
    store = build_store(tmp_path, [random_record(rng) for _ in range(10)])
    loaded = store.load_ontology(onto)
    assert loaded == 2
    assert store.concept("wm/concept/economy/food_price").display_name == "Food Price Index"
    assert store.concept("wm/concept/custom/thing").display_name == "Thing"
    # concepts seen in statements are auto-registered
    any_subject = store.all_statements()[0].subject
    assert store.concept(any_subject) is not None
    # ontology persists across reopen
    reopened = StatementStore(store.root)
    assert reopened.concept("wm/concept/custom/thing") is not None


def test_region_prefixes():
    assert region_prefixes("Africa/Eastern Africa/Ethiopia") == [
        "Africa",
        "Africa/Eastern Africa",
        "Africa/Eastern Africa/Ethiopia",
    ]
