"""Shared fixtures: deterministic synthetic corpora and store builders."""

from __future__ import annotations

import json
import random
from datetime import date, timedelta
from pathlib import Path
from typing import Any

import pytest

from cagkit.store import StatementStore

CONCEPT_POOL = [
    "wm/concept/agriculture/crop_production",
    "wm/concept/agriculture/livestock",
    "wm/concept/agriculture/farming",
    "wm/concept/agriculture/irrigation",
    "wm/concept/agriculture/pests",
    "wm/concept/health/disease",
    "wm/concept/health/malnutrition",
    "wm/concept/health/mortality",
    "wm/concept/health/sanitation",
    "wm/concept/economy/food_price",
    "wm/concept/economy/food_access",
    "wm/concept/economy/household_income",
    "wm/concept/economy/poverty",
    "wm/concept/economy/inflation",
    "wm/concept/economy/trade",
    "wm/concept/social/conflict",
    "wm/concept/social/violence",
    "wm/concept/social/displacement",
    "wm/concept/social/education",
    "wm/concept/social/governance",
    "wm/concept/environment/drought",
    "wm/concept/environment/flood",
    "wm/concept/environment/rainfall",
    "wm/concept/environment/temperature",
    "wm/concept/environment/locusts",
    "wm/concept/food/food_security",
    "wm/concept/food/food_aid",
    "wm/concept/food/food_supply",
    "wm/concept/food/food_shortage",
    "wm/concept/food/nutrition",
]

REGION_POOL = [
    "Africa/Eastern Africa/Ethiopia",
    "Africa/Eastern Africa/Kenya",
    "Africa/Eastern Africa/Somalia",
    "Africa/Eastern Africa/South Sudan",
    "Africa/Western Africa/Nigeria",
    "Africa/Western Africa/Mali",
    "Asia/Southern Asia/Afghanistan",
    None,
]

SOURCE_POOL = ["FAO", "WFP", "FEWS NET", "Reuters", "OCHA", "World Bank"]


def random_record(rng: random.Random, concepts: list[str] | None = None) -> dict[str, Any]:
    """One synthetic ingest record; subject and object always differ."""
    pool = concepts or CONCEPT_POOL
    subject = rng.choice(pool)
    obj = rng.choice([c for c in pool if c != subject])
    n_evidence = rng.randint(1, 4)
    evidence = []
    for _ in range(n_evidence):
        ev: dict[str, Any] = {
            "doc_id": f"doc-{rng.randint(1, 200)}",
            "text": f"synthetic evidence {rng.randint(0, 10_000)}",
        }
        if rng.random() < 0.8:
            ev["source"] = rng.choice(SOURCE_POOL)
        if rng.random() < 0.8:
            ev["date"] = (date(2005, 1, 1) + timedelta(days=rng.randint(0, 5500))).isoformat()
        evidence.append(ev)
    record: dict[str, Any] = {
        "subj": {"concept": subject, "text": subject.rsplit("/", 1)[-1]},
        "obj": {"concept": obj, "text": obj.rsplit("/", 1)[-1]},
        "polarity": rng.choice([1, 1, 1, -1, -1, 0]),
        "belief": round(rng.random(), 4),
        "evidence": evidence,
    }
    context: dict[str, Any] = {}
    region = rng.choice(REGION_POOL)
    if region:
        context["region"] = region
    if rng.random() < 0.5:
        start = date(2008, 1, 1) + timedelta(days=rng.randint(0, 4000))
        context["start"] = start.isoformat()
        context["end"] = (start + timedelta(days=rng.randint(0, 700))).isoformat()
    if rng.random() < 0.3:
        context["lat"] = round(rng.uniform(-10, 15), 3)
        context["lon"] = round(rng.uniform(25, 50), 3)
    if context:
        record["context"] = context
    return record


def write_corpus(path: Path, records: list[dict[str, Any]]) -> Path:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", "utf-8")
    return path


def build_store(tmp_path: Path, records: list[dict[str, Any]], name: str = "store") -> StatementStore:
    store = StatementStore(tmp_path / name)
    corpus = write_corpus(tmp_path / f"{name}-corpus.jsonl", records)
    store.ingest(corpus, mode="replace")
    return store


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)


@pytest.fixture
def small_store(tmp_path: Path, rng: random.Random) -> StatementStore:
    return build_store(tmp_path, [random_record(rng) for _ in range(120)])
