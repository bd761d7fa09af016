"""Command-line surface: subcommands, exit codes, stable JSON output."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from cagkit.cli import main
from cagkit.engine import Engine

from conftest import write_corpus
from test_suggest import make_record


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def corpus(tmp_path):
    records = [
        make_record("wm/e/disease", "wm/e/livestock", polarity=1, belief=0.9),
        make_record("wm/e/livestock", "wm/e/farming", polarity=1, belief=0.7),
        make_record("wm/e/food_price", "wm/e/food_access", polarity=-1, belief=0.8, n_ev=3),
    ]
    return write_corpus(tmp_path / "corpus.jsonl", records)


def run(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    return result


def test_ingest_and_query(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    result = run(runner, ["ingest", str(corpus), "--store", store, "--json"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report == {"accepted": 3, "rejected": 0, "errors": []}

    result = run(
        runner,
        ["query", "--polarity", "opposite", "--min-evidence", "3", "--store", store, "--json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["total"] == 1
    assert set(payload) == {"statement_ids", "total", "facet_counts"}


def test_ingest_missing_file_is_io_error(runner, tmp_path):
    result = run(runner, ["ingest", str(tmp_path / "nope.jsonl"), "--store", str(tmp_path / "s")])
    assert result.exit_code == 2
    assert "FILE_NOT_FOUND" in result.output


def test_paths_two_hop_example(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    result = run(
        runner,
        ["paths", "--source", "wm/e/disease", "--target", "wm/e/farming", "--store", store, "--json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["paths"][0]["concepts"] == ["wm/e/disease", "wm/e/livestock", "wm/e/farming"]
    # human-readable form prints the chain too
    result = run(
        runner, ["paths", "--source", "wm/e/disease", "--target", "wm/e/farming", "--store", store]
    )
    assert "wm/e/disease -> wm/e/livestock -> wm/e/farming" in result.output


def test_paths_disconnected_exit_code(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    result = run(
        runner,
        ["paths", "--source", "wm/e/farming", "--target", "wm/e/disease", "--store", store],
    )
    assert result.exit_code == 1
    assert "NO_PATH_FOUND" in result.output


def test_suggest_ranking(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    result = run(runner, ["suggest", "food", "--store", store, "--json"])
    payload = json.loads(result.output)
    assert [s["concept"] for s in payload["suggestions"]] == [
        "wm/e/food_access",
        "wm/e/food_price",
    ]


def test_cag_export_import_and_svg(runner, corpus, tmp_path):
    store = tmp_path / "store"
    run(runner, ["ingest", str(corpus), "--store", str(store)])
    engine = Engine(store)
    model = engine.workspace.create_model("demo", model_id="cag-demo")
    engine.workspace.add_edge("cag-demo", "wm/e/food_price", "wm/e/food_access")

    export_path = tmp_path / "demo.json"
    result = run(
        runner,
        ["cag", "export", "cag-demo", "-o", str(export_path), "--store", str(store), "--json"],
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(export_path.read_text())
    assert doc["id"] == "cag-demo"
    assert doc["edges"][0]["subj"] == "wm/e/food_price"

    result = run(runner, ["cag", "import", str(export_path), "--store", str(store), "--json"])
    assert result.exit_code == 0
    summary = json.loads(result.output)
    assert summary["nodes"] == 2 and summary["edges"] == 1

    svg_path = tmp_path / "demo.svg"
    result = run(runner, ["layout", "svg", "cag-demo", "-o", str(svg_path), "--store", str(store)])
    assert result.exit_code == 0
    svg = svg_path.read_text()
    assert svg.startswith("<?xml")
    assert "<svg" in svg and 'version="1.1"' in svg
    assert "#b2182b" in svg  # the opposite-polarity edge is drawn red


def test_embed_build(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    vectors = tmp_path / "vectors.txt"
    vectors.write_text(
        "disease 1 0\nlivestock 0.9 0.1\nfarming 0.8 0.2\nfood 0 1\nprice 0.1 0.9\naccess 0 0.9\n",
        "utf-8",
    )
    result = run(runner, ["embed", "build", str(vectors), "--store", store, "--json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["dim"] == 2
    assert payload["concepts"] == 5


def test_unknown_model_exit_code(runner, corpus, tmp_path):
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    result = run(runner, ["cag", "export", "missing", "--store", store])
    assert result.exit_code == 1
    assert "UNKNOWN_MODEL" in result.output


def test_golden_query_json_schema(runner, corpus, tmp_path):
    """The --json schema is pinned: exact keys and deterministic ordering."""
    store = str(tmp_path / "store")
    run(runner, ["ingest", str(corpus), "--store", store])
    result = run(runner, ["query", "--concept", "wm/e/disease", "--store", store, "--json"])
    payload = json.loads(result.output)
    engine = Engine(store)
    sid = engine.store.statements_for_pair("wm/e/disease", "wm/e/livestock")[0].id
    assert payload == {
        "statement_ids": [sid],
        "total": 1,
        "facet_counts": {
            "concept": {
                "wm": 3,
                "wm/e": 3,
                "wm/e/disease": 1,
                "wm/e/farming": 1,
                "wm/e/food_access": 1,
                "wm/e/food_price": 1,
                "wm/e/livestock": 2,
            },
            "polarity": {"same": 1},
            "region": {},
            "source": {},
            "year": {},
        },
    }
