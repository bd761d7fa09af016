"""Headless operation: ingest, query, suggest, paths, export, layout, embeddings.

Exit codes: 0 success, 1 validation problem, 2 I/O problem. ``--json``
switches stdout to stable machine-readable JSON.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from functools import wraps
from pathlib import Path
from typing import Any

import click

from .config import load_config
from .engine import Engine
from .errors import CagkitError, FileMissing, StoreUnavailable
from .model import Polarity
from .search import FacetQuery

IO_CODES = {FileMissing.code, StoreUnavailable.code}


def common_options(fn):
    @click.option("--store", "store_dir", default="./store", show_default=True, help="Store directory.")
    @click.option("--config", "config_file", default=None, help="key=value config file.")
    @click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CagkitError as exc:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
            sys.exit(2 if exc.code in IO_CODES else 1)
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def make_engine(store_dir: str, config_file: str | None) -> Engine:
    return Engine(store_dir, load_config(config_file))


def emit(payload: dict[str, Any], as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(human)


@click.group()
def main() -> None:
    """Causal analysis graph toolkit."""


@main.command()
@click.argument("corpus", type=click.Path())
@click.option("--mode", type=click.Choice(["append", "replace"]), default="append", show_default=True)
@click.option("--ontology", type=click.Path(), default=None, help="Ontology file to load first.")
@common_options
def ingest(corpus, mode, ontology, store_dir, config_file, as_json):
    """Ingest a line-delimited statement corpus."""
    engine = make_engine(store_dir, config_file)
    if ontology:
        engine.load_ontology(ontology)
    report = engine.ingest_file(corpus, mode=mode)
    human = f"accepted {report.accepted}, rejected {report.rejected}"
    for err in report.errors[:10]:
        human += f"\n  line {err['line']}: {', '.join(err['errors'])}"
    emit(report.to_dict(), as_json, human)
    if report.rejected and not report.accepted:
        sys.exit(1)


@main.command()
@click.option("--doc-id", "doc_ids", multiple=True)
@click.option("--source", "sources", multiple=True)
@click.option("--year-from", type=int, default=None)
@click.option("--year-to", type=int, default=None)
@click.option("--polarity", "polarities", multiple=True, type=click.Choice(["same", "opposite", "unknown"]))
@click.option("--min-evidence", type=int, default=None)
@click.option("--min-belief", type=float, default=None)
@click.option("--concept", "concepts", multiple=True)
@click.option("--exact", is_flag=True, help="Disable ontology-subtree expansion.")
@click.option("--region", default=None, help="Region path prefix.")
@click.option("--from", "time_from", default=None, help="Interval overlap start (YYYY-MM-DD).")
@click.option("--to", "time_to", default=None, help="Interval overlap end (YYYY-MM-DD).")
@click.option("--limit", type=int, default=20, show_default=True)
@common_options
def query(
    doc_ids, sources, year_from, year_to, polarities, min_evidence, min_belief,
    concepts, exact, region, time_from, time_to, limit, store_dir, config_file, as_json,
):
    """Run a faceted search over the corpus."""
    engine = make_engine(store_dir, config_file)
    year_range = None
    if year_from is not None or year_to is not None:
        year_range = (year_from or year_to, year_to or year_from)
    overlap = None
    if time_from or time_to:
        start = date.fromisoformat(time_from or time_to)
        end = date.fromisoformat(time_to or time_from)
        overlap = (start, end)
    q = FacetQuery(
        doc_ids=frozenset(doc_ids) or None,
        sources=frozenset(sources) or None,
        year_range=year_range,
        polarities=frozenset(Polarity(p) for p in polarities) or None,
        min_evidence=min_evidence,
        min_belief=min_belief,
        concepts=frozenset(concepts) or None,
        exact_concepts=exact,
        region_prefix=region,
        time_overlap=overlap,
    )
    result = engine.search(q)
    payload = result.to_dict()
    payload["statement_ids"] = payload["statement_ids"][:limit]
    lines = [f"{result.total} statements match"]
    for sid in payload["statement_ids"]:
        s = engine.store.statement(sid)
        lines.append(f"  {sid}  {s.subject} -> {s.object}  [{s.polarity.value}] belief={s.belief}")
    emit(payload, as_json, "\n".join(lines))


@main.command()
@click.argument("text")
@click.option("-k", type=int, default=10, show_default=True)
@common_options
def suggest(text, k, store_dir, config_file, as_json):
    """Suggest concepts matching a search string."""
    engine = make_engine(store_dir, config_file)
    hits = engine.concept_suggestions(text, k=k)
    payload = {
        "suggestions": [
            {"concept": h.concept.id, "display": h.concept.display_name, "statement_count": h.statement_count}
            for h in hits
        ]
    }
    human = "\n".join(f"{h.statement_count:6d}  {h.concept.id}" for h in hits) or "(no matches)"
    emit(payload, as_json, human)


@main.command()
@click.option("--source", required=True)
@click.option("--target", required=True)
@click.option("--max-hops", type=int, default=2, show_default=True)
@click.option("-k", type=int, default=5, show_default=True)
@common_options
def paths(source, target, max_hops, k, store_dir, config_file, as_json):
    """Indirect-path suggestions between two concepts."""
    engine = make_engine(store_dir, config_file)
    found = engine.paths(source, target, max_hops=max_hops, k=k)
    payload = {
        "paths": [
            {"concepts": list(p.concepts), "hop_support": list(p.hop_support), "affinity": p.affinity}
            for p in found
        ]
    }
    human = "\n".join(
        " -> ".join(p.concepts) + f"   (min support {min(p.hop_support)})" for p in found
    )
    emit(payload, as_json, human)


@main.group()
def cag() -> None:
    """Model export and import."""


@cag.command("export")
@click.argument("model_id")
@click.option("-o", "--output", type=click.Path(), default=None, help="Write to file instead of stdout.")
@common_options
def cag_export(model_id, output, store_dir, config_file, as_json):
    engine = make_engine(store_dir, config_file)
    doc = engine.workspace.export(model_id)
    text = json.dumps(doc, sort_keys=True, indent=2)
    if output:
        Path(output).write_text(text + "\n", "utf-8")
        emit({"written": output, "id": doc["id"]}, as_json, f"wrote {output}")
    else:
        click.echo(text)


@cag.command("import")
@click.argument("file", type=click.Path())
@common_options
def cag_import(file, store_dir, config_file, as_json):
    engine = make_engine(store_dir, config_file)
    path = Path(file)
    if not path.exists():
        raise FileMissing(f"model file not found: {path}")
    model = engine.workspace.import_export(json.loads(path.read_text("utf-8")))
    emit(model.summary(), as_json, f"imported {model.id} ({model.name}): "
         f"{len(model.nodes)} nodes, {len(model.edges)} edges")


@main.group()
def layout() -> None:
    """Layout exports."""


@layout.command("svg")
@click.argument("model_id")
@click.option("-o", "--output", type=click.Path(), default=None)
@common_options
def layout_svg(model_id, output, store_dir, config_file, as_json):
    """Render a model's flow layout as standalone SVG."""
    engine = make_engine(store_dir, config_file)
    svg = engine.model_svg(model_id)
    if output:
        Path(output).write_text(svg, "utf-8")
        emit({"written": output}, as_json, f"wrote {output}")
    else:
        click.echo(svg, nl=False)


@main.group()
def embed() -> None:
    """Concept embeddings and clusters."""


@embed.command("build")
@click.argument("vectors", type=click.Path())
@click.option("--min-cluster-size", type=int, default=None)
@common_options
def embed_build(vectors, min_cluster_size, store_dir, config_file, as_json):
    """Build per-concept embeddings and density clusters from a vector file."""
    engine = make_engine(store_dir, config_file)
    table = engine.build_embeddings(vectors, min_cluster_size=min_cluster_size)
    clustered = sum(1 for c in table.clusters.values() if c >= 0)
    payload = {"concepts": len(table.vectors), "dim": table.dim, "clustered": clustered}
    emit(payload, as_json, f"{len(table.vectors)} concepts, dim {table.dim}, {clustered} in clusters")


@main.command()
@click.option("--host", default=None, help="Bind host (default from config).")
@click.option("--port", type=int, default=None, help="Bind port (default from config).")
@common_options
def serve(host, port, store_dir, config_file, as_json):
    """Run the HTTP service over this store."""
    import uvicorn

    from .api import create_app

    engine = make_engine(store_dir, config_file)
    app = create_app(engine)
    try:
        uvicorn.run(
            app,
            host=host or engine.config.host,
            port=port or engine.config.port,
            log_level="warning",
        )
    except OSError as exc:  # port in use and friends
        raise StoreUnavailable(f"cannot serve: {exc}") from exc


if __name__ == "__main__":
    main()
