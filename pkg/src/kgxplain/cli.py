"""Operator command line: build the KG, recommend, explain, evaluate, serve.

Exit codes: 0 ok, 2 usage, 3 validation/parse failure, 4 backend
failure, 5 evaluation completed with per-sample failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from .communities import detect_communities
from .config import load_config
from .context import assemble, render, render_text
from .errors import BackendError, GraphError, KgxplainError, ParseError
from .evaluate import (
    ExperimentConfig,
    export_report,
    run_experiment,
    to_csv,
    to_json,
    to_table,
)
from .gateway import Gateway, make_backend
from .kg import SemanticSimilar, TaxonomyChild, load_file, save_file
from .prompting import build_prompt, fill_template
from .recommender import path_rationale, recommend_path
from .relations import extract_relations

EXIT_VALIDATION = 3
EXIT_BACKEND = 4
EXIT_EVAL_FAILURES = 5


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Knowledge-graph grounded explanation toolkit."""


@main.command("make-corpus")
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("corpus"))
def make_corpus(out_dir: Path):
    """Write the synthetic corpus (graph + path requests) to OUT_DIR."""
    out_dir.mkdir(parents=True, exist_ok=True)
    graph = corpus_mod.build_synthetic_graph()
    save_file(graph, out_dir / "corpus.jsonl")
    with open(out_dir / "paths.jsonl", "w", encoding="utf-8") as fh:
        for req in corpus_mod.default_path_requests():
            fh.write(json.dumps({"start": req.start, "goal": req.goal}) + "\n")
    click.echo(f"wrote {len(graph)} nodes to {out_dir / 'corpus.jsonl'}")


@main.command("build-kg")
@click.argument("corpus_in", type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=Path("graph.jsonl"))
@click.option("--threshold", type=float, default=None, help="Override similarity threshold.")
def build_kg(corpus_in: Path, config_path, out: Path, threshold):
    """Validate CORPUS_IN, extract semantic relations, detect communities."""
    cfg = load_config(config_path)
    if threshold is not None:
        sim_cfg = type(cfg.similarity)(
            threshold=threshold, min_doc_tokens=cfg.similarity.min_doc_tokens
        )
    else:
        sim_cfg = cfg.similarity
    try:
        graph = load_file(corpus_in)
    except (ParseError, GraphError) as exc:
        _fail(EXIT_VALIDATION, f"{corpus_in}: {exc}")
    result = extract_relations(graph, sim_cfg)
    enriched = result.graph
    assignment = detect_communities(enriched)
    save_file(enriched, out)

    taxonomy_edges = sum(
        isinstance(e.kind, TaxonomyChild) for e in enriched.edges()
    )
    semantic_edges = sum(
        isinstance(e.kind, SemanticSimilar) for e in enriched.edges()
    )
    sizes: dict[int, int] = {}
    for community in assignment.partition.values():
        sizes[community] = sizes.get(community, 0) + 1
    click.echo(f"nodes: {len(enriched)}")
    click.echo(f"taxonomy edges: {taxonomy_edges}")
    click.echo(f"semantic edges: {semantic_edges} (added {result.edges_added})")
    click.echo(f"communities: {len(sizes)}, sizes: {sorted(sizes.values(), reverse=True)}")
    click.echo(f"modularity: {assignment.modularity:.4f}")
    for node_id, reason in result.skipped:
        click.echo(f"skipped {node_id}: {reason}", err=True)
    with open(out.with_suffix(".communities.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {"partition": assignment.partition, "modularity": assignment.modularity},
            fh,
            sort_keys=True,
            indent=2,
        )
    click.echo(f"graph written to {out}")


def _load_graph(path: Path):
    try:
        return load_file(path)
    except (ParseError, GraphError) as exc:
        _fail(EXIT_VALIDATION, f"{path}: {exc}")


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, path_type=Path))
@click.argument("start")
@click.argument("goal")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def recommend(graph_file: Path, start: str, goal: str, config_path):
    """Print the recommended path and its rationale."""
    cfg = load_config(config_path)
    graph = _load_graph(graph_file)
    try:
        path = recommend_path(graph, start, goal, cfg.recommender)
        facts = path_rationale(graph, path)
    except KgxplainError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    click.echo(f"goal: {goal} ({graph.node(goal).title})")
    for step in facts:
        node = graph.node(step.node)
        chain = " > ".join(graph.node(a).title for a in step.parent_chain)
        via = step.edge_kind
        if step.edge_weight is not None:
            via += f" (weight {step.edge_weight:.4f})"
        click.echo(
            f"  {node.id} [{node.level.value}] {node.title}\n"
            f"    via: {via}, contribution: {step.score_contribution:.4f}\n"
            f"    curriculum: {chain or '(root)'}"
        )


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, path_type=Path))
@click.argument("target")
@click.option("--goal", default=None, help="Goal node id (defaults to the target's root).")
@click.option("--with-context/--no-context", "with_context", default=True)
@click.option("--dump-context", is_flag=True)
@click.option("--backend", default=None, type=click.Choice(["mock", "remote"]))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def explain(graph_file: Path, target: str, goal, with_context, dump_context, backend, config_path):
    """Generate the slot-template explanation for one learning object."""
    cfg = load_config(config_path)
    graph = _load_graph(graph_file)
    try:
        node = graph.node(target)
        goal_id = goal or graph.taxonomy_root(target)
        goal_title = graph.node(goal_id).title
        assignment = detect_communities(graph)
        bundle = assemble(graph, assignment, target, cfg.limits)
        context_text = render(bundle)
    except KgxplainError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if dump_context:
        click.echo(render_text(context_text))
        click.echo("")
    doc = build_prompt(
        context_text if with_context else None,
        cfg.role,
        cfg.definitions,
        cfg.template,
        node.title,
        goal_title,
    )
    gateway = Gateway(make_backend(backend or cfg.backend, cfg.remote))
    from .gateway import GenerationRequest

    try:
        result = gateway.generate(
            GenerationRequest(
                system_text=doc.system_text(),
                user_text=doc.user_text(),
                max_words=cfg.template.total_budget,
                backend_id=gateway.backend.backend_id,
            )
        )
        explanation = fill_template(cfg.template, result.text, with_context)
    except BackendError as exc:
        _fail(EXIT_BACKEND, str(exc))
    except KgxplainError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    click.echo(explanation.filled_text)


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, path_type=Path))
@click.argument("paths_file", type=click.Path(exists=True, path_type=Path))
@click.option("--backend", default="mock", type=click.Choice(["mock", "remote"]))
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("eval-out"))
@click.option("--jobs", type=int, default=1)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def evaluate(graph_file: Path, paths_file: Path, backend, out_dir: Path, jobs, config_path):
    """Run the paired with/without-context evaluation and write reports."""
    cfg = load_config(config_path)
    graph = _load_graph(graph_file)
    assignment = detect_communities(graph)
    paths = []
    try:
        with open(paths_file, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                req = json.loads(line)
                paths.append(
                    recommend_path(graph, req["start"], req["goal"], cfg.recommender)
                )
    except (json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_VALIDATION, f"{paths_file}:{lineno}: {exc}")
    except KgxplainError as exc:
        _fail(EXIT_VALIDATION, f"{paths_file}:{lineno}: {exc}")

    gateway = Gateway(make_backend(backend, cfg.remote))
    experiment = ExperimentConfig(
        role=cfg.role, definitions=cfg.definitions, limits=cfg.limits, jobs=jobs
    )
    report = run_experiment(graph, assignment, paths, gateway, cfg.template, experiment)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(to_json(report), encoding="utf-8")
    (out_dir / "report.csv").write_text(to_csv(report), encoding="utf-8")
    (out_dir / "report.txt").write_text(to_table(report), encoding="utf-8")
    from .figures import plot_report

    plot_report(report, str(out_dir / "report.png"))
    export_report(report, click.get_text_stream("stdout"), "table")
    if report.failures:
        click.echo(f"{len(report.failures)} samples failed; see report.json", err=True)
        sys.exit(EXIT_EVAL_FAILURES)


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, path_type=Path))
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--backend", default=None, type=click.Choice(["mock", "remote"]))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(graph_file: Path, port, host, backend, config_path):
    """Serve the conversational explanation API."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    graph = _load_graph(graph_file)
    assignment = detect_communities(graph)
    gateway = Gateway(make_backend(backend or cfg.backend, cfg.remote))
    app = create_app(graph, assignment, gateway, cfg)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
