"""Paired evaluation of contextualized vs. plain explanations.

For every LO on every evaluation path we build a reference text from its
curated metadata, generate one candidate with KG context and one
without (identical task body and word budget), score both with all four
Rouge variants, and aggregate arithmetic means per arm.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO

from .communities import CommunityAssignment
from .context import ContextLimits, DEFAULT_CONTEXT_LIMITS, assemble, render
from .errors import EmptyMetadata, KgxplainError
from .gateway import Gateway, GenerationRequest
from .kg import KnowledgeGraph, NodeId
from .prompting import (
    DEFAULT_DEFINITIONS,
    DEFAULT_ROLE,
    DefinitionEntry,
    ExplanationTemplate,
    PromptDocument,
    RoleSpec,
    build_prompt,
    fill_template,
)
from .recommender import LearningPath
from .rouge import VARIANTS, RougeReport, RougeScore, score_all

ARMS = ("with_context", "without_context")
MEASURES = ("recall", "precision", "f1")


def build_reference(graph: KnowledgeGraph, target: NodeId) -> str:
    """Reference text from the LO's curated description and reflection."""
    node = graph.node(target)
    if not node.description.strip():
        raise EmptyMetadata(f"node {target!r} has no description")
    parts = [_terminate(node.description)]
    if node.reflection_info.strip():
        parts.append(_terminate(node.reflection_info))
    return " ".join(parts)


def _terminate(text: str) -> str:
    text = text.strip()
    return text if text[-1] in ".!?" else text + "."


@dataclass(frozen=True)
class EvalSample:
    sample_id: str
    target: NodeId
    reference_text: str
    candidate_with_context: str
    candidate_without_context: str
    scores_with_context: RougeReport
    scores_without_context: RougeReport


@dataclass(frozen=True)
class EvalFailure:
    sample_id: str
    target: NodeId
    error_code: str
    message: str


@dataclass
class EvalReport:
    samples: list[EvalSample] = field(default_factory=list)
    failures: list[EvalFailure] = field(default_factory=list)
    # aggregates[variant][arm][measure] -> mean over scored samples
    aggregates: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)

    @property
    def scored_count(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class ExperimentConfig:
    role: RoleSpec = DEFAULT_ROLE
    definitions: tuple[DefinitionEntry, ...] = DEFAULT_DEFINITIONS
    limits: ContextLimits = DEFAULT_CONTEXT_LIMITS
    jobs: int = 1


def make_sample_id(path_index: int, target: NodeId) -> str:
    return f"p{path_index:02d}:{target}"


@dataclass(frozen=True)
class PreparedPrompts:
    """Both arms of one sample; exposed for paired-design inspection."""

    sample_id: str
    target: NodeId
    with_context: PromptDocument
    without_context: PromptDocument


def prepare_prompts(
    graph: KnowledgeGraph,
    assignment: CommunityAssignment,
    paths: list[LearningPath],
    template: ExplanationTemplate,
    config: ExperimentConfig = ExperimentConfig(),
) -> list[PreparedPrompts]:
    """Deterministic per-sample prompt pairs for all LOs on all paths."""
    prepared = []
    seen: set[str] = set()
    for path_index, path in enumerate(paths):
        goal_title = graph.node(path.goal).title
        for node_id in path.steps:
            node = graph.node(node_id)
            if not node.is_learning_object:
                continue
            sample_id = make_sample_id(path_index, node_id)
            if sample_id in seen:
                continue
            seen.add(sample_id)
            bundle = assemble(graph, assignment, node_id, config.limits)
            context_text = render(bundle)
            with_ctx = build_prompt(
                context_text, config.role, config.definitions, template,
                node.title, goal_title,
            )
            without_ctx = build_prompt(
                None, config.role, config.definitions, template,
                node.title, goal_title,
            )
            prepared.append(
                PreparedPrompts(
                    sample_id=sample_id,
                    target=node_id,
                    with_context=with_ctx,
                    without_context=without_ctx,
                )
            )
    return prepared


def _run_sample(
    graph: KnowledgeGraph,
    prompts: PreparedPrompts,
    gateway: Gateway,
    template: ExplanationTemplate,
):
    reference = build_reference(graph, prompts.target)
    candidates = {}
    for arm, doc in (
        ("with_context", prompts.with_context),
        ("without_context", prompts.without_context),
    ):
        result = gateway.generate(
            GenerationRequest(
                system_text=doc.system_text(),
                user_text=doc.user_text(),
                max_words=template.total_budget,
                backend_id=gateway.backend.backend_id,
            )
        )
        explanation = fill_template(template, result.text, doc.contextualized)
        candidates[arm] = explanation.slot_content()
    return EvalSample(
        sample_id=prompts.sample_id,
        target=prompts.target,
        reference_text=reference,
        candidate_with_context=candidates["with_context"],
        candidate_without_context=candidates["without_context"],
        scores_with_context=score_all(reference, candidates["with_context"]),
        scores_without_context=score_all(reference, candidates["without_context"]),
    )


def run_experiment(
    graph: KnowledgeGraph,
    assignment: CommunityAssignment,
    paths: list[LearningPath],
    gateway: Gateway,
    template: ExplanationTemplate,
    config: ExperimentConfig = ExperimentConfig(),
) -> EvalReport:
    prepared = prepare_prompts(graph, assignment, paths, template, config)
    report = EvalReport()

    def evaluate_one(prompts: PreparedPrompts):
        try:
            return _run_sample(graph, prompts, gateway, template)
        except KgxplainError as exc:
            return EvalFailure(
                sample_id=prompts.sample_id,
                target=prompts.target,
                error_code=getattr(exc, "code", "error"),
                message=str(exc),
            )

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(evaluate_one, prepared))
    else:
        outcomes = [evaluate_one(p) for p in prepared]

    for outcome in outcomes:
        if isinstance(outcome, EvalSample):
            report.samples.append(outcome)
        else:
            report.failures.append(outcome)
    # order independent of evaluation concurrency
    report.samples.sort(key=lambda s: s.sample_id)
    report.failures.sort(key=lambda f: f.sample_id)
    report.aggregates = compute_aggregates(report.samples)
    return report


def compute_aggregates(samples: list[EvalSample]) -> dict:
    aggregates: dict[str, dict[str, dict[str, float]]] = {}
    for variant in VARIANTS:
        aggregates[variant] = {}
        for arm in ARMS:
            sums = {m: 0.0 for m in MEASURES}
            for sample in samples:
                report = (
                    sample.scores_with_context
                    if arm == "with_context"
                    else sample.scores_without_context
                )
                score: RougeScore = getattr(report, variant)
                sums["recall"] += score.recall
                sums["precision"] += score.precision
                sums["f1"] += score.f1
            n = len(samples)
            aggregates[variant][arm] = {
                m: (sums[m] / n if n else 0.0) for m in MEASURES
            }
    return aggregates


# -- export ------------------------------------------------------------------

def _score_dict(report: RougeReport) -> dict:
    return report.as_dict()


def _score_from_dict(d: dict) -> RougeReport:
    return RougeReport(
        **{
            v: RougeScore(
                recall=d[v]["recall"], precision=d[v]["precision"], f1=d[v]["f1"]
            )
            for v in VARIANTS
        }
    )


def to_json(report: EvalReport) -> str:
    """Lossless machine-readable dump (round-trips via from_json)."""
    payload = {
        "samples": [
            {
                "sample_id": s.sample_id,
                "target": s.target,
                "reference_text": s.reference_text,
                "candidate_with_context": s.candidate_with_context,
                "candidate_without_context": s.candidate_without_context,
                "scores_with_context": _score_dict(s.scores_with_context),
                "scores_without_context": _score_dict(s.scores_without_context),
            }
            for s in report.samples
        ],
        "failures": [
            {
                "sample_id": f.sample_id,
                "target": f.target,
                "error_code": f.error_code,
                "message": f.message,
            }
            for f in report.failures
        ],
        "aggregates": report.aggregates,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def from_json(text: str) -> EvalReport:
    payload = json.loads(text)
    report = EvalReport(
        samples=[
            EvalSample(
                sample_id=s["sample_id"],
                target=s["target"],
                reference_text=s["reference_text"],
                candidate_with_context=s["candidate_with_context"],
                candidate_without_context=s["candidate_without_context"],
                scores_with_context=_score_from_dict(s["scores_with_context"]),
                scores_without_context=_score_from_dict(s["scores_without_context"]),
            )
            for s in payload["samples"]
        ],
        failures=[EvalFailure(**f) for f in payload["failures"]],
        aggregates=payload["aggregates"],
    )
    return report


def to_csv(report: EvalReport) -> str:
    """Per-sample scores, one row per sample/variant/arm."""
    lines = ["sample_id,variant,arm,recall,precision,f1"]
    for s in report.samples:
        for variant in VARIANTS:
            for arm, scores in (
                ("with_context", s.scores_with_context),
                ("without_context", s.scores_without_context),
            ):
                score: RougeScore = getattr(scores, variant)
                lines.append(
                    f"{s.sample_id},{variant},{arm},"
                    f"{score.recall:.6f},{score.precision:.6f},{score.f1:.6f}"
                )
    return "\n".join(lines) + "\n"


def to_table(report: EvalReport) -> str:
    """Aligned human-readable aggregate table (variant x arm x measures)."""
    header = f"{'variant':<10} {'arm':<16} {'recall':>8} {'precision':>10} {'f1':>8}"
    lines = [header, "-" * len(header)]
    for variant in VARIANTS:
        for arm in ARMS:
            agg = report.aggregates.get(variant, {}).get(arm)
            if agg is None:
                continue
            lines.append(
                f"{variant:<10} {arm:<16} "
                f"{agg['recall']:>8.4f} {agg['precision']:>10.4f} {agg['f1']:>8.4f}"
            )
    lines.append("")
    lines.append(
        f"scored samples: {report.scored_count}, failures: {len(report.failures)}"
    )
    return "\n".join(lines) + "\n"


def export_report(report: EvalReport, stream: IO[str], format: str = "table") -> None:
    if format == "table":
        stream.write(to_table(report))
    elif format == "json":
        stream.write(to_json(report))
    elif format == "csv":
        stream.write(to_csv(report))
    else:
        raise ValueError(f"unknown report format {format!r}")
