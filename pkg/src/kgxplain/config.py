"""YAML configuration shared by the CLI and the HTTP service.

All sections are optional; omitted keys fall back to the documented
defaults. Role, definitions, and the explanation template live here so
domain experts can edit them without touching code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .context import ContextLimits
from .gateway import RemoteConfig
from .prompting import (
    DEFAULT_DEFINITIONS,
    DEFAULT_ROLE,
    DEFAULT_TEMPLATE,
    DefinitionEntry,
    ExplanationTemplate,
    RoleSpec,
)
from .recommender import RecommenderConfig
from .relations import SimilarityConfig


@dataclass
class AppConfig:
    similarity: SimilarityConfig = field(
        default_factory=lambda: SimilarityConfig(threshold=0.35, min_doc_tokens=3)
    )
    recommender: RecommenderConfig = field(default_factory=RecommenderConfig)
    limits: ContextLimits = field(default_factory=ContextLimits)
    backend: str = "mock"
    remote: RemoteConfig = field(default_factory=RemoteConfig)
    role: RoleSpec = DEFAULT_ROLE
    definitions: tuple[DefinitionEntry, ...] = DEFAULT_DEFINITIONS
    template: ExplanationTemplate = DEFAULT_TEMPLATE


def load_config(path: str | None) -> AppConfig:
    if path is None:
        return AppConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> AppConfig:
    cfg = AppConfig()
    sim = raw.get("similarity", {})
    cfg.similarity = SimilarityConfig(
        threshold=float(sim.get("threshold", cfg.similarity.threshold)),
        min_doc_tokens=int(sim.get("min_doc_tokens", cfg.similarity.min_doc_tokens)),
    )
    rec = raw.get("recommender", {})
    cfg.recommender = RecommenderConfig(
        discount=float(rec.get("discount", cfg.recommender.discount)),
        max_path_len=int(rec.get("max_path_len", cfg.recommender.max_path_len)),
        taxonomy_step_reward=float(
            rec.get("taxonomy_step_reward", cfg.recommender.taxonomy_step_reward)
        ),
        similarity_reward_scale=float(
            rec.get("similarity_reward_scale", cfg.recommender.similarity_reward_scale)
        ),
        goal_reward=float(rec.get("goal_reward", cfg.recommender.goal_reward)),
    )
    ctx = raw.get("context", {})
    cfg.limits = ContextLimits(
        max_neighbors=int(ctx.get("max_neighbors", cfg.limits.max_neighbors)),
        max_community=int(ctx.get("max_community", cfg.limits.max_community)),
        max_support=int(ctx.get("max_support", cfg.limits.max_support)),
    )
    backend = raw.get("backend", {})
    if isinstance(backend, str):
        cfg.backend = backend
    else:
        cfg.backend = backend.get("name", cfg.backend)
        cfg.remote = RemoteConfig(
            base_url=backend.get("base_url", cfg.remote.base_url),
            model_name=backend.get("model_name", cfg.remote.model_name),
            timeout_ms=int(backend.get("timeout_ms", cfg.remote.timeout_ms)),
            retries=int(backend.get("retries", cfg.remote.retries)),
            max_concurrency=int(
                backend.get("max_concurrency", cfg.remote.max_concurrency)
            ),
        )
    prompt = raw.get("prompt", {})
    if "role" in prompt:
        cfg.role = RoleSpec(persona=str(prompt["role"]))
    if "definitions" in prompt:
        cfg.definitions = tuple(
            DefinitionEntry(term=str(d["term"]), definition=str(d["definition"]))
            for d in prompt["definitions"]
        )
    template = prompt.get("template", {})
    if template:
        cfg.template = ExplanationTemplate(
            template_text=str(template.get("text", cfg.template.template_text)),
            slots=tuple(template.get("slots", cfg.template.slots)),
            word_budget=int(template.get("word_budget", cfg.template.word_budget)),
        )
    return cfg
