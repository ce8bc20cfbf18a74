"""Knowledge-graph grounded explanations for learning-path recommendations."""

from .communities import CommunityAssignment, community_of, detect_communities
from .context import ContextBundle, ContextLimits, ContextText, assemble, render
from .evaluate import EvalReport, build_reference, run_experiment
from .gateway import Gateway, GenerationRequest, MockBackend, RemoteBackend
from .kg import (
    Edge,
    KnowledgeGraph,
    Node,
    SemanticSimilar,
    TaxonomyChild,
    TaxonomyLevel,
    load,
    save,
)
from .prompting import (
    DefinitionEntry,
    Explanation,
    ExplanationTemplate,
    PromptDocument,
    RoleSpec,
    build_prompt,
    fill_template,
)
from .recommender import LearningPath, RecommenderConfig, path_rationale, recommend_path
from .relations import SimilarityConfig, extract_relations, similarity, tokenize
from .rouge import RougeReport, RougeScore, rouge_l, rouge_lsum, rouge_n, score_all

__version__ = "0.1.0"

__all__ = [
    "CommunityAssignment", "community_of", "detect_communities",
    "ContextBundle", "ContextLimits", "ContextText", "assemble", "render",
    "EvalReport", "build_reference", "run_experiment",
    "Gateway", "GenerationRequest", "MockBackend", "RemoteBackend",
    "Edge", "KnowledgeGraph", "Node", "SemanticSimilar", "TaxonomyChild",
    "TaxonomyLevel", "load", "save",
    "DefinitionEntry", "Explanation", "ExplanationTemplate", "PromptDocument",
    "RoleSpec", "build_prompt", "fill_template",
    "LearningPath", "RecommenderConfig", "path_rationale", "recommend_path",
    "SimilarityConfig", "extract_relations", "similarity", "tokenize",
    "RougeReport", "RougeScore", "rouge_l", "rouge_lsum", "rouge_n", "score_all",
    "__version__",
]
