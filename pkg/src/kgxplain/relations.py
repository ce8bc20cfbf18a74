"""Semantic relation discovery between learning objects.

Documents are built from each LO's title, description, and keywords;
similarity is cosine over TF-IDF vectors (log-scaled term frequency,
smoothed inverse document frequency). An undirected edge is added for
every LO pair whose similarity is strictly above the configured
threshold.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyDocument, InvariantViolation
from .kg import Edge, KnowledgeGraph, Node, NodeId, SemanticSimilar

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; drops empty tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TokenizedDoc:
    source: NodeId
    tokens: tuple[str, ...]


def node_document(node: Node) -> TokenizedDoc:
    text = " ".join([node.title, node.description, *node.keywords])
    return TokenizedDoc(source=node.id, tokens=tuple(tokenize(text)))


@dataclass(frozen=True)
class SimilarityConfig:
    threshold: float = 0.35
    min_doc_tokens: int = 1

    def __post_init__(self):
        if not (0.0 <= self.threshold <= 1.0):
            raise InvariantViolation(f"threshold must be in [0, 1], got {self.threshold}")
        if self.min_doc_tokens < 1:
            raise InvariantViolation("min_doc_tokens must be >= 1")


DEFAULT_SIMILARITY_CONFIG = SimilarityConfig(threshold=0.35, min_doc_tokens=3)


def _idf(corpus: list[TokenizedDoc]) -> dict[str, float]:
    n_docs = len(corpus)
    doc_freq: Counter[str] = Counter()
    for doc in corpus:
        doc_freq.update(set(doc.tokens))
    # smoothed: log((1 + N) / (1 + df)) + 1, never zero
    return {
        term: math.log((1 + n_docs) / (1 + df)) + 1.0
        for term, df in doc_freq.items()
    }


def _tfidf_vector(doc: TokenizedDoc, idf: dict[str, float]) -> dict[str, float]:
    counts = Counter(doc.tokens)
    return {
        term: (1.0 + math.log(count)) * idf[term] for term, count in counts.items()
    }


def _cosine(u: dict[str, float], v: dict[str, float]) -> float:
    # summation in sorted term order keeps the result exactly symmetric
    dot = sum(u[t] * v[t] for t in sorted(u.keys() & v.keys()))
    if dot == 0.0:
        return 0.0
    norm_u = math.sqrt(sum(u[t] * u[t] for t in sorted(u)))
    norm_v = math.sqrt(sum(v[t] * v[t] for t in sorted(v)))
    return min(1.0, dot / (norm_u * norm_v))


def similarity(
    a: TokenizedDoc,
    b: TokenizedDoc,
    corpus: list[TokenizedDoc],
    cfg: SimilarityConfig = SimilarityConfig(),
) -> float:
    """Cosine TF-IDF similarity of two documents within ``corpus``."""
    for doc in (a, b):
        if len(doc.tokens) < cfg.min_doc_tokens:
            raise EmptyDocument(
                f"document {doc.source!r} has {len(doc.tokens)} tokens "
                f"(min {cfg.min_doc_tokens})"
            )
    if Counter(a.tokens) == Counter(b.tokens):
        return 1.0
    idf = _idf(corpus)
    return _cosine(_tfidf_vector(a, idf), _tfidf_vector(b, idf))


@dataclass(frozen=True)
class ExtractionResult:
    graph: KnowledgeGraph
    edges_added: int
    skipped: tuple[tuple[NodeId, str], ...]  # (node id, reason)


def extract_relations(
    graph: KnowledgeGraph, cfg: SimilarityConfig = DEFAULT_SIMILARITY_CONFIG
) -> ExtractionResult:
    """All-pairs similarity over LOs; edges for pairs strictly above threshold.

    Nodes with too little text are skipped and reported, never silently
    dropped. Taxonomy edges and existing semantic edges are untouched.
    """
    docs = []
    skipped = []
    for node in graph.learning_objects():
        doc = node_document(node)
        if len(doc.tokens) < cfg.min_doc_tokens:
            skipped.append((node.id, f"{len(doc.tokens)} tokens < {cfg.min_doc_tokens}"))
        else:
            docs.append(doc)

    idf = _idf(docs)
    vectors = {doc.source: _tfidf_vector(doc, idf) for doc in docs}
    bags = {doc.source: Counter(doc.tokens) for doc in docs}

    out = graph.copy()
    added = 0
    for i, a in enumerate(docs):
        for b in docs[i + 1:]:
            if bags[a.source] == bags[b.source]:
                sim = 1.0
            else:
                sim = _cosine(vectors[a.source], vectors[b.source])
            if sim > cfg.threshold and out.semantic_weight(a.source, b.source) is None:
                out.add_edge(Edge(a.source, b.source, SemanticSimilar(sim)))
                added += 1
    return ExtractionResult(graph=out, edges_added=added, skipped=tuple(skipped))
