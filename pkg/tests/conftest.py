import pytest

from kgxplain.communities import detect_communities
from kgxplain.corpus import build_synthetic_graph, default_path_requests
from kgxplain.kg import (
    Edge,
    KnowledgeGraph,
    Node,
    SemanticSimilar,
    TaxonomyChild,
    TaxonomyLevel,
)
from kgxplain.recommender import DEFAULT_RECOMMENDER_CONFIG, recommend_path
from kgxplain.relations import SimilarityConfig, extract_relations


def lo(node_id, level=TaxonomyLevel.OER, title=None, description="", reflection="", keywords=()):
    return Node(
        id=node_id,
        level=level,
        title=title or node_id.upper(),
        description=description,
        reflection_info=reflection,
        keywords=tuple(keywords),
    )


def chain_graph():
    """g1 -> c1 -> t1 -> o1 plus a second goal g2 -> c2."""
    g = KnowledgeGraph()
    g.add_node(lo("g1", TaxonomyLevel.LEARNING_GOAL, "Intro to AI"))
    g.add_node(lo("c1", TaxonomyLevel.COURSE, "ML Basics", description="Course desc."))
    g.add_node(lo("t1", TaxonomyLevel.TOPIC, "Regression", description="Topic desc."))
    g.add_node(
        lo(
            "o1",
            TaxonomyLevel.OER,
            "Linear Regression OER",
            description="Fits lines to data.",
            reflection="Consider residuals.",
        )
    )
    g.add_node(lo("g2", TaxonomyLevel.LEARNING_GOAL, "Other Goal"))
    g.add_node(lo("c2", TaxonomyLevel.COURSE, "Other Course", description="Other desc."))
    g.add_edge(Edge("g1", "c1", TaxonomyChild()))
    g.add_edge(Edge("c1", "t1", TaxonomyChild()))
    g.add_edge(Edge("t1", "o1", TaxonomyChild()))
    g.add_edge(Edge("g2", "c2", TaxonomyChild()))
    return g


def two_clique_graph():
    """Two 4-cliques of OERs joined by a single light edge."""
    g = KnowledgeGraph()
    members = [f"a{i}" for i in range(4)] + [f"b{i}" for i in range(4)]
    for m in members:
        g.add_node(lo(m, TaxonomyLevel.OER, m.upper(), description=f"About {m}."))
    for group in ("a", "b"):
        ids = [f"{group}{i}" for i in range(4)]
        for i in range(4):
            for j in range(i + 1, 4):
                g.add_edge(Edge(ids[i], ids[j], SemanticSimilar(1.0)))
    g.add_edge(Edge("a0", "b0", SemanticSimilar(0.2)))
    return g


@pytest.fixture
def chain():
    return chain_graph()


@pytest.fixture
def two_clique():
    return two_clique_graph()


@pytest.fixture(scope="session")
def corpus_graph():
    graph = build_synthetic_graph()
    return extract_relations(graph, SimilarityConfig(threshold=0.35, min_doc_tokens=3)).graph


@pytest.fixture(scope="session")
def corpus_assignment(corpus_graph):
    return detect_communities(corpus_graph)


@pytest.fixture(scope="session")
def corpus_paths(corpus_graph):
    return [
        recommend_path(corpus_graph, r.start, r.goal, DEFAULT_RECOMMENDER_CONFIG)
        for r in default_path_requests()
    ]
