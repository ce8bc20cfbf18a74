"""Deterministic synthetic corpus for desk-scale evaluation.

Three subject themes, each spanning two course subtrees under different
learning goals, give the relation extractor dense intra-theme vocabulary
overlap and the recommender cross-goal semantic shortcuts. Theme
sentences use a closed technical vocabulary that is disjoint from the
mock backend's filler phrases, so non-contextualized candidates share no
tokens with the reference texts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kg import Edge, KnowledgeGraph, Node, NodeId, TaxonomyChild, TaxonomyLevel

# Each theme: (name, keywords, sentence pool). The pool vocabulary must
# stay disjoint from gateway.FILLER_PHRASES (asserted in tests).
_THEMES = (
    (
        "statistics",
        ("statistics", "distribution", "inference"),
        (
            "Histograms summarize numeric distributions of measured samples.",
            "Variance quantifies dispersion around the sample mean.",
            "Confidence intervals bound plausible parameter values statistically.",
            "Hypothesis tests weigh observed evidence against null assumptions.",
            "Regression fits linear relationships between measured variables.",
            "Correlation coefficients gauge association strength between variables.",
            "Sampling bias distorts inference from unrepresentative observations.",
            "Bayesian updating revises probabilities given observed evidence.",
        ),
    ),
    (
        "graphs",
        ("graph", "network", "traversal"),
        (
            "Adjacency structures encode pairwise connections between vertices.",
            "Breadth-first traversal visits vertices in expanding frontier layers.",
            "Depth-first traversal explores branches fully prior to backtracking.",
            "Edge weights model traversal costs between connected vertices.",
            "Spanning trees connect all vertices using minimal total weight.",
            "Centrality measures rank influential vertices within networks.",
            "Connected components partition vertices into reachable clusters.",
            "Topological ordering sequences vertices of directed acyclic networks.",
        ),
    ),
    (
        "optimization",
        ("optimization", "gradient", "convergence"),
        (
            "Gradient descent iteratively reduces differentiable objective functions.",
            "Convexity guarantees global minima of bounded objective functions.",
            "Stochastic updates trade precise gradients for computational economy.",
            "Momentum accelerates convergence along persistent descent directions.",
            "Regularization penalizes complexity within fitted objective functions.",
            "Constraint multipliers incorporate feasibility conditions into objectives.",
            "Line searches select productive stride magnitudes per iteration.",
            "Convergence diagnostics monitor stagnating objective improvements.",
        ),
    ),
)

_GOAL_TITLES = (
    "Quantitative Reasoning Goal",
    "Computational Structures Goal",
    "Model Fitting Goal",
)

# course-subtree layout: course index -> (goal index, theme index)
# each theme spans two courses under different goals
_COURSE_PLAN = (
    (0, 0), (0, 1),
    (1, 0), (1, 2),
    (2, 1), (2, 2),
)


@dataclass(frozen=True)
class PathRequest:
    start: NodeId
    goal: NodeId


def build_synthetic_graph() -> KnowledgeGraph:
    """45 nodes: 3 goals, 6 courses, 12 topics, 24 OERs (42 LOs)."""
    graph = KnowledgeGraph()
    for g, title in enumerate(_GOAL_TITLES):
        graph.add_node(
            Node(
                id=f"goal{g}",
                level=TaxonomyLevel.LEARNING_GOAL,
                title=title,
                description="",
            )
        )

    theme_counters = [0, 0, 0]
    for c, (goal_index, theme_index) in enumerate(_COURSE_PLAN):
        name, keywords, pool = _THEMES[theme_index]
        course_id = f"course{c}"
        _add_lo(
            graph, course_id, TaxonomyLevel.COURSE,
            f"{name.capitalize()} Course {c}", theme_index, theme_counters, keywords,
        )
        graph.add_edge(Edge(f"goal{goal_index}", course_id, TaxonomyChild()))
        for t in range(2):
            topic_id = f"{course_id}_topic{t}"
            _add_lo(
                graph, topic_id, TaxonomyLevel.TOPIC,
                f"{name.capitalize()} Topic {c}.{t}", theme_index, theme_counters, keywords,
            )
            graph.add_edge(Edge(course_id, topic_id, TaxonomyChild()))
            for o in range(2):
                oer_id = f"{topic_id}_oer{o}"
                _add_lo(
                    graph, oer_id, TaxonomyLevel.OER,
                    f"{name.capitalize()} Resource {c}.{t}.{o}", theme_index,
                    theme_counters, keywords,
                )
                graph.add_edge(Edge(topic_id, oer_id, TaxonomyChild()))
    return graph


def _add_lo(graph, node_id, level, title, theme_index, theme_counters, keywords):
    _, _, pool = _THEMES[theme_index]
    k = theme_counters[theme_index]
    theme_counters[theme_index] += 1
    description = " ".join(pool[(k + offset) % len(pool)] for offset in range(3))
    reflection = pool[(k + 3) % len(pool)]
    graph.add_node(
        Node(
            id=node_id,
            level=level,
            title=title,
            description=description,
            reflection_info=reflection,
            keywords=tuple(keywords),
        )
    )


def default_path_requests() -> list[PathRequest]:
    """Twelve recommendation requests: OER starts crossing into each theme's
    partner subtree, plus within-goal climbs."""
    requests = []
    for c, (goal_index, theme_index) in enumerate(_COURSE_PLAN):
        partner = next(
            other
            for other, (og, ot) in enumerate(_COURSE_PLAN)
            if ot == theme_index and other != c
        )
        partner_goal = _COURSE_PLAN[partner][0]
        requests.append(PathRequest(start=f"course{c}_topic0_oer0", goal=f"goal{partner_goal}"))
        requests.append(PathRequest(start=f"course{c}_topic1_oer1", goal=f"goal{goal_index}"))
    return requests


def corpus_vocabulary() -> set[str]:
    """Every token appearing in theme descriptions and reflections."""
    from .relations import tokenize

    vocab: set[str] = set()
    for _, keywords, pool in _THEMES:
        for sentence in pool:
            vocab.update(tokenize(sentence))
        for kw in keywords:
            vocab.update(tokenize(kw))
    return vocab
