"""Baseline learning-path recommendation.

Exhaustive bounded search over simple paths, maximizing discounted
cumulative reward. Stands in for a full MDP recommender behind the same
interface: traversing a taxonomy edge (either direction) earns a fixed
reward, a semantic edge earns its weight scaled, and ending inside the
goal's subtree earns a terminal bonus. All rewards for step j are
discounted by discount**j (the terminal bonus by the final step's
discount).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidPath, NoPathFound, NotAGoal
from .kg import KnowledgeGraph, NodeId, TaxonomyLevel


@dataclass(frozen=True)
class RecommenderConfig:
    discount: float = 0.9
    max_path_len: int = 6  # maximum number of nodes on the path
    taxonomy_step_reward: float = 1.0
    similarity_reward_scale: float = 1.0
    goal_reward: float = 5.0

    def __post_init__(self):
        if not (0.0 < self.discount < 1.0):
            raise ValueError(f"discount must be in (0, 1), got {self.discount}")
        if self.max_path_len < 1:
            raise ValueError("max_path_len must be >= 1")
        if self.goal_reward <= 0:
            raise ValueError("goal_reward must be > 0")


DEFAULT_RECOMMENDER_CONFIG = RecommenderConfig()


@dataclass(frozen=True)
class LearningPath:
    steps: tuple[NodeId, ...]
    goal: NodeId
    step_scores: tuple[float, ...]  # one per transition

    def __post_init__(self):
        if not self.steps:
            raise InvalidPath("path must contain at least one node")
        if len(self.step_scores) != len(self.steps) - 1:
            raise InvalidPath("step_scores must have one entry per transition")

    @property
    def total_score(self) -> float:
        return sum(self.step_scores)


@dataclass(frozen=True)
class StepFacts:
    node: NodeId
    edge_kind: str  # "start" | "taxonomy_child" | "semantic_similar"
    edge_weight: float | None
    score_contribution: float
    parent_chain: tuple[NodeId, ...]


def _step_reward(graph: KnowledgeGraph, a: NodeId, b: NodeId, cfg: RecommenderConfig) -> float | None:
    """Undiscounted reward for moving a -> b, or None if not adjacent."""
    weight = graph.semantic_weight(a, b)
    if weight is not None:
        return weight * cfg.similarity_reward_scale
    if graph.taxonomy_parent(a) == b or graph.taxonomy_parent(b) == a:
        return cfg.taxonomy_step_reward
    return None


def path_score(
    graph: KnowledgeGraph, steps: list[NodeId], goal: NodeId, cfg: RecommenderConfig
) -> tuple[float, list[float]]:
    """Discounted score of a candidate path ending in the goal's subtree."""
    scores = []
    for j in range(1, len(steps)):
        reward = _step_reward(graph, steps[j - 1], steps[j], cfg)
        if reward is None:
            raise InvalidPath(f"no edge between {steps[j - 1]!r} and {steps[j]!r}")
        scores.append(reward * cfg.discount ** (j - 1))
    terminal = steps[-1]
    if terminal == goal or graph.taxonomy_root(terminal) == goal:
        scores.append(cfg.goal_reward * cfg.discount ** (len(steps) - 1))
    return sum(scores), scores


def recommend_path(
    graph: KnowledgeGraph,
    start: NodeId,
    goal: NodeId,
    cfg: RecommenderConfig = DEFAULT_RECOMMENDER_CONFIG,
) -> LearningPath:
    """Best simple path from start into the goal's subtree.

    Exhaustive depth-first enumeration of simple paths with at most
    ``cfg.max_path_len`` nodes. Ties broken by shorter path, then by
    lexicographic node-id sequence.
    """
    graph.node(start)
    goal_node = graph.node(goal)
    if goal_node.level is not TaxonomyLevel.LEARNING_GOAL:
        raise NotAGoal(f"node {goal!r} is a {goal_node.level.value}, not a learning goal")

    in_subtree = {
        n: (n == goal or graph.taxonomy_root(n) == goal) for n in graph.node_ids()
    }

    best: tuple[float, int, tuple[NodeId, ...]] | None = None
    path = [start]
    on_path = {start}

    def consider():
        nonlocal best
        if not in_subtree[path[-1]]:
            return
        total, _ = path_score(graph, path, goal, cfg)
        key = (-total, len(path), tuple(path))
        if best is None or key < (best[0], best[1], best[2]):
            best = key

    def walk():
        consider()
        if len(path) >= cfg.max_path_len:
            return
        for nxt, _kind in graph.neighbors(path[-1]):
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            walk()
            on_path.remove(nxt)
            path.pop()

    walk()
    if best is None:
        raise NoPathFound(
            f"no simple path of <= {cfg.max_path_len} nodes from {start!r} "
            f"reaches the subtree of goal {goal!r}"
        )
    steps = best[2]
    _, scores = path_score(graph, list(steps), goal, cfg)
    # fold the terminal goal bonus into the final transition's score;
    # a single-node path keeps no transition scores
    if len(steps) == 1:
        transition_scores: list[float] = []
    else:
        transition_scores = scores[:-2] + [scores[-2] + scores[-1]]
    return LearningPath(steps=steps, goal=goal, step_scores=tuple(transition_scores))


def path_rationale(graph: KnowledgeGraph, path: LearningPath) -> list[StepFacts]:
    """Raw per-step facts the explanation pipeline verbalizes."""
    for node_id in path.steps:
        graph.node(node_id)
    facts = [
        StepFacts(
            node=path.steps[0],
            edge_kind="start",
            edge_weight=None,
            score_contribution=0.0,
            parent_chain=tuple(graph.parent_chain(path.steps[0])),
        )
    ]
    for j in range(1, len(path.steps)):
        a, b = path.steps[j - 1], path.steps[j]
        weight = graph.semantic_weight(a, b)
        if weight is not None:
            kind = "semantic_similar"
        elif graph.taxonomy_parent(a) == b or graph.taxonomy_parent(b) == a:
            kind = "taxonomy_child"
        else:
            raise InvalidPath(f"no edge between {a!r} and {b!r}")
        facts.append(
            StepFacts(
                node=b,
                edge_kind=kind,
                edge_weight=weight,
                score_contribution=path.step_scores[j - 1],
                parent_chain=tuple(graph.parent_chain(b)),
            )
        )
    return facts
