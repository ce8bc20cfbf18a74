"""Community detection on the semantic-similarity subgraph.

Greedy agglomerative modularity maximization: starting from singletons,
repeatedly merge the community pair with the largest positive weighted
modularity gain, breaking ties by smallest member id. Taxonomy edges are
ignored; communities capture cross-curriculum fields of application.
Only learning objects participate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownNode
from .kg import KnowledgeGraph, NodeId


@dataclass(frozen=True)
class CommunityAssignment:
    partition: dict[NodeId, int]
    modularity: float

    def members(self, index: int) -> list[NodeId]:
        return sorted(n for n, c in self.partition.items() if c == index)


def weighted_modularity(
    graph: KnowledgeGraph, partition: dict[NodeId, int]
) -> float:
    """Newman weighted modularity of a partition over the semantic subgraph."""
    nodes = [n.id for n in graph.learning_objects()]
    edges = [
        (a, b, w)
        for a in nodes
        for b, w in graph.semantic_neighbors(a)
        if a < b
    ]
    two_m = 2.0 * sum(w for _, _, w in edges)
    if two_m == 0.0:
        return 0.0
    degree = {n: 0.0 for n in nodes}
    for a, b, w in edges:
        degree[a] += w
        degree[b] += w
    q = 0.0
    for a, b, w in edges:
        if partition[a] == partition[b]:
            q += 2.0 * w / two_m
    for n in nodes:
        same = [m for m in nodes if partition[m] == partition[n]]
        q -= degree[n] * sum(degree[m] for m in same) / (two_m * two_m)
    return q


def detect_communities(graph: KnowledgeGraph) -> CommunityAssignment:
    """Partition the LOs by greedy modularity merging; deterministic."""
    nodes = [n.id for n in graph.learning_objects()]
    if not nodes:
        return CommunityAssignment(partition={}, modularity=0.0)

    edges = [
        (a, b, w)
        for a in nodes
        for b, w in graph.semantic_neighbors(a)
        if a < b
    ]
    two_m = 2.0 * sum(w for _, _, w in edges)

    # communities keyed by their smallest member id
    comms: dict[NodeId, set[NodeId]] = {n: {n} for n in nodes}
    if two_m > 0.0:
        degree = {n: 0.0 for n in nodes}
        for a, b, w in edges:
            degree[a] += w
            degree[b] += w
        # weight between communities and total degree per community
        comm_of = {n: n for n in nodes}
        between: dict[tuple[NodeId, NodeId], float] = {}
        for a, b, w in edges:
            key = (a, b) if a < b else (b, a)
            between[key] = between.get(key, 0.0) + w
        comm_degree = {n: degree[n] for n in nodes}

        while True:
            best_gain = 0.0
            best_pair = None
            # sorted iteration: on gain ties the smallest (ca, cb) pair wins
            for (ca, cb), w in sorted(between.items()):
                # merging gain: 2*(w/2m - deg_a*deg_b/(2m)^2)
                gain = 2.0 * (w / two_m - comm_degree[ca] * comm_degree[cb] / (two_m * two_m))
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_pair = (ca, cb)
            if best_pair is None:
                break
            ca, cb = best_pair  # ca < cb; merged community keeps key ca
            comms[ca] |= comms.pop(cb)
            for n in comms[ca]:
                comm_of[n] = ca
            comm_degree[ca] += comm_degree.pop(cb)
            merged: dict[tuple[NodeId, NodeId], float] = {}
            for (x, y), w in between.items():
                if (x, y) == (ca, cb):
                    continue
                x = ca if x == cb else x
                y = ca if y == cb else y
                key = (x, y) if x < y else (y, x)
                merged[key] = merged.get(key, 0.0) + w
            between = merged

    # dense indices ordered by smallest member id
    ordered = sorted(comms.values(), key=min)
    partition = {n: idx for idx, members in enumerate(ordered) for n in members}
    return CommunityAssignment(
        partition=partition, modularity=weighted_modularity(graph, partition)
    )


def community_of(assignment: CommunityAssignment, node_id: NodeId) -> list[NodeId]:
    """All members of ``node_id``'s community, sorted for determinism."""
    if node_id not in assignment.partition:
        raise UnknownNode(f"node {node_id!r} has no community assignment")
    return assignment.members(assignment.partition[node_id])
