"""Typed knowledge graph of educational content.

Nodes are learning goals and learning objects (courses, topics, OERs)
arranged in a four-level taxonomy forest, plus undirected weighted
semantic-similarity edges between learning objects. Graphs are built
single-writer and treated as immutable afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional, Union

from .errors import (
    DuplicateEdge,
    DuplicateNodeId,
    InvariantViolation,
    LevelOrderViolation,
    ParseError,
    TaxonomyCycle,
    UnknownEndpoint,
    UnknownNode,
)

NodeId = str


class TaxonomyLevel(Enum):
    LEARNING_GOAL = "learning_goal"
    COURSE = "course"
    TOPIC = "topic"
    OER = "oer"

    @property
    def depth(self) -> int:
        return _LEVEL_DEPTH[self]


_LEVEL_DEPTH = {
    TaxonomyLevel.LEARNING_GOAL: 0,
    TaxonomyLevel.COURSE: 1,
    TaxonomyLevel.TOPIC: 2,
    TaxonomyLevel.OER: 3,
}

#: Levels that count as learning objects (everything below the goal level).
LEARNING_OBJECT_LEVELS = frozenset(
    {TaxonomyLevel.COURSE, TaxonomyLevel.TOPIC, TaxonomyLevel.OER}
)


@dataclass(frozen=True)
class Node:
    id: NodeId
    level: TaxonomyLevel
    title: str
    description: str = ""
    reflection_info: str = ""
    keywords: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise InvariantViolation("node id must be non-empty")
        if not self.title:
            raise InvariantViolation(f"node {self.id!r}: title must be non-empty")

    @property
    def is_learning_object(self) -> bool:
        return self.level in LEARNING_OBJECT_LEVELS


class TaxonomyChild:
    """Marker for parent->child curriculum edges (no weight)."""

    def __repr__(self):
        return "TaxonomyChild()"

    def __eq__(self, other):
        return isinstance(other, TaxonomyChild)

    def __hash__(self):
        return hash(TaxonomyChild)


@dataclass(frozen=True)
class SemanticSimilar:
    """Symmetric similarity relation with weight in (0, 1]."""

    weight: float

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise InvariantViolation(
                f"semantic weight must be in (0, 1], got {self.weight}"
            )


RelationKind = Union[TaxonomyChild, SemanticSimilar]


@dataclass(frozen=True)
class Edge:
    head: NodeId
    tail: NodeId
    kind: RelationKind

    def __post_init__(self):
        if self.head == self.tail:
            raise InvariantViolation(f"self-loop on {self.head!r} not allowed")


class KnowledgeGraph:
    """Triple store: nodes plus taxonomy and semantic edges.

    Taxonomy edges form a level-ordered forest (each node has at most one
    parent, parent level strictly above child level). Semantic edges are
    stored once per unordered pair and queried symmetrically.
    """

    def __init__(self):
        self._nodes: dict[NodeId, Node] = {}
        self._parent: dict[NodeId, NodeId] = {}
        self._children: dict[NodeId, list[NodeId]] = {}
        # canonical key: (min(a,b), max(a,b)) -> weight
        self._semantic: dict[tuple[NodeId, NodeId], float] = {}

    # -- construction -------------------------------------------------------

    def add_node(self, node: Node) -> None:
        if node.id in self._nodes:
            raise DuplicateNodeId(f"node {node.id!r} already present")
        self._nodes[node.id] = node

    def add_edge(self, edge: Edge) -> None:
        for end in (edge.head, edge.tail):
            if end not in self._nodes:
                raise UnknownEndpoint(f"edge endpoint {end!r} not in graph")
        if isinstance(edge.kind, TaxonomyChild):
            self._add_taxonomy_edge(edge.head, edge.tail)
        else:
            self._add_semantic_edge(edge.head, edge.tail, edge.kind.weight)

    def _add_taxonomy_edge(self, parent: NodeId, child: NodeId) -> None:
        if self._parent.get(child) == parent:
            raise DuplicateEdge(f"taxonomy edge {parent!r}->{child!r} already present")
        if child in self._parent:
            raise InvariantViolation(
                f"node {child!r} already has taxonomy parent {self._parent[child]!r}"
            )
        p_level = self._nodes[parent].level
        c_level = self._nodes[child].level
        if p_level.depth >= c_level.depth:
            raise LevelOrderViolation(
                f"{p_level.value} node {parent!r} cannot parent "
                f"{c_level.value} node {child!r}"
            )
        # level order makes cycles impossible, but guard against future edits
        ancestor = parent
        while ancestor is not None:
            if ancestor == child:
                raise TaxonomyCycle(f"taxonomy cycle through {child!r}")
            ancestor = self._parent.get(ancestor)
        self._parent[child] = parent
        self._children.setdefault(parent, []).append(child)

    def _add_semantic_edge(self, a: NodeId, b: NodeId, weight: float) -> None:
        key = (a, b) if a < b else (b, a)
        if key in self._semantic:
            raise DuplicateEdge(f"semantic edge {key[0]!r}-{key[1]!r} already present")
        self._semantic[key] = weight

    # -- queries ------------------------------------------------------------

    def __contains__(self, node_id: NodeId) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, node_id: NodeId) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node {node_id!r}") from None

    def node_ids(self) -> list[NodeId]:
        return sorted(self._nodes)

    def nodes(self) -> list[Node]:
        return [self._nodes[i] for i in self.node_ids()]

    def learning_objects(self) -> list[Node]:
        return [n for n in self.nodes() if n.is_learning_object]

    def edges(self) -> list[Edge]:
        out = [
            Edge(parent, child, TaxonomyChild())
            for child, parent in sorted(self._parent.items())
        ]
        out.extend(
            Edge(a, b, SemanticSimilar(w)) for (a, b), w in sorted(self._semantic.items())
        )
        return out

    def taxonomy_parent(self, node_id: NodeId) -> Optional[NodeId]:
        self.node(node_id)
        return self._parent.get(node_id)

    def taxonomy_children(self, node_id: NodeId) -> list[NodeId]:
        self.node(node_id)
        return sorted(self._children.get(node_id, []))

    def parent_chain(self, node_id: NodeId) -> list[NodeId]:
        """Ancestors of ``node_id`` ordered root-first; [] for a root."""
        self.node(node_id)
        chain = []
        current = self._parent.get(node_id)
        while current is not None:
            chain.append(current)
            current = self._parent.get(current)
        chain.reverse()
        return chain

    def taxonomy_root(self, node_id: NodeId) -> NodeId:
        chain = self.parent_chain(node_id)
        return chain[0] if chain else node_id

    def neighbors(
        self, node_id: NodeId, kind_filter: Optional[type] = None
    ) -> list[tuple[NodeId, RelationKind]]:
        """All edges incident to ``node_id``; semantic edges in both directions."""
        self.node(node_id)
        out: list[tuple[NodeId, RelationKind]] = []
        if kind_filter is None or kind_filter is TaxonomyChild:
            parent = self._parent.get(node_id)
            if parent is not None:
                out.append((parent, TaxonomyChild()))
            for child in self._children.get(node_id, []):
                out.append((child, TaxonomyChild()))
        if kind_filter is None or kind_filter is SemanticSimilar:
            for (a, b), w in self._semantic.items():
                if a == node_id:
                    out.append((b, SemanticSimilar(w)))
                elif b == node_id:
                    out.append((a, SemanticSimilar(w)))
        out.sort(key=lambda pair: pair[0])
        return out

    def semantic_neighbors(self, node_id: NodeId) -> list[tuple[NodeId, float]]:
        return [
            (other, kind.weight)
            for other, kind in self.neighbors(node_id, SemanticSimilar)
        ]

    def semantic_weight(self, a: NodeId, b: NodeId) -> Optional[float]:
        key = (a, b) if a < b else (b, a)
        return self._semantic.get(key)

    def connected(self, a: NodeId, b: NodeId) -> bool:
        """True if any edge (taxonomy either direction, or semantic) joins a and b."""
        if self.semantic_weight(a, b) is not None:
            return True
        return self._parent.get(a) == b or self._parent.get(b) == a

    # -- equality & copying --------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._parent == other._parent
            and self._semantic == other._semantic
        )

    def copy(self) -> "KnowledgeGraph":
        g = KnowledgeGraph()
        g._nodes = dict(self._nodes)
        g._parent = dict(self._parent)
        g._children = {k: list(v) for k, v in self._children.items()}
        g._semantic = dict(self._semantic)
        return g


# -- persistence: one JSON object per line ----------------------------------
#
# node record: {"record": "node", "id", "level", "title", "description",
#               "reflection_info", "keywords"}
# edge record: {"record": "edge", "head", "tail", "kind", "weight"?}
# kind is "taxonomy_child" or "semantic_similar"; level uses the
# TaxonomyLevel values. Unknown levels/kinds are rejected.

_LEVELS = {lvl.value: lvl for lvl in TaxonomyLevel}


def save(graph: KnowledgeGraph, stream: IO[str]) -> None:
    for node in graph.nodes():
        stream.write(
            json.dumps(
                {
                    "record": "node",
                    "id": node.id,
                    "level": node.level.value,
                    "title": node.title,
                    "description": node.description,
                    "reflection_info": node.reflection_info,
                    "keywords": list(node.keywords),
                },
                sort_keys=True,
            )
            + "\n"
        )
    for edge in graph.edges():
        rec = {"record": "edge", "head": edge.head, "tail": edge.tail}
        if isinstance(edge.kind, TaxonomyChild):
            rec["kind"] = "taxonomy_child"
        else:
            rec["kind"] = "semantic_similar"
            rec["weight"] = edge.kind.weight
        stream.write(json.dumps(rec, sort_keys=True) + "\n")


def load(stream: IO[str]) -> KnowledgeGraph:
    graph = KnowledgeGraph()
    pending_edges: list[tuple[int, Edge]] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        if not isinstance(rec, dict):
            raise ParseError("record must be a JSON object", line=lineno)
        kind = rec.get("record")
        if kind == "node":
            graph.add_node(_parse_node(rec, lineno))
        elif kind == "edge":
            pending_edges.append((lineno, _parse_edge(rec, lineno)))
        else:
            raise ParseError(f"unknown record type {kind!r}", line=lineno, field="record")
    for lineno, edge in pending_edges:
        try:
            graph.add_edge(edge)
        except (UnknownEndpoint, LevelOrderViolation, DuplicateEdge, InvariantViolation) as exc:
            raise InvariantViolation(f"line {lineno}: {exc}") from exc
    return graph


def _require(rec: dict, key: str, lineno: int) -> object:
    if key not in rec:
        raise ParseError("missing field", line=lineno, field=key)
    return rec[key]


def _parse_node(rec: dict, lineno: int) -> Node:
    level_name = _require(rec, "level", lineno)
    if level_name not in _LEVELS:
        raise ParseError(f"unknown level {level_name!r}", line=lineno, field="level")
    keywords = rec.get("keywords", [])
    if not isinstance(keywords, list):
        raise ParseError("keywords must be a list", line=lineno, field="keywords")
    try:
        return Node(
            id=str(_require(rec, "id", lineno)),
            level=_LEVELS[level_name],
            title=str(_require(rec, "title", lineno)),
            description=str(rec.get("description", "")),
            reflection_info=str(rec.get("reflection_info", "")),
            keywords=tuple(str(k) for k in keywords),
        )
    except InvariantViolation as exc:
        raise ParseError(str(exc), line=lineno) from exc


def _parse_edge(rec: dict, lineno: int) -> Edge:
    head = str(_require(rec, "head", lineno))
    tail = str(_require(rec, "tail", lineno))
    kind_name = _require(rec, "kind", lineno)
    try:
        if kind_name == "taxonomy_child":
            return Edge(head, tail, TaxonomyChild())
        if kind_name == "semantic_similar":
            return Edge(head, tail, SemanticSimilar(float(_require(rec, "weight", lineno))))
    except InvariantViolation as exc:
        raise ParseError(str(exc), line=lineno) from exc
    raise ParseError(f"unknown edge kind {kind_name!r}", line=lineno, field="kind")


def save_file(graph: KnowledgeGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        save(graph, fh)


def load_file(path) -> KnowledgeGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return load(fh)
