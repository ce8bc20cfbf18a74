"""Context extraction for one recommended learning object.

Pulls four kinds of information from the graph: curriculum placement,
semantic neighbors, community co-members, and supporting metadata from
the connected LOs, then renders them as fixed, labeled text sections for
the prompt.
"""

from __future__ import annotations

from dataclasses import dataclass

from .communities import CommunityAssignment, community_of
from .errors import NotALearningObject
from .kg import KnowledgeGraph, NodeId, TaxonomyLevel

SECTION_LABELS = ("HIERARCHY", "RELATED", "COMMUNITY", "SUPPORTING")


@dataclass(frozen=True)
class ContextLimits:
    max_neighbors: int = 5
    max_community: int = 5
    max_support: int = 3


DEFAULT_CONTEXT_LIMITS = ContextLimits()


@dataclass(frozen=True)
class ContextBundle:
    target: NodeId
    hierarchy: tuple[tuple[NodeId, TaxonomyLevel, str], ...]  # root-first, incl. target
    semantic_neighbors: tuple[tuple[NodeId, float, str], ...]
    community_members: tuple[tuple[NodeId, str], ...]
    supporting_metadata: tuple[tuple[NodeId, str, str], ...]  # (id, description, reflection)


@dataclass(frozen=True)
class ContextText:
    sections: tuple[tuple[str, str], ...]

    def section(self, label: str) -> str:
        for name, text in self.sections:
            if name == label:
                return text
        raise KeyError(label)


def assemble(
    graph: KnowledgeGraph,
    assignment: CommunityAssignment,
    target: NodeId,
    limits: ContextLimits = DEFAULT_CONTEXT_LIMITS,
) -> ContextBundle:
    node = graph.node(target)
    if not node.is_learning_object:
        raise NotALearningObject(f"{target!r} is a {node.level.value}")

    chain = graph.parent_chain(target) + [target]
    hierarchy = tuple(
        (nid, graph.node(nid).level, graph.node(nid).title) for nid in chain
    )

    neighbors = sorted(
        graph.semantic_neighbors(target), key=lambda nw: (-nw[1], nw[0])
    )[: limits.max_neighbors]
    semantic_neighbors = tuple(
        (nid, weight, graph.node(nid).title) for nid, weight in neighbors
    )

    if target in assignment.partition:
        members = [m for m in community_of(assignment, target) if m != target]
    else:
        members = []
    community_members = tuple(
        (m, graph.node(m).title) for m in members[: limits.max_community]
    )

    # supporting metadata ranked by semantic weight, then community
    # co-membership, then id; drawn only from neighbors and co-members
    weight_of = dict(graph.semantic_neighbors(target))
    candidates = {nid for nid, _, _ in semantic_neighbors}
    candidates.update(m for m, _ in community_members)
    ranked = sorted(
        candidates,
        key=lambda nid: (-weight_of.get(nid, 0.0), nid not in dict(community_members), nid),
    )
    supporting = []
    for nid in ranked:
        other = graph.node(nid)
        if other.description or other.reflection_info:
            supporting.append((nid, other.description, other.reflection_info))
        if len(supporting) >= limits.max_support:
            break

    return ContextBundle(
        target=target,
        hierarchy=hierarchy,
        semantic_neighbors=semantic_neighbors,
        community_members=community_members,
        supporting_metadata=tuple(supporting),
    )


def render(bundle: ContextBundle) -> ContextText:
    """Deterministic four-section text rendering of a bundle."""
    hierarchy = " > ".join(title for _, _, title in bundle.hierarchy)
    related = "\n".join(
        f"{title} (similarity={weight:.4f})"
        for _, weight, title in bundle.semantic_neighbors
    )
    community = "\n".join(title for _, title in bundle.community_members)
    supporting_blocks = []
    for nid, description, reflection in bundle.supporting_metadata:
        block = f"{_title_of(bundle, nid)}: {description}".rstrip()
        if reflection:
            block += f" Reflection: {reflection}"
        supporting_blocks.append(block)
    supporting = "\n".join(supporting_blocks)
    return ContextText(
        sections=(
            ("HIERARCHY", hierarchy),
            ("RELATED", related),
            ("COMMUNITY", community),
            ("SUPPORTING", supporting),
        )
    )


def _title_of(bundle: ContextBundle, nid: NodeId) -> str:
    for other, _, title in bundle.semantic_neighbors:
        if other == nid:
            return title
    for other, title in bundle.community_members:
        if other == nid:
            return title
    return nid


def render_text(text: ContextText) -> str:
    """Flatten sections into one labeled block for prompt embedding."""
    parts = []
    for label, body in text.sections:
        parts.append(f"{label}:\n{body}".rstrip())
    return "\n\n".join(parts)
