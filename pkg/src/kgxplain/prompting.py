"""Two-part prompt construction and slot-based explanation templates.

A prompt has a main body (one imperative task per template slot) and an
optional contextual part (role, definitions, KG-derived supporting
content). The backend answers each slot between ``<<SLOT:name>>`` and
``<<END>>`` markers; answers are extracted, normalized, and truncated to
the per-slot word budget so both evaluation arms share one fixed length.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .context import ContextText, render_text
from .errors import (
    InvalidTemplate,
    MalformedResponse,
    MissingRole,
    MissingSlotAnswer,
)

SLOT_OPEN = "<<SLOT:{name}>>"
SLOT_CLOSE = "<<END>>"

_SLOT_MARKER_RE = re.compile(r"\{(\w+)\}")
_BLOCK_RE = re.compile(r"<<SLOT:(\w+)>>(.*?)<<END>>", re.DOTALL)


@dataclass(frozen=True)
class RoleSpec:
    persona: str

    def __post_init__(self):
        if not self.persona.strip():
            raise MissingRole("role persona must be non-empty")


@dataclass(frozen=True)
class DefinitionEntry:
    term: str
    definition: str


@dataclass(frozen=True)
class PromptBody:
    tasks: tuple[str, ...]  # one imperative statement per slot, same order

    def as_text(self) -> str:
        return "\n".join(self.tasks)


@dataclass(frozen=True)
class ExplanationTemplate:
    template_text: str
    slots: tuple[str, ...]
    word_budget: int = 30  # per slot

    def __post_init__(self):
        if self.word_budget < 10:
            raise InvalidTemplate("per-slot word budget must be >= 10")
        found = _SLOT_MARKER_RE.findall(self.template_text)
        if sorted(found) != sorted(self.slots) or len(set(found)) != len(found):
            raise InvalidTemplate(
                "template_text must contain each declared slot exactly once; "
                f"declared {list(self.slots)}, found {found}"
            )

    @property
    def total_budget(self) -> int:
        return self.word_budget * len(self.slots)


DEFAULT_TEMPLATE = ExplanationTemplate(
    template_text=(
        "Why this material: {why_selected}\n"
        "How it supports your goal: {goal_support}\n"
        "What it covers: {content_overview}\n"
        "Related materials: {related_materials}"
    ),
    slots=("why_selected", "goal_support", "content_overview", "related_materials"),
    word_budget=30,
)

DEFAULT_ROLE = RoleSpec(
    persona=(
        "You are an experienced teacher who explains learning-path "
        "recommendations clearly and factually, grounded only in the "
        "supporting content provided."
    )
)

DEFAULT_DEFINITIONS = (
    DefinitionEntry(
        "learning object",
        "a course, topic, or open educational resource that can appear on a learning path",
    ),
    DefinitionEntry(
        "learning path",
        "an ordered sequence of learning objects recommended to reach a learning goal",
    ),
)

_TASK_PHRASES = {
    "why_selected": "Explain why the learning object '{target}' was selected for the learner's path",
    "goal_support": "Explain how '{target}' helps the learner progress toward the goal '{goal}'",
    "content_overview": "Summarize what '{target}' covers",
    "related_materials": "Describe how '{target}' connects to neighboring learning materials",
}


@dataclass(frozen=True)
class PromptDocument:
    role: RoleSpec
    definitions: tuple[DefinitionEntry, ...]
    context: Optional[ContextText]
    body: PromptBody
    template: ExplanationTemplate
    length_budget_words: int

    @property
    def contextualized(self) -> bool:
        return self.context is not None

    def system_text(self) -> str:
        """Role + definitions (+ supporting content when contextualized)."""
        parts = [f"ROLE:\n{self.role.persona}"]
        if self.definitions:
            defs = "\n".join(f"{d.term}: {d.definition}" for d in self.definitions)
            parts.append(f"DEFINITIONS:\n{defs}")
        if self.context is not None:
            parts.append(f"SUPPORTING CONTENT:\n{render_text(self.context)}")
        return "\n\n".join(parts)

    def user_text(self) -> str:
        return self.body.as_text()


def build_prompt(
    bundle_text: Optional[ContextText],
    role: RoleSpec,
    definitions: tuple[DefinitionEntry, ...],
    template: ExplanationTemplate,
    target_title: str,
    goal_title: str,
) -> PromptDocument:
    """Assemble the prompt document; the body is identical with or without
    context so paired evaluation only varies the contextual part."""
    terms = [d.term for d in definitions]
    if len(set(terms)) != len(terms):
        raise InvalidTemplate("definition terms must be unique")
    tasks = []
    for slot in template.slots:
        phrase = _TASK_PHRASES.get(
            slot, "Provide the '" + slot + "' part of the explanation for '{target}'"
        ).format(target=target_title, goal=goal_title)
        tasks.append(
            f"TASK {slot} (answer in at most {template.word_budget} words, "
            f"between {SLOT_OPEN.format(name=slot)} and {SLOT_CLOSE}): {phrase}."
        )
    return PromptDocument(
        role=role,
        definitions=tuple(definitions),
        context=bundle_text,
        body=PromptBody(tasks=tuple(tasks)),
        template=template,
        length_budget_words=template.total_budget,
    )


@dataclass(frozen=True)
class Explanation:
    filled_text: str
    slot_values: dict[str, str]
    contextualized: bool

    def slot_content(self) -> str:
        """Concatenated slot values, the length-controlled explanation body."""
        return " ".join(self.slot_values[s] for s in self.slot_values)


def truncate_words(text: str, budget: int) -> str:
    words = text.split()
    return " ".join(words[:budget])


def fill_template(
    template: ExplanationTemplate, llm_response: str, contextualized: bool = True
) -> Explanation:
    """Extract slot answers from the delimited response and fill the template."""
    if SLOT_CLOSE not in llm_response and "<<SLOT:" not in llm_response:
        raise MalformedResponse("response contains no slot-block markers")
    blocks = {}
    for name, body in _BLOCK_RE.findall(llm_response):
        if name not in blocks:  # first block per slot wins
            blocks[name] = " ".join(body.split())
    values = {}
    for slot in template.slots:
        if slot not in blocks:
            raise MissingSlotAnswer(slot)
        values[slot] = truncate_words(blocks[slot], template.word_budget)
    filled = template.template_text
    for slot in template.slots:
        filled = filled.replace("{" + slot + "}", values[slot])
    return Explanation(
        filled_text=filled, slot_values=values, contextualized=contextualized
    )
