"""From-scratch Rouge-1, Rouge-2, Rouge-L, and Rouge-Lsum.

Rouge-N uses clipped n-gram counts (each reference n-gram credits at
most its reference multiplicity). Rouge-L is LCS over whole token
sequences; Rouge-Lsum applies union-LCS per reference sentence against
all candidate sentences. Tokenization is lowercasing plus splitting on
non-alphanumeric runs; no stemming, no stopword removal.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyReference
from .relations import tokenize


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, match: float, ref_total: int, cand_total: int) -> "RougeScore":
        recall = match / ref_total if ref_total else 0.0
        precision = match / cand_total if cand_total else 0.0
        denom = recall + precision
        f1 = 2.0 * recall * precision / denom if denom > 0 else 0.0
        return cls(recall=recall, precision=precision, f1=f1)


@dataclass(frozen=True)
class RougeReport:
    rouge1: RougeScore
    rouge2: RougeScore
    rougeL: RougeScore
    rougeLsum: RougeScore

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {
            name: {"recall": s.recall, "precision": s.precision, "f1": s.f1}
            for name, s in [
                ("rouge1", self.rouge1),
                ("rouge2", self.rouge2),
                ("rougeL", self.rougeL),
                ("rougeLsum", self.rougeLsum),
            ]
        }


VARIANTS = ("rouge1", "rouge2", "rougeL", "rougeLsum")


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: str, candidate: str, n: int) -> RougeScore:
    """Clipped n-gram overlap recall/precision/F1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ref_tokens = tokenize(reference)
    if len(ref_tokens) < n:
        raise EmptyReference(f"reference has {len(ref_tokens)} tokens, need >= {n}")
    cand_tokens = tokenize(candidate)
    ref_grams = _ngrams(ref_tokens, n)
    cand_grams = _ngrams(cand_tokens, n)
    match = sum(min(count, cand_grams[g]) for g, count in ref_grams.items())
    return RougeScore.from_counts(
        match, sum(ref_grams.values()), sum(cand_grams.values())
    )


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge_l(reference: str, candidate: str) -> RougeScore:
    """Longest-common-subsequence overlap over whole texts."""
    ref_tokens = tokenize(reference)
    if not ref_tokens:
        raise EmptyReference("reference tokenizes to nothing")
    cand_tokens = tokenize(candidate)
    lcs = _lcs_length(ref_tokens, cand_tokens)
    return RougeScore.from_counts(lcs, len(ref_tokens), len(cand_tokens))


def split_sentences(text: str) -> list[str]:
    """Terminator rule: split on . ! ? and newlines."""
    parts = re.split(r"(?<=[.!?])\s+|[\n]+", text)
    return [p for p in (part.strip() for part in parts) if p]


def _lcs_positions(ref: list[str], cand: list[str]) -> set[int]:
    """Reference token positions of the canonical LCS of ref and cand.

    Multiple maximum-length embeddings can exist; the canonical choice is
    the lexicographically smallest set of reference positions, built
    greedily against a suffix-LCS table so the union-LCS value is
    well-defined and reproducible.
    """
    n, m = len(ref), len(cand)
    if n == 0 or m == 0:
        return set()
    # suffix[i][j] = LCS length of ref[i:] and cand[j:]
    suffix = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if ref[i] == cand[j]:
                suffix[i][j] = suffix[i + 1][j + 1] + 1
            else:
                suffix[i][j] = max(suffix[i + 1][j], suffix[i][j + 1])
    total = suffix[0][0]
    positions: set[int] = set()
    j = 0
    for i in range(n):
        needed = total - len(positions) - 1
        if needed < 0:
            break
        for jp in range(j, m):
            if cand[jp] == ref[i] and suffix[i + 1][jp + 1] >= needed:
                positions.add(i)
                j = jp + 1
                break
    return positions


def rouge_lsum(reference: str, candidate: str) -> RougeScore:
    """Sentence-level union-LCS variant of Rouge-L."""
    ref_sentences = [tokenize(s) for s in split_sentences(reference)]
    ref_sentences = [s for s in ref_sentences if s]
    if not ref_sentences:
        raise EmptyReference("reference tokenizes to nothing")
    cand_sentences = [tokenize(s) for s in split_sentences(candidate)]
    cand_sentences = [s for s in cand_sentences if s]

    # clip hits by candidate token multiplicity so several reference
    # sentences cannot all claim the same candidate tokens
    cand_budget = Counter(t for sent in cand_sentences for t in sent)
    total_match = 0
    for ref_sent in ref_sentences:
        union: set[int] = set()
        for cand_sent in cand_sentences:
            union |= _lcs_positions(ref_sent, cand_sent)
        for pos in sorted(union):
            token = ref_sent[pos]
            if cand_budget[token] > 0:
                cand_budget[token] -= 1
                total_match += 1
    ref_total = sum(len(s) for s in ref_sentences)
    cand_total = sum(len(s) for s in cand_sentences)
    return RougeScore.from_counts(total_match, ref_total, cand_total)


def score_all(reference: str, candidate: str) -> RougeReport:
    return RougeReport(
        rouge1=rouge_n(reference, candidate, 1),
        rouge2=rouge_n(reference, candidate, 2),
        rougeL=rouge_l(reference, candidate),
        rougeLsum=rouge_lsum(reference, candidate),
    )
