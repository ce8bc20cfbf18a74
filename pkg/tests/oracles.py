"""Independent brute-force oracles, written separately from the package
implementation on purpose. Kept naive and obvious: correctness over speed."""

from __future__ import annotations

import itertools
import math
import re


def simple_tokens(text):
    return re.findall(r"[0-9a-z]+", text.lower())


# --- naive Rouge -----------------------------------------------------------

def naive_ngram_counts(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i:i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def naive_prf(match, ref_total, cand_total):
    recall = match / ref_total if ref_total else 0.0
    precision = match / cand_total if cand_total else 0.0
    f1 = (2 * recall * precision / (recall + precision)) if recall + precision else 0.0
    return recall, precision, f1


def naive_rouge_n(reference, candidate, n):
    ref = naive_ngram_counts(simple_tokens(reference), n)
    cand = naive_ngram_counts(simple_tokens(candidate), n)
    match = 0
    for gram, count in ref.items():
        match += min(count, cand.get(gram, 0))
    return naive_prf(match, sum(ref.values()), sum(cand.values()))


def naive_lcs_len(a, b):
    # top-down memoized recursion, structurally unlike the iterative DP
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def naive_rouge_l(reference, candidate):
    ref = simple_tokens(reference)
    cand = simple_tokens(candidate)
    return naive_prf(naive_lcs_len(ref, cand), len(ref), len(cand))


def naive_split_sentences(text):
    parts = re.split(r"(?<=[.!?])\s+|[\n]+", text)
    return [p.strip() for p in parts if p.strip()]


def is_subsequence(sub, seq):
    it = iter(seq)
    return all(any(x == y for y in it) for x in sub)


def naive_union_lcs_positions(ref_sent, cand_sents):
    """Matched reference positions, unioned over candidate sentences. Each
    candidate contributes its lexicographically-smallest maximum-size
    position subset, found by exhaustive subset checking."""
    matched = set()
    for cand in cand_sents:
        best = set()
        n = len(ref_sent)
        for size in range(n, 0, -1):
            if best:
                break
            for positions in itertools.combinations(range(n), size):
                sub = [ref_sent[p] for p in positions]
                if is_subsequence(sub, cand):
                    best = set(positions)
                    break
        matched |= best
    return matched


def naive_rouge_lsum(reference, candidate):
    ref_sents = [simple_tokens(s) for s in naive_split_sentences(reference)]
    ref_sents = [s for s in ref_sents if s]
    cand_sents = [simple_tokens(s) for s in naive_split_sentences(candidate)]
    cand_sents = [s for s in cand_sents if s]
    # a candidate token can be credited at most as often as it occurs
    remaining = list(itertools.chain.from_iterable(cand_sents))
    match = 0
    for r in ref_sents:
        for pos in sorted(naive_union_lcs_positions(r, cand_sents)):
            token = r[pos]
            if token in remaining:
                remaining.remove(token)
                match += 1
    ref_total = sum(len(s) for s in ref_sents)
    cand_total = sum(len(s) for s in cand_sents)
    return naive_prf(match, ref_total, cand_total)


# --- naive TF-IDF cosine ----------------------------------------------------

def naive_tfidf_cosine(doc_a, doc_b, corpus_docs):
    """Log-scaled tf, smoothed idf, cosine; docs are token lists."""
    n = len(corpus_docs)
    vocab = set(doc_a) | set(doc_b)

    def idf(term):
        df = sum(1 for doc in corpus_docs if term in doc)
        return math.log((1 + n) / (1 + df)) + 1.0

    def weight(doc, term):
        count = doc.count(term)
        if count == 0:
            return 0.0
        return (1.0 + math.log(count)) * idf(term)

    dot = sum(weight(doc_a, t) * weight(doc_b, t) for t in sorted(vocab))
    norm_a = math.sqrt(sum(weight(doc_a, t) ** 2 for t in sorted(set(doc_a))))
    norm_b = math.sqrt(sum(weight(doc_b, t) ** 2 for t in sorted(set(doc_b))))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return dot / (norm_a * norm_b)


# --- brute-force modularity maximization ------------------------------------

def set_partitions(items):
    """All partitions of a list (Bell-number many)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [first]] + smaller[i + 1:]
        yield [[first]] + smaller


def naive_modularity(nodes, weighted_edges, partition_blocks):
    block_of = {}
    for index, block in enumerate(partition_blocks):
        for node in block:
            block_of[node] = index
    two_m = 2.0 * sum(w for _, _, w in weighted_edges)
    if two_m == 0:
        return 0.0
    degree = {n: 0.0 for n in nodes}
    for a, b, w in weighted_edges:
        degree[a] += w
        degree[b] += w
    q = 0.0
    for a, b, w in weighted_edges:
        if block_of[a] == block_of[b]:
            q += 2.0 * w / two_m
    for a in nodes:
        for b in nodes:
            if block_of[a] == block_of[b]:
                q -= degree[a] * degree[b] / (two_m * two_m)
    return q


def best_partition(nodes, weighted_edges):
    best_q = float("-inf")
    best = None
    for blocks in set_partitions(list(nodes)):
        q = naive_modularity(nodes, weighted_edges, blocks)
        if q > best_q + 1e-12:
            best_q = q
            best = [sorted(b) for b in blocks]
    return best_q, sorted(best)


# --- exhaustive path search -------------------------------------------------

def enumerate_best_path(nodes, adjacency, subtree_of_goal, start, cfg):
    """adjacency: {node: [(next, reward), ...]}; cfg has discount,
    max_path_len, goal_reward. Returns (score, path) or None."""
    best = None

    def score_of(path):
        total = 0.0
        for j in range(1, len(path)):
            reward = dict(adjacency[path[j - 1]])[path[j]]
            total += reward * cfg.discount ** (j - 1)
        total += cfg.goal_reward * cfg.discount ** (len(path) - 1)
        return total

    def extend(path):
        nonlocal best
        if path[-1] in subtree_of_goal:
            key = (-score_of(path), len(path), tuple(path))
            if best is None or key < best:
                best = key
        if len(path) >= cfg.max_path_len:
            return
        for nxt, _ in adjacency[path[-1]]:
            if nxt not in path:
                extend(path + [nxt])

    extend([start])
    if best is None:
        return None
    return -best[0], list(best[2])
