"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one PASSED/FAILED
line per criterion. Tolerances and runtime budgets are asserted inside
the tests themselves.
"""

import itertools
import json
import random
import time

import pytest
from click.testing import CliRunner

from kgxplain.cli import main as cli_main
from kgxplain.communities import detect_communities, weighted_modularity
from kgxplain.errors import NoPathFound
from kgxplain.evaluate import (
    MEASURES,
    prepare_prompts,
    run_experiment,
)
from kgxplain.gateway import Gateway, MockBackend
from kgxplain.kg import SemanticSimilar, load_file, save_file
from kgxplain.prompting import DEFAULT_TEMPLATE
from kgxplain.recommender import RecommenderConfig, path_score, recommend_path
from kgxplain.relations import SimilarityConfig, extract_relations, node_document, similarity
from kgxplain.rouge import VARIANTS, rouge_l, rouge_lsum, rouge_n, score_all

from conftest import two_clique_graph
from oracles import (
    best_partition,
    naive_rouge_l,
    naive_rouge_lsum,
    naive_rouge_n,
)
from test_recommender import oracle_best, random_graph
from test_rouge import WORDS, random_text


def triple(score):
    return (score.recall, score.precision, score.f1)


class TestCriterionRougeOracleSuite:
    def test_rouge_matches_oracle_on_50_pairs_and_pinned_examples(self):
        started = time.perf_counter()
        rng = random.Random(1302)
        for _ in range(50):
            ref, cand = random_text(rng), random_text(rng)
            for n in (1, 2):
                assert triple(rouge_n(ref, cand, n)) == pytest.approx(
                    naive_rouge_n(ref, cand, n), abs=1e-9
                )
            assert triple(rouge_l(ref, cand)) == pytest.approx(
                naive_rouge_l(ref, cand), abs=1e-9
            )
            assert triple(rouge_lsum(ref, cand)) == pytest.approx(
                naive_rouge_lsum(ref, cand), abs=1e-9
            )
        # pinned hand-computed examples
        unigram = rouge_n("the cat sat on the mat", "the cat sat", 1)
        assert unigram.recall == pytest.approx(0.5, abs=1e-9)
        assert unigram.precision == pytest.approx(1.0, abs=1e-9)
        bigram = rouge_n("the cat sat on the mat", "the cat sat", 2)
        assert bigram.recall == pytest.approx(0.4, abs=1e-9)
        lcs = rouge_l("alpha beta gamma delta", "alpha gamma beta delta")
        assert lcs.recall == pytest.approx(0.75, abs=1e-9)
        assert time.perf_counter() - started < 5.0


class TestCriterionIdentityAndBounds:
    def test_identity_and_bounds_over_1000_random_cases(self):
        started = time.perf_counter()
        rng = random.Random(7)
        for _ in range(500):
            text = " ".join(rng.choice(WORDS) for _ in range(rng.randint(2, 12)))
            report = score_all(text, text)
            for variant in VARIANTS:
                score = getattr(report, variant)
                assert score.recall == score.precision == score.f1 == 1.0
        for _ in range(500):
            ref, cand = random_text(rng), random_text(rng)
            report = score_all(ref, cand)
            for variant in VARIANTS:
                score = getattr(report, variant)
                for value in triple(score):
                    assert 0.0 <= value <= 1.0
        assert time.perf_counter() - started < 10.0


@pytest.fixture(scope="module")
def full_mock_run(corpus_graph, corpus_assignment, corpus_paths):
    prepared = prepare_prompts(
        corpus_graph, corpus_assignment, corpus_paths, DEFAULT_TEMPLATE
    )
    started = time.perf_counter()
    report = run_experiment(
        corpus_graph, corpus_assignment, corpus_paths,
        Gateway(MockBackend()), DEFAULT_TEMPLATE,
    )
    elapsed = time.perf_counter() - started
    return prepared, report, elapsed


class TestCriterionContextOrdering:
    def test_with_context_strictly_beats_without_on_all_variants(
        self, corpus_graph, full_mock_run
    ):
        _, report, elapsed = full_mock_run
        lo_count = sum(1 for n in corpus_graph.learning_objects())
        assert lo_count >= 40
        assert report.scored_count >= 20
        assert report.failures == []
        for variant in VARIANTS:
            with_ctx = report.aggregates[variant]["with_context"]
            without_ctx = report.aggregates[variant]["without_context"]
            for measure in MEASURES:
                assert with_ctx[measure] > without_ctx[measure], (
                    f"{variant} {measure}: {with_ctx[measure]} vs {without_ctx[measure]}"
                )
            assert with_ctx["f1"] - without_ctx["f1"] >= 0.05, variant
        assert elapsed < 30.0


class TestCriterionPairedDesignFairness:
    def test_bodies_identical_and_budgets_equal_on_full_run(self, full_mock_run):
        prepared, report, _ = full_mock_run
        assert len(prepared) == report.scored_count
        for prompts in prepared:
            assert prompts.with_context.body == prompts.without_context.body
            assert prompts.with_context.user_text() == prompts.without_context.user_text()
        for sample in report.samples:
            with_words = len(sample.candidate_with_context.split())
            without_words = len(sample.candidate_without_context.split())
            assert with_words <= DEFAULT_TEMPLATE.total_budget
            assert without_words <= DEFAULT_TEMPLATE.total_budget
            assert with_words == without_words


def semantic_pairs(graph):
    return {
        (e.head, e.tail) if e.head < e.tail else (e.tail, e.head)
        for e in graph.edges()
        if isinstance(e.kind, SemanticSimilar)
    }


class TestCriterionKgAndExtractionInvariants:
    def test_load_save_identity(self, corpus_graph, tmp_path):
        out = tmp_path / "graph.jsonl"
        save_file(corpus_graph, out)
        assert load_file(out) == corpus_graph

    def test_threshold_monotonicity(self, corpus_graph):
        base = corpus_graph.copy()
        edge_sets = {}
        for threshold in (0.2, 0.5, 0.8):
            result = extract_relations(
                base, SimilarityConfig(threshold=threshold, min_doc_tokens=3)
            )
            edge_sets[threshold] = semantic_pairs(result.graph)
        assert edge_sets[0.8] <= edge_sets[0.5] <= edge_sets[0.2]

    def test_similarity_symmetry(self, corpus_graph):
        nodes = sorted(corpus_graph.node_ids())[:12]
        docs = [node_document(corpus_graph.node(n)) for n in nodes]
        corpus = [d for d in docs if d.tokens]
        for a, b in itertools.combinations(corpus, 2):
            assert similarity(a, b, corpus) == similarity(b, a, corpus)

    def test_community_determinism(self, corpus_graph):
        first = detect_communities(corpus_graph)
        second = detect_communities(corpus_graph)
        assert first == second

    def test_two_clique_matches_brute_force_over_4140_partitions(self):
        graph = two_clique_graph()
        nodes = sorted(n.id for n in graph.learning_objects())
        edges = [
            (a, b, w)
            for a in nodes
            for b, w in graph.semantic_neighbors(a)
            if a < b
        ]
        oracle_q, oracle_blocks = best_partition(nodes, edges)
        assignment = detect_communities(graph)
        blocks = sorted(
            sorted(assignment.members(c)) for c in set(assignment.partition.values())
        )
        assert blocks == oracle_blocks
        assert assignment.modularity == pytest.approx(oracle_q, abs=1e-12)
        assert weighted_modularity(graph, assignment.partition) == pytest.approx(
            oracle_q, abs=1e-12
        )


class TestCriterionPathOptimality:
    def test_25_random_graphs_exact(self):
        rng = random.Random(995)
        checked = 0
        while checked < 25:
            graph, ids = random_graph(rng)
            assert len(graph) <= 12
            start = rng.choice(ids)
            goal = rng.choice(["g0", "g1"])
            cfg = RecommenderConfig(
                discount=rng.choice([0.8, 0.9]),
                max_path_len=rng.choice([4, 5, 6]),
            )
            expected = oracle_best(graph, start, goal, cfg)
            if expected is None:
                with pytest.raises(NoPathFound):
                    recommend_path(graph, start, goal, cfg)
                continue
            path = recommend_path(graph, start, goal, cfg)
            total, _ = path_score(graph, list(path.steps), goal, cfg)
            assert total == expected[0]  # exact score equality
            assert list(path.steps) == expected[1]
            checked += 1


class TestCriterionConfirmationGuarantee:
    def test_no_generation_without_accepted_confirmation(
        self, corpus_graph, corpus_assignment
    ):
        from fastapi.testclient import TestClient

        from kgxplain.service import create_app

        gateway = Gateway(MockBackend())
        app = create_app(corpus_graph, corpus_assignment, gateway)
        client = TestClient(app, raise_server_exceptions=False)

        def new_session():
            body = client.post(
                "/sessions", json={"start": "course0_topic0_oer0", "goal": "goal0"}
            ).json()
            title = body["path"]["steps"][0]["title"]
            return body["session_id"], f"Tell me about {title}"

        # sessions that never receive an accepted confirmation
        sid_idle, _ = new_session()
        sid_asked, q_asked = new_session()
        client.post(f"/sessions/{sid_asked}/ask", json={"question": q_asked})
        sid_rejected, q_rejected = new_session()
        client.post(f"/sessions/{sid_rejected}/ask", json={"question": q_rejected})
        client.post(f"/sessions/{sid_rejected}/confirm", json={"accepted": False})
        # out-of-phase calls never generate either
        client.post(f"/sessions/{sid_idle}/confirm", json={"accepted": True})
        assert gateway.call_log == []

        # exactly one generation per accepted confirmation
        sid_ok, q_ok = new_session()
        client.post(f"/sessions/{sid_ok}/ask", json={"question": q_ok})
        answer = client.post(f"/sessions/{sid_ok}/confirm", json={"accepted": True})
        assert answer.status_code == 200
        assert len(gateway.call_log) == 1


class TestCriterionEndToEndDeterminism:
    def test_two_evaluate_runs_byte_identical(self, tmp_path):
        runner = CliRunner()
        corpus_dir = tmp_path / "corpus"
        assert runner.invoke(
            cli_main, ["make-corpus", "--out-dir", str(corpus_dir)]
        ).exit_code == 0
        graph_file = tmp_path / "graph.jsonl"
        assert runner.invoke(
            cli_main,
            ["build-kg", str(corpus_dir / "corpus.jsonl"), "--out", str(graph_file)],
        ).exit_code == 0

        outputs = {}
        for label, jobs in (("first", "1"), ("second", "4")):
            out_dir = tmp_path / label
            result = runner.invoke(
                cli_main,
                ["evaluate", str(graph_file), str(corpus_dir / "paths.jsonl"),
                 "--backend", "mock", "--out-dir", str(out_dir), "--jobs", jobs],
            )
            assert result.exit_code == 0, result.output
            outputs[label] = {
                name: (out_dir / name).read_bytes()
                for name in ("report.json", "report.csv", "report.txt", "report.png")
            }
        assert outputs["first"] == outputs["second"]
        report = json.loads(outputs["first"]["report.json"])
        assert len(report["samples"]) >= 20
