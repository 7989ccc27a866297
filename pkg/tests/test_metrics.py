import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvcca import metrics
from mvcca.errors import DegenerateInput, EmptyInput
from tests_support import exhaustive_otsu_threshold


class TestRankAggregates:
    def test_mean_rank(self):
        assert metrics.mean_rank([1, 1, 1]) == 1.0
        assert abs(metrics.mean_rank([2, 5, 10]) - 17.0 / 3.0) <= 1e-9

    def test_mrr(self):
        assert metrics.mrr([1, 1]) == 1.0
        assert abs(metrics.mrr([2, 5, 10]) - 0.8 / 3.0) <= 1e-9

    def test_recall_at(self):
        assert abs(metrics.recall_at([1, 2, 3], 1) - 1.0 / 3.0) <= 1e-9
        assert metrics.recall_at([4, 9, 2, 7], 10) == 1.0

    def test_empty_input(self):
        for fn in (metrics.mean_rank, metrics.mrr):
            with pytest.raises(EmptyInput):
                fn([])
        with pytest.raises(EmptyInput):
            metrics.recall_at([], 5)

    @given(st.lists(st.integers(min_value=1, max_value=100), min_size=1, max_size=50))
    def test_bounds_on_random_rank_lists(self, ranks):
        C = 100
        assert 1.0 <= metrics.mean_rank(ranks) <= C
        assert 1.0 / C <= metrics.mrr(ranks) <= 1.0
        prev = 0.0
        for k in (1, 5, 10, 50, 100):
            r = metrics.recall_at(ranks, k)
            assert r >= prev
            prev = r


class TestNdcg:
    def test_perfect_order(self):
        rel = [0.9, 0.5, 0.5, 0.0, 0.0]
        assert abs(metrics.ndcg([rel]) - 1.0) <= 1e-12

    def test_single_positive_missed(self):
        assert metrics.ndcg([[0.0, 1.0]]) == 0.0

    def test_mean_over_questions(self):
        val = metrics.ndcg([[1.0, 0.0], [0.0, 1.0]])
        assert abs(val - 0.5) <= 1e-12

    def test_skips_all_zero_questions(self):
        assert abs(metrics.ndcg([[0.0, 0.0], [1.0, 0.0]]) - 1.0) <= 1e-12
        with pytest.raises(EmptyInput):
            metrics.ndcg([[0.0, 0.0]])

    def test_perfect_orderings_random(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            rel = np.round(rng.random(20), 3)
            rel[rng.random(20) < 0.5] = 0.0
            if not np.any(rel > 0):
                rel[0] = 0.5
            ordered = np.sort(rel)[::-1]
            assert abs(metrics.ndcg([ordered]) - 1.0) <= 1e-9

    def test_invariant_to_zero_tail_permutation(self):
        rng = np.random.default_rng(1)
        rel = [0.7, 0.3, 0.0, 0.0, 0.0, 0.0]
        base = metrics.ndcg([rel])
        for _ in range(5):
            tail = list(rng.permutation([0.0] * 4))
            assert metrics.ndcg([[0.7, 0.3] + tail]) == base


class TestOtsuThreshold:
    def test_two_point_clusters(self):
        t = metrics.otsu_threshold([0.0, 0.0, 1.0, 1.0])
        assert 0.0 < t < 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            metrics.otsu_threshold([0.5, 0.5, 0.5])
        with pytest.raises(DegenerateInput):
            metrics.otsu_threshold([0.5])

    def test_strictly_interior(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            v = rng.random(30)
            t = metrics.otsu_threshold(v)
            assert v.min() < t < v.max()

    def test_matches_exhaustive_oracle_on_bimodal(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            lo = rng.normal(0.2, 0.05, size=100)
            hi = rng.normal(0.8, 0.05, size=100)
            v = np.concatenate([lo, hi])
            bin_width = (v.max() - v.min()) / metrics.OTSU_BINS
            t = metrics.otsu_threshold(v)
            ref = exhaustive_otsu_threshold(v)
            assert abs(t - ref) <= bin_width


class TestOtsuStatistics:
    def test_gt_is_max_fraction_one(self):
        rng = np.random.default_rng(4)
        questions = []
        for _ in range(30):
            cand = rng.random(20)
            questions.append((cand, cand.max()))
        stats = metrics.otsu_statistics(questions)
        assert stats.gt_above_threshold_fraction == 1.0

    def test_hand_oracle_two_questions(self):
        # q1: candidates {0,0,1,1}; threshold splits at ~0.5; split
        # variances 0; gt=1.0 above
        # q2: candidates {0.0, 0.1, 0.8, 0.9}; low {0,.1} var .0025,
        # high {.8,.9} var .0025; gt=0.2 below
        q1 = (np.array([0.0, 0.0, 1.0, 1.0]), 1.0)
        q2 = (np.array([0.0, 0.1, 0.8, 0.9]), 0.2)
        stats = metrics.otsu_statistics([q1, q2])
        assert stats.questions_used == 2
        assert abs(stats.avg_variance_low_split - (0.0 + 0.0025) / 2) <= 1e-12
        assert abs(stats.avg_variance_high_split - (0.0 + 0.0025) / 2) <= 1e-12
        assert stats.gt_above_threshold_fraction == 0.5

    def test_two_point_distributions_zero_variance(self):
        questions = [(np.array([0.1, 0.1, 0.9, 0.9]), 0.9) for _ in range(5)]
        stats = metrics.otsu_statistics(questions)
        assert stats.avg_variance_low_split == 0.0
        assert stats.avg_variance_high_split == 0.0

    def test_degenerate_questions_skipped(self):
        qs = [(np.array([0.3, 0.3, 0.3]), 0.3), (np.array([0.0, 1.0]), 1.0)]
        stats = metrics.otsu_statistics(qs)
        assert stats.questions_used == 1
        assert stats.questions_skipped == 1
        with pytest.raises(EmptyInput):
            metrics.otsu_statistics([(np.array([0.5, 0.5]), 0.5)])


class TestEvalReport:
    def test_json_field_names(self):
        report = metrics.build_report([1, 2, 3])
        d = report.to_json_dict()
        assert set(d) == {"mr", "mrr", "recall_at", "ndcg", "question_count", "otsu"}
        assert set(d["recall_at"]) == {"1", "5", "10"}

    def test_order_independent(self):
        rng = np.random.default_rng(5)
        ranks = list(rng.integers(1, 101, size=200))
        a = metrics.build_report(ranks)
        b = metrics.build_report(list(reversed(ranks)))
        assert a == b

    def test_format_table_has_columns(self):
        report = metrics.build_report([1, 2, 3], ranked_relevances=[[1.0, 0.0]])
        table = metrics.format_table(report)
        for col in ("MR", "R@1", "R@5", "R@10", "MRR", "NDCG"):
            assert col in table
