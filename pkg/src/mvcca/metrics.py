"""Aggregate retrieval metrics (MR, MRR, R@k, NDCG) and the Otsu-threshold
equivalence-class analysis of per-question candidate correlations."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, EmptyInput

OTSU_BINS = 256


def mean_rank(ranks):
    """Arithmetic mean of 1-based ranks."""
    ranks = _check_ranks(ranks)
    return float(np.mean(ranks))


def mrr(ranks):
    """Mean reciprocal rank (inverse harmonic mean of rank)."""
    ranks = _check_ranks(ranks)
    return float(np.mean(1.0 / ranks))


def recall_at(ranks, k):
    """Fraction of ranks <= k."""
    ranks = _check_ranks(ranks)
    if k < 1:
        raise EmptyInput(f"k must be >= 1, got {k}")
    return float(np.mean(ranks <= k))


def _check_ranks(ranks):
    ranks = np.asarray(ranks, dtype=np.float64)
    if ranks.size == 0:
        raise EmptyInput("no ranks supplied")
    if np.any(ranks < 1):
        raise EmptyInput("ranks are 1-based and must be >= 1")
    # fixed summation order makes every aggregate permutation-invariant bitwise
    return np.sort(ranks)


def ndcg_single(relevances_in_predicted_order):
    """NDCG for one question, or None when it has no positive relevance.

    The cutoff K is the number of positively-relevant candidates; DCG sums
    rel/log2(i+1) over the first K predicted positions, IDCG over the
    relevance-descending order.
    """
    rel = np.asarray(relevances_in_predicted_order, dtype=np.float64)
    K = int(np.sum(rel > 0.0))
    if K == 0:
        return None
    discounts = 1.0 / np.log2(np.arange(1, K + 1) + 1)
    dcg = float(rel[:K] @ discounts)
    ideal = np.sort(rel)[::-1][:K]
    idcg = float(ideal @ discounts)
    return dcg / idcg


def ndcg(ranked_relevances):
    """Mean NDCG over questions; questions without any positive relevance
    are skipped (EmptyInput when all are)."""
    values = [v for v in map(ndcg_single, ranked_relevances) if v is not None]
    if not values:
        raise EmptyInput("no question has a positively-relevant candidate")
    return float(np.mean(values))


def otsu_threshold(values, bins=OTSU_BINS):
    """Histogram-Otsu threshold over [min, max] with equal-width bins.

    Returns the bin edge maximizing the between-class variance
    w0*w1*(mu0-mu1)^2; exact ties pick the middle of the tied run of edges,
    so an empty gap between two clusters thresholds near its center.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise DegenerateInput("need at least 2 values")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        raise DegenerateInput("all values equal")
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    total = counts.sum()
    w0 = np.cumsum(counts)[:-1]
    w1 = total - w0
    mass0 = np.cumsum(counts * centers)[:-1]
    mass1 = (counts * centers).sum() - mass0
    valid = (w0 > 0) & (w1 > 0)
    sigma_b = np.zeros(bins - 1)
    sigma_b[valid] = (
        w0[valid] * w1[valid]
        * (mass0[valid] / w0[valid] - mass1[valid] / w1[valid]) ** 2
    )
    tied = np.nonzero(sigma_b == sigma_b.max())[0]
    k = tied[(len(tied) - 1) // 2] + 1  # interior edge index
    return float(edges[k])


@dataclass(frozen=True)
class OtsuStats:
    avg_variance_low_split: float
    avg_variance_high_split: float
    gt_above_threshold_fraction: float
    questions_used: int
    questions_skipped: int = 0


def otsu_statistics(questions, bins=OTSU_BINS):
    """Per-question Otsu split analysis.

    questions: iterable of (candidate_correlations, gt_correlation).  Each
    question is thresholded independently; split variances are population
    variances; the ground truth counts as "above" only when strictly greater
    than the threshold.  Questions with degenerate inputs are skipped and
    counted.
    """
    low_vars, high_vars, above = [], [], []
    skipped = 0
    for cand, gt in questions:
        cand = np.asarray(cand, dtype=np.float64)
        try:
            t = otsu_threshold(cand, bins=bins)
        except DegenerateInput:
            skipped += 1
            continue
        low = cand[cand < t]
        high = cand[cand >= t]
        low_vars.append(float(np.var(low)) if low.size else 0.0)
        high_vars.append(float(np.var(high)) if high.size else 0.0)
        above.append(1.0 if gt > t else 0.0)
    if not above:
        raise EmptyInput("all questions had degenerate candidate correlations")
    return OtsuStats(
        avg_variance_low_split=float(np.mean(low_vars)),
        avg_variance_high_split=float(np.mean(high_vars)),
        gt_above_threshold_fraction=float(np.mean(above)),
        questions_used=len(above),
        questions_skipped=skipped,
    )


@dataclass(frozen=True)
class EvalReport:
    mr: float
    mrr: float
    recall_at: dict
    question_count: int
    ndcg: float | None = None
    otsu: OtsuStats | None = None

    def to_json_dict(self):
        out = {
            "mr": self.mr,
            "mrr": self.mrr,
            "recall_at": {str(k): v for k, v in sorted(self.recall_at.items())},
            "ndcg": self.ndcg,
            "question_count": self.question_count,
            "otsu": None,
        }
        if self.otsu is not None:
            out["otsu"] = {
                "avg_variance_low_split": self.otsu.avg_variance_low_split,
                "avg_variance_high_split": self.otsu.avg_variance_high_split,
                "gt_above_threshold_fraction": self.otsu.gt_above_threshold_fraction,
                "questions_used": self.otsu.questions_used,
                "questions_skipped": self.otsu.questions_skipped,
            }
        return out


def build_report(ranks, ranked_relevances=None, otsu_questions=None,
                 recall_ks=(1, 5, 10)):
    """Aggregate per-question ranks (in fixed question order) into a report."""
    ranks = _check_ranks(ranks)
    report = EvalReport(
        mr=mean_rank(ranks),
        mrr=mrr(ranks),
        recall_at={k: recall_at(ranks, k) for k in recall_ks},
        question_count=int(ranks.size),
        ndcg=None if ranked_relevances is None else ndcg(ranked_relevances),
        otsu=None if otsu_questions is None else otsu_statistics(otsu_questions),
    )
    return report


def format_table(report):
    """Fixed-width summary table (MR, R@1, R@5, R@10, MRR, NDCG)."""
    ndcg_txt = "--" if report.ndcg is None else f"{report.ndcg:.4f}"
    header = f"{'MR':>8} {'R@1':>8} {'R@5':>8} {'R@10':>8} {'MRR':>8} {'NDCG':>8}"
    row = (
        f"{report.mr:8.2f} "
        f"{100 * report.recall_at.get(1, float('nan')):8.2f} "
        f"{100 * report.recall_at.get(5, float('nan')):8.2f} "
        f"{100 * report.recall_at.get(10, float('nan')):8.2f} "
        f"{report.mrr:8.4f} "
        f"{ndcg_txt:>8}"
    )
    lines = [header, row]
    if report.otsu is not None:
        o = report.otsu
        lines.append(
            f"otsu: var(low)={o.avg_variance_low_split:.4f} "
            f"var(high)={o.avg_variance_high_split:.4f} "
            f"gt-above={100 * o.gt_above_threshold_fraction:.2f}% "
            f"used={o.questions_used} skipped={o.questions_skipped}"
        )
    return "\n".join(lines)
