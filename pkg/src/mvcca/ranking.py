"""Centered-cosine scoring, candidate ranking, and nearest-neighbour
retrieval / baselines.

Feature banks here are row-major: shape (num_samples, dim), matching the
on-disk VDF1 layout.  Ties in any ranking are broken by the lower original
candidate index so results are deterministic.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import cca
from .errors import ConfigError, EmptyBank, EmptyInput


@dataclass(frozen=True)
class RankResult:
    question_id: object
    ordering: np.ndarray       # candidate indices, best first
    scores: np.ndarray         # aligned to ordering, non-increasing
    gt_rank: int               # 1-based


@dataclass(frozen=True)
class RetrievalResult:
    question_id: object
    rows: np.ndarray           # train-bank row indices, best first
    scores: np.ndarray


def _cosine(u, v):
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(u @ v / (nu * nv))


def _centered_embedding(model, view, x):
    return cca.embed(model, view, x) - model.embedding_means[view]


def _centered_embedding_batch(model, view, X):
    return cca.embed_batch(model, view, X) - model.embedding_means[view]


def _cosine_against(E, q):
    """Cosine of each row of E against vector q; zero-norm rows score 0.

    Uses per-row reductions rather than a BLAS matrix-vector product so that
    identical rows get bit-identical scores (index tie-breaks depend on it).
    """
    nq = np.linalg.norm(q)
    norms = np.sqrt((E * E).sum(axis=1))
    scores = np.zeros(E.shape[0])
    if nq == 0.0:
        return scores
    ok = norms > 0.0
    scores[ok] = (E[ok] * q).sum(axis=1) / (norms[ok] * nq)
    return scores


def score(model, view_a, x_a, view_b, x_b):
    """Correlation score: cosine of the two centered embeddings, in [-1, 1].
    A zero-norm centered embedding on either side scores 0."""
    return _cosine(
        _centered_embedding(model, view_a, x_a),
        _centered_embedding(model, view_b, x_b),
    )


def _order_by_score(scores):
    # stable sort on negated scores = descending with lowest-index tie-break
    return np.argsort(-scores, kind="stable")


def rank_candidates(model, question, candidates, gt_index,
                    question_view="question", answer_view="answer",
                    question_id=None):
    """Rank candidate answer vectors against a question vector."""
    candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if candidates.shape[0] == 0:
        raise EmptyInput("no candidates to rank")
    if not (0 <= gt_index < candidates.shape[0]):
        raise ConfigError(f"gt_index {gt_index} out of range")
    q = _centered_embedding(model, question_view, question)
    E = _centered_embedding_batch(model, answer_view, candidates)
    scores = _cosine_against(E, q)
    order = _order_by_score(scores)
    gt_rank = int(np.nonzero(order == gt_index)[0][0]) + 1
    return RankResult(question_id, order, scores[order], gt_rank)


def nn_retrieve(model, question, train_questions, train_answers,
                k=100, top=10, question_view="question", answer_view="answer",
                question_id=None):
    """Retrieve answers via the aligned nearest-neighbour candidate set.

    Takes the k train questions best correlated with the query (same-view
    score), pools their aligned answers, and re-scores those answers against
    the query cross-view.
    """
    train_questions = np.atleast_2d(np.asarray(train_questions, dtype=np.float64))
    train_answers = np.atleast_2d(np.asarray(train_answers, dtype=np.float64))
    n_bank = train_questions.shape[0]
    if n_bank == 0 or train_answers.shape[0] == 0:
        raise EmptyBank("empty training bank")
    if train_answers.shape[0] != n_bank:
        raise ConfigError("question and answer banks must be row-aligned")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if k > n_bank:
        warnings.warn(f"k={k} exceeds bank size {n_bank}; clamping")
        k = n_bank
    q = _centered_embedding(model, question_view, question)
    qq = _cosine_against(_centered_embedding_batch(model, question_view, train_questions), q)
    neighbours = _order_by_score(qq)[:k]
    E = _centered_embedding_batch(model, answer_view, train_answers[neighbours])
    qa = _cosine_against(E, q)
    order = _order_by_score(qa)[:top]
    return RetrievalResult(question_id, neighbours[order], qa[order])


def nn_baseline_rank(question, candidates, gt_index, train_questions,
                     train_answers, k, question_image=None, train_images=None,
                     question_id=None):
    """Nearest-neighbour baseline over raw features (no learned projections).

    Finds the k train questions closest to the query by cosine, averages
    their aligned answer features into a reference vector, and ranks the
    candidates by cosine to that reference.  With image features supplied,
    neighbour search runs on the question+image concatenation.
    """
    question = np.asarray(question, dtype=np.float64)
    candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    train_questions = np.atleast_2d(np.asarray(train_questions, dtype=np.float64))
    train_answers = np.atleast_2d(np.asarray(train_answers, dtype=np.float64))
    n_bank = train_questions.shape[0]
    if n_bank == 0:
        raise EmptyBank("empty training bank")
    if train_answers.shape[0] != n_bank:
        raise ConfigError("question and answer banks must be row-aligned")
    if candidates.shape[0] == 0:
        raise EmptyInput("no candidates to rank")
    if not (0 <= gt_index < candidates.shape[0]):
        raise ConfigError(f"gt_index {gt_index} out of range")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if k > n_bank:
        warnings.warn(f"k={k} exceeds bank size {n_bank}; clamping")
        k = n_bank
    if question_image is not None:
        if train_images is None or train_images.shape[0] != n_bank:
            raise ConfigError("train_images must align with the question bank")
        rep = np.concatenate([question, np.asarray(question_image, dtype=np.float64)])
        bank = np.hstack([train_questions, np.asarray(train_images, dtype=np.float64)])
    else:
        rep = question
        bank = train_questions
    sims = _cosine_against(bank, rep)
    neighbours = _order_by_score(sims)[:k]
    reference = train_answers[neighbours].mean(axis=0)
    scores = _cosine_against(candidates, reference)
    order = _order_by_score(scores)
    gt_rank = int(np.nonzero(order == gt_index)[0][0]) + 1
    return RankResult(question_id, order, scores[order], gt_rank)
