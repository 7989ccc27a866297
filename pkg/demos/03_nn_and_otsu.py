"""Nearest-neighbour modes and the Otsu score-split analysis.

Two retrieval strategies over the same data: ranking candidates through the
learned shared space versus a raw-feature nearest-neighbour baseline that
averages the answers of similar training questions. The Otsu section then
thresholds one question's candidate scores into a high-scoring equivalence
class and the rest.
"""

import numpy as np

from mvcca import cca, dataio, metrics, ranking

TRAIN = 1000

cfg = dataio.SynthConfig(latent_dim=4, view_dims=(10, 10),
                         rho=(0.9, 0.7, 0.5, 0.3), n_samples=1500,
                         seed=21, n_candidates=20)
views, records = dataio.synth_generate(cfg)
questions, answers = views

specs = [cca.ViewSpec("question", 10), cca.ViewSpec("answer", 10)]
model = cca.fit([questions[:TRAIN].T, answers[:TRAIN].T], specs,
                cca.CcaConfig(p=10, q=1.0))

cca_ranks, nn_ranks = [], []
for rec in records:
    if rec.question_row < TRAIN:
        continue
    q = questions[rec.question_row]
    cand = answers[np.asarray(rec.candidate_rows)]
    cca_ranks.append(
        ranking.rank_candidates(model, q, cand, rec.gt_index).gt_rank)
    nn_ranks.append(
        ranking.nn_baseline_rank(q, cand, rec.gt_index, questions[:TRAIN],
                                 answers[:TRAIN], k=50).gt_rank)

print(f"CCA mean rank:         {metrics.mean_rank(cca_ranks):6.2f}")
print(f"NN baseline mean rank: {metrics.mean_rank(nn_ranks):6.2f}")

# generative-style retrieval: pull answers of the k most similar questions
rec = next(r for r in records if r.question_row >= TRAIN)
res = ranking.nn_retrieve(model, questions[rec.question_row],
                          questions[:TRAIN], answers[:TRAIN], k=100, top=5)
print("\ntop retrieved train rows:", [int(r) for r in res.rows])
print("their scores:            ", np.round(res.scores, 3))

# Otsu split of one question's candidate scores
rank_res = ranking.rank_candidates(
    model, questions[rec.question_row],
    answers[np.asarray(rec.candidate_rows)], rec.gt_index)
t = metrics.otsu_threshold(rank_res.scores)
above = int(np.sum(rank_res.scores > t))
print(f"\notsu threshold {t:.3f}: {above} of {len(rank_res.scores)} "
      f"candidates in the high-scoring class")
