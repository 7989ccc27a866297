"""End-to-end retrieval on synthetic data: generate, fit, rank, report.

Mirrors what the CLI does (synth -> fit -> evaluate) but through the
library, so each stage's objects are visible. The model is fit on a train
split and candidates are ranked for held-out questions only; with strong
planted correlation the mean rank lands far below the random baseline
(half the candidate count plus a half).
"""

import numpy as np

from mvcca import cca, dataio, metrics, ranking

TRAIN = 3000

cfg = dataio.SynthConfig(latent_dim=8, view_dims=(16, 16),
                         rho=(0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2),
                         n_samples=4000, seed=7, n_candidates=100)
views, records = dataio.synth_generate(cfg)
questions, answers = views

specs = [cca.ViewSpec("question", 16), cca.ViewSpec("answer", 16)]
model = cca.fit([questions[:TRAIN].T, answers[:TRAIN].T], specs,
                cca.CcaConfig(p=16, q=1.0))

ranks = []
otsu_questions = []
for rec in records:
    if rec.question_row < TRAIN:
        continue
    res = ranking.rank_candidates(
        model, questions[rec.question_row],
        answers[np.asarray(rec.candidate_rows)], rec.gt_index,
        question_id=rec.question_id)
    ranks.append(res.gt_rank)
    gt_pos = int(np.nonzero(res.ordering == rec.gt_index)[0][0])
    otsu_questions.append((res.scores, float(res.scores[gt_pos])))

report = metrics.build_report(ranks, otsu_questions=otsu_questions)
print(metrics.format_table(report))
print(f"\nrandom baseline MR would be {(cfg.n_candidates + 1) / 2:.1f} "
      f"over {report.question_count} held-out questions")
