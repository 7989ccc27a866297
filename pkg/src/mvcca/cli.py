"""Batch command-line interface.

Subcommands: fit, evaluate, rank, nn-retrieve, nn-baseline, synth, pool.
Diagnostics go to stderr; machine output goes to files (or stdout when no
--out is given).  Every subcommand is deterministic given identical files
and flags, including across --threads settings.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import cca, dataio, metrics, ranking
from .errors import ConfigError, MvccaError


def _default_threads():
    env = os.environ.get("MVCCA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _epsilon_arg(text):
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"epsilon must be a number or 'auto': {text!r}")
    return value


def _load_views(args):
    paths = [("question", args.questions), ("answer", args.answers)]
    if getattr(args, "images", None):
        paths.append(("image", args.images))
    views, specs = [], []
    for name, path in paths:
        M = dataio.read_feature_matrix(path)
        views.append(M.T)  # files are sample-rows; fit wants (n_i, N)
        specs.append(cca.ViewSpec(name, M.shape[1]))
    return views, specs


def cmd_fit(args):
    t0 = time.perf_counter()
    views, specs = _load_views(args)
    config = cca.CcaConfig(p=args.p, q=args.q, epsilon=args.epsilon)
    model = cca.fit(views, specs, config)
    cca.save_model(model, args.model)
    elapsed = time.perf_counter() - t0
    dims = ", ".join(f"{s.name}={s.dim}" for s in specs)
    head = " ".join(f"{v:.4f}" for v in model.eigenvalues[:5])
    print(
        f"fit: views [{dims}] N={model.sample_count} p={model.config.p} "
        f"q={model.config.q} epsilon={model.config.epsilon:.3e} "
        f"params={model.parameter_count} eigenvalues=[{head} ...] "
        f"time={elapsed:.2f}s",
    )
    return 0


def _gather_question(questions, answers, rec):
    if not (0 <= rec.question_row < questions.shape[0]):
        raise ConfigError(
            f"question_id {rec.question_id}: question_row {rec.question_row} "
            f"out of bounds for {questions.shape[0]} rows"
        )
    for row in rec.candidate_rows:
        if not (0 <= row < answers.shape[0]):
            raise ConfigError(
                f"question_id {rec.question_id}: candidate row {row} "
                f"out of bounds for {answers.shape[0]} rows"
            )
    return questions[rec.question_row], answers[np.asarray(rec.candidate_rows)]


def _rank_all(model, questions, answers, records, threads):
    results = [None] * len(records)

    def work(span):
        lo, hi = span
        for idx in range(lo, hi):
            rec = records[idx]
            q, cand = _gather_question(questions, answers, rec)
            results[idx] = ranking.rank_candidates(
                model, q, cand, rec.gt_index, question_id=rec.question_id)

    chunk = max(1, (len(records) + threads - 1) // threads)
    spans = [(lo, min(lo + chunk, len(records)))
             for lo in range(0, len(records), chunk)]
    if threads <= 1 or len(spans) <= 1:
        for span in spans:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    return results


def cmd_evaluate(args):
    model = cca.load_model(args.model)
    questions = dataio.read_feature_matrix(args.questions)
    answers = dataio.read_feature_matrix(args.answers)
    records = dataio.read_candidates(args.candidates)
    if not records:
        raise MvccaError("candidate file holds no records")
    if args.ndcg and any(rec.relevance is None for rec in records):
        raise MvccaError(
            "--ndcg requires relevance scores on every candidate record")
    # fixed question order keeps aggregation bit-stable
    try:
        records = sorted(records, key=lambda r: r.question_id)
    except TypeError:
        records = sorted(records, key=lambda r: str(r.question_id))
    results = _rank_all(model, questions, answers, records, args.threads)

    ranks = [r.gt_rank for r in results]
    ranked_relevances = None
    if args.ndcg:
        ranked_relevances = [
            np.asarray(rec.relevance)[res.ordering]
            for rec, res in zip(records, results)
        ]
    otsu_questions = None
    if args.otsu:
        otsu_questions = []
        for rec, res in zip(records, results):
            gt_pos = int(np.nonzero(res.ordering == rec.gt_index)[0][0])
            otsu_questions.append((res.scores, float(res.scores[gt_pos])))
    report = metrics.build_report(ranks, ranked_relevances, otsu_questions)
    payload = json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        print(metrics.format_table(report))
    else:
        sys.stdout.write(payload)
        print(metrics.format_table(report), file=sys.stderr)
    return 0


def _emit_jsonl(lines, out):
    payload = "".join(json.dumps(obj) + "\n" for obj in lines)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def cmd_rank(args):
    model = cca.load_model(args.model)
    questions = dataio.read_feature_matrix(args.questions)
    answers = dataio.read_feature_matrix(args.answers)
    records = dataio.read_candidates(args.candidates)
    lines = []
    for rec in records:
        q, cand = _gather_question(questions, answers, rec)
        res = ranking.rank_candidates(model, q, cand, rec.gt_index,
                                      question_id=rec.question_id)
        lines.append({
            "question_id": rec.question_id,
            "ordering": [int(i) for i in res.ordering],
            "scores": [float(s) for s in res.scores],
            "gt_rank": res.gt_rank,
        })
    _emit_jsonl(lines, args.out)
    return 0


def cmd_nn_retrieve(args):
    model = cca.load_model(args.model)
    queries = dataio.read_feature_matrix(args.questions)
    train_q = dataio.read_feature_matrix(args.train_questions)
    train_a = dataio.read_feature_matrix(args.train_answers)
    lines = []
    for i in range(queries.shape[0]):
        res = ranking.nn_retrieve(model, queries[i], train_q, train_a,
                                  k=args.k, top=args.top, question_id=i)
        lines.append({
            "question_id": i,
            "rows": [int(r) for r in res.rows],
            "scores": [float(s) for s in res.scores],
        })
    _emit_jsonl(lines, args.out)
    return 0


def cmd_nn_baseline(args):
    questions = dataio.read_feature_matrix(args.questions)
    answers = dataio.read_feature_matrix(args.answers)
    records = dataio.read_candidates(args.candidates)
    train_q = dataio.read_feature_matrix(args.train_questions)
    train_a = dataio.read_feature_matrix(args.train_answers)
    images = train_images = None
    if args.images or args.train_images:
        if not (args.images and args.train_images):
            raise MvccaError("--images and --train-images must be given together")
        images = dataio.read_feature_matrix(args.images)
        train_images = dataio.read_feature_matrix(args.train_images)
    lines, ranks = [], []
    for rec in records:
        q, cand = _gather_question(questions, answers, rec)
        img = images[rec.question_row] if images is not None else None
        res = ranking.nn_baseline_rank(
            q, cand, rec.gt_index, train_q, train_a, args.k,
            question_image=img, train_images=train_images,
            question_id=rec.question_id)
        ranks.append(res.gt_rank)
        lines.append({
            "question_id": rec.question_id,
            "ordering": [int(i) for i in res.ordering],
            "scores": [float(s) for s in res.scores],
            "gt_rank": res.gt_rank,
        })
    _emit_jsonl(lines, args.out)
    report = metrics.build_report(ranks)
    print(metrics.format_table(report), file=sys.stderr)
    return 0


def cmd_synth(args):
    dims = tuple(args.dims)
    config = dataio.SynthConfig(
        latent_dim=args.latent_dim,
        view_dims=dims,
        rho=tuple(args.rho),
        n_samples=args.n,
        noise_scale=args.noise,
        seed=args.seed,
        n_candidates=args.candidates_per_question,
    )
    views, records = dataio.synth_generate(config)
    if not (0 <= args.train_rows < config.n_samples):
        raise MvccaError("--train-rows must lie in [0, n)")
    os.makedirs(args.out, exist_ok=True)
    names = ["questions", "answers", "images"][: len(views)]
    for name, M in zip(names, views):
        dataio.write_feature_matrix(os.path.join(args.out, f"{name}.vdf"), M)
        if args.train_rows:
            dataio.write_feature_matrix(
                os.path.join(args.out, f"{name}_train.vdf"), M[: args.train_rows])
    if args.train_rows:
        # held-out protocol: fit on *_train files, evaluate the remaining
        # questions (candidate rows still index the full answer file)
        records = [r for r in records if r.question_row >= args.train_rows]
    dataio.write_candidates(os.path.join(args.out, "candidates.jsonl"), records)
    print(
        f"synth: wrote {len(views)} views ({', '.join(names)}), "
        f"N={config.n_samples}, {config.n_candidates} candidates/question "
        f"to {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_pool(args):
    table = dataio.load_embedding_table(args.table)
    rows = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for line in fh:
            tokens = dataio.tokenize(line)
            rows.append(dataio.sentence_embedding(
                tokens, table, max_len=args.max_len, pooling=args.pooling))
    if not rows:
        raise MvccaError("input text file holds no lines")
    dataio.write_feature_matrix(args.out, np.vstack(rows))
    print(f"pool: wrote {len(rows)}x{table.dim} features to {args.out}",
          file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvcca",
        description="Multi-view CCA fitting, ranking, and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a model from view feature files")
    fit.add_argument("--questions", required=True)
    fit.add_argument("--answers", required=True)
    fit.add_argument("--images", help="optional third view")
    fit.add_argument("--model", required=True, help="output model path")
    fit.add_argument("--p", type=int, required=True)
    fit.add_argument("--q", type=float, default=1.0)
    fit.add_argument("--epsilon", type=_epsilon_arg, default=None,
                     help="diagonal ridge; number or 'auto' (default)")
    fit.add_argument("--out", help="unused; accepted for flag uniformity")
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("evaluate", help="rank candidates and report metrics")
    ev.add_argument("--model", required=True)
    ev.add_argument("--questions", required=True)
    ev.add_argument("--answers", required=True)
    ev.add_argument("--candidates", required=True)
    ev.add_argument("--otsu", action="store_true")
    ev.add_argument("--ndcg", action="store_true")
    ev.add_argument("--threads", type=int, default=_default_threads())
    ev.add_argument("--out", help="JSON report path (default: stdout)")
    ev.set_defaults(func=cmd_evaluate)

    rank = sub.add_parser("rank", help="per-question rankings as JSON lines")
    rank.add_argument("--model", required=True)
    rank.add_argument("--questions", required=True)
    rank.add_argument("--answers", required=True)
    rank.add_argument("--candidates", required=True)
    rank.add_argument("--out")
    rank.set_defaults(func=cmd_rank)

    nnr = sub.add_parser("nn-retrieve",
                         help="answers of the k best-correlated train questions")
    nnr.add_argument("--model", required=True)
    nnr.add_argument("--questions", required=True, help="query question features")
    nnr.add_argument("--train-questions", required=True)
    nnr.add_argument("--train-answers", required=True)
    nnr.add_argument("--k", type=int, default=100)
    nnr.add_argument("--top", type=int, default=10)
    nnr.add_argument("--out")
    nnr.set_defaults(func=cmd_nn_retrieve)

    nnb = sub.add_parser("nn-baseline",
                         help="raw-feature nearest-neighbour ranking baseline")
    nnb.add_argument("--questions", required=True)
    nnb.add_argument("--answers", required=True)
    nnb.add_argument("--candidates", required=True)
    nnb.add_argument("--train-questions", required=True)
    nnb.add_argument("--train-answers", required=True)
    nnb.add_argument("--images")
    nnb.add_argument("--train-images")
    nnb.add_argument("--k", type=int, default=100)
    nnb.add_argument("--out")
    nnb.set_defaults(func=cmd_nn_baseline)

    synth = sub.add_parser("synth", help="generate synthetic correlated views")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--latent-dim", type=int, default=4)
    synth.add_argument("--dims", type=int, nargs="+", default=[24, 24])
    synth.add_argument("--rho", type=float, nargs="+",
                       default=[0.9, 0.7, 0.5, 0.3])
    synth.add_argument("--n", type=int, default=1000)
    synth.add_argument("--noise", type=float, default=1.0)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--candidates-per-question", type=int, default=100)
    synth.add_argument("--train-rows", type=int, default=0,
                       help="also emit *_train.vdf with the first T rows and "
                            "keep only held-out questions in candidates.jsonl")
    synth.set_defaults(func=cmd_synth)

    pool = sub.add_parser("pool", help="mean-pool token embeddings per line")
    pool.add_argument("--input", required=True, help="one sentence per line")
    pool.add_argument("--table", required=True, help="token embedding table")
    pool.add_argument("--pooling", choices=["present-mean", "fixed-16"],
                      default="present-mean")
    pool.add_argument("--max-len", type=int, default=16)
    pool.add_argument("--out", required=True, help="output VDF1 path")
    pool.set_defaults(func=cmd_pool)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MvccaError as exc:
        print(f"mvcca {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
