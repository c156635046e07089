"""Command-line interface.

Subcommands cover the pipeline stages (load, normalize, split, train, rank,
eval, augment, similarity) plus the reporting suites. A JSON config file
can seed any experiment flags; explicit command-line flags win over file
values.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .augment import (
    GenerationParams,
    NONE,
    STRATEGIES,
    augment_training,
)
from .corpus import (
    SCHEMA_PRESETS,
    Corpus,
    build_corpus,
    corpus_stats,
)
from .errors import ClaimCheckError, ConfigError
from .evaluation import reports_to_json
from .model import BaselineScorer, ScorerConfig, rank_records, train_scorer
from .preprocess import normalize_corpus_file
from .providers import make_providers
from .runner import (
    FEW_SHOT,
    SHOT_CHOICES,
    SUITES,
    ZERO_SHOT,
    config_from_mapping,
    run_suite,
    run_topic,
)
from .splits import (
    few_shot_split,
    make_holdouts,
    split_to_json,
    zero_shot_split,
)

__all__ = ["main", "build_parser"]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master random seed")
    p.add_argument("--backend", default=None, choices=("baseline", "encoder"),
                   help="scorer backend")
    p.add_argument("--shots", type=int, default=None,
                   help=f"few-shot pool prefix size, one of {SHOT_CHOICES}")
    p.add_argument("--strategy", default=None,
                   choices=(NONE,) + STRATEGIES, help="augmentation strategy")
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON file of experiment settings; flags override it")
    p.add_argument("--out", default=None, metavar="DIR", help="output location")
    p.add_argument("--providers", default=None,
                   help='provider set: "mock", "none", or "http:<base-url>"')
    p.add_argument("--holdout-k", type=int, default=None,
                   help="per-topic holdout pool size")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers for suite cells / provider calls")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimcheck",
        description="Cross-topic check-worthy claim detection experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="ingest TSV files into a corpus")
    p.add_argument("--input", action="append", required=True,
                   metavar="PRESET=PATH",
                   help=f"input file with schema preset "
                        f"({', '.join(sorted(SCHEMA_PRESETS))}); repeatable")
    p.add_argument("--allow-noncanonical", action="store_true",
                   help="skip the canonical 14-topic check")
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("normalize", help="normalize the text of a corpus file")
    p.add_argument("src", help="corpus JSONL to read")
    p.add_argument("dst", help="normalized JSONL to write")

    p = sub.add_parser("split", help="emit a leave-one-topic-out split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", required=True)
    _add_common(p)

    p = sub.add_parser("train", help="train a scorer on a split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", required=True)
    _add_common(p)

    p = sub.add_parser("rank", help="rank a topic's test records by P(CW)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--model", required=True, help="saved baseline model (.npz)")
    _add_common(p)

    p = sub.add_parser("eval", help="run one experiment cell end to end")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", required=True)
    _add_common(p)

    p = sub.add_parser("augment", help="generate synthetic samples for a pool")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", required=True)
    _add_common(p)

    p = sub.add_parser("similarity", help="pairwise topic similarity matrix")
    p.add_argument("--corpus", required=True)
    _add_common(p)

    p = sub.add_parser("suite", help="run a reporting suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--corpus", required=True)
    _add_common(p)

    return parser


def _experiment_config(args, setting=None, strategy=None, shots=None):
    """Merge config file values with explicit flags into an ExperimentConfig."""
    data = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        loaded.pop("corpus", None)
        loaded.pop("providers", None)
        data.update(loaded)
    overrides = {
        "seed": getattr(args, "seed", None),
        "backend_id": getattr(args, "backend", None),
        "shots": shots if shots is not None else getattr(args, "shots", None),
        "strategy": strategy if strategy is not None
                    else getattr(args, "strategy", None),
        "holdout_k": getattr(args, "holdout_k", None),
        "max_workers": getattr(args, "workers", None),
        "output_dir": getattr(args, "out", None),
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if setting is not None:
        data["setting"] = setting
    elif "setting" not in data:
        shots_val = data.get("shots", 0) or 0
        strat_val = data.get("strategy", NONE)
        data["setting"] = (FEW_SHOT if shots_val or strat_val != NONE
                           else ZERO_SHOT)
    if data["setting"] == ZERO_SHOT:
        data.setdefault("shots", 0)
        data.setdefault("strategy", NONE)
    return config_from_mapping(data)


def _providers_from(args):
    spec = getattr(args, "providers", None)
    if spec is None and getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if isinstance(loaded, dict):
            spec = loaded.get("providers")
    return make_providers(spec)


def _load_corpus(path) -> Corpus:
    return Corpus.from_jsonl(path)


def _cmd_load(args) -> int:
    inputs = []
    for item in args.input:
        preset, sep, path = item.partition("=")
        if not sep or preset not in SCHEMA_PRESETS:
            raise ConfigError(
                f"--input must look like PRESET=PATH with preset in "
                f"{sorted(SCHEMA_PRESETS)}, got {item!r}"
            )
        inputs.append((path, SCHEMA_PRESETS[preset]))
    corpus, report = build_corpus(
        inputs, require_canonical=not args.allow_noncanonical
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus.to_jsonl(out / "corpus.jsonl")
    stats = corpus_stats(corpus)
    (out / "stats.json").write_text(json.dumps({
        "total": stats.total_count,
        "topics": {t: {"cw": c[0], "ncw": c[1]}
                   for t, c in sorted(stats.per_topic.items())},
        "overall_cw_fraction": stats.overall_cw_fraction,
        "files": list(report.files),
        "duplicates_dropped": report.duplicates_dropped,
        "topics_before_merge": report.topics_before_merge,
        "topics_after_merge": report.topics_after_merge,
    }, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"loaded {stats.total_count} tweets across "
          f"{len(stats.per_topic)} topics "
          f"(CW fraction {stats.overall_cw_fraction:.3f}, "
          f"{report.duplicates_dropped} duplicates dropped)")
    print(f"wrote {out / 'corpus.jsonl'}")
    return 0


def _cmd_normalize(args) -> int:
    n = normalize_corpus_file(args.src, args.dst)
    print(f"normalized {n} records -> {args.dst}")
    return 0


def _cmd_split(args) -> int:
    config = _experiment_config(args)
    corpus = _load_corpus(args.corpus)
    holdouts = make_holdouts(corpus, config.holdout_k, config.seed)
    if config.setting == ZERO_SHOT:
        split = zero_shot_split(corpus, holdouts, args.target)
    else:
        split = few_shot_split(corpus, holdouts, args.target, config.shots)
    text = split_to_json(split, holdouts.pool(args.target))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _train_common(args):
    config = _experiment_config(args)
    corpus = _load_corpus(args.corpus)
    providers = _providers_from(args)
    holdouts = make_holdouts(corpus, config.holdout_k, config.seed)
    if config.setting == ZERO_SHOT:
        split = zero_shot_split(corpus, holdouts, args.target)
    else:
        split = few_shot_split(corpus, holdouts, args.target, config.shots)
    train_records = [corpus.record(i) for i in sorted(split.train)]
    if config.strategy != NONE:
        pool = [corpus.record(i)
                for i in holdouts.pool(args.target)[: config.shots]]
        train_records, _ = augment_training(
            train_records, pool, config.strategy, providers, config.seed,
            params=config.generation_params, ratio=config.ratio,
            pivot=config.pivot,
        )
    scorer = train_scorer(
        train_records,
        ScorerConfig(backend=config.backend_id,
                     hyperparams=config.hyperparams, seed=config.seed),
        providers,
    )
    return config, corpus, holdouts, split, scorer


def _cmd_train(args) -> int:
    config, _, _, split, scorer = _train_common(args)
    if not isinstance(scorer, BaselineScorer):
        raise ConfigError(
            "only the baseline backend produces a saveable model; "
            "encoder models live with their provider"
        )
    out = args.out or "model.npz"
    scorer.save(out)
    print(f"trained on {len(split.train)} records -> {out}")
    return 0


def _cmd_rank(args) -> int:
    config = _experiment_config(args)
    corpus = _load_corpus(args.corpus)
    scorer = BaselineScorer.load(args.model)
    holdouts = make_holdouts(corpus, config.holdout_k, config.seed)
    split = zero_shot_split(corpus, holdouts, args.target)
    records = [corpus.record(i) for i in sorted(split.test)]
    ranking = rank_records(scorer, records)
    labels = {r.tweet_id: r.label for r in records}
    rows = [(pos + 1, tid, ranking.scores[tid], labels[tid])
            for pos, tid in enumerate(ranking.order)]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rank", "tweet_id", "score", "label"])
            for rank, tid, score, label in rows:
                writer.writerow([rank, tid, "%.10f" % score, label])
        print(f"wrote {args.out}")
    else:
        for rank, tid, score, label in rows[:20]:
            print(f"{rank:4d}  {score:.4f}  {label:3s}  {tid}")
    return 0


def _cmd_eval(args) -> int:
    config = _experiment_config(args)
    corpus = _load_corpus(args.corpus)
    providers = _providers_from(args)
    report = run_topic(config, corpus, args.target, providers=providers)
    text = reports_to_json({args.target: report})
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    print(f"{args.target}: MAP {report.map:.4f} "
          f"(AP_cw {report.ap_cw:.4f}, AP_ncw {report.ap_ncw:.4f}, "
          f"P {report.precision:.2f}, R {report.recall:.2f}, "
          f"F1 {report.f1:.2f}, n={report.n_test})")
    return 0


def _cmd_augment(args) -> int:
    config = _experiment_config(args, setting=FEW_SHOT)
    if config.strategy == NONE:
        raise ConfigError("augment requires --strategy BT, CWE, or TxtGen")
    corpus = _load_corpus(args.corpus)
    providers = _providers_from(args)
    holdouts = make_holdouts(corpus, config.holdout_k, config.seed)
    pool = [corpus.record(i) for i in holdouts.pool(args.target)[: config.shots]]
    split = few_shot_split(corpus, holdouts, args.target, config.shots)
    train_records = [corpus.record(i) for i in sorted(split.train)]
    _, result = augment_training(
        train_records, pool, config.strategy, providers, config.seed,
        params=config.generation_params, ratio=config.ratio, pivot=config.pivot,
    )
    out = args.out or "synthetic.jsonl"
    with open(out, "w", encoding="utf-8") as fh:
        for sample in result.samples:
            fh.write(json.dumps({
                "origin_tweet_id": sample.origin_tweet_id,
                "text": sample.text,
                "label": sample.label,
                "strategy": sample.strategy,
            }, ensure_ascii=False) + "\n")
    print(f"{config.strategy}: {len(result.samples)} synthetic, "
          f"{len(result.skips)} skipped, "
          f"{result.identical_count} identical to seed -> {out}")
    for origin, reason in result.skips:
        print(f"  skipped {origin}: {reason}")
    return 0


def _cmd_similarity(args) -> int:
    from .topicsim import difficulty_ranking, matrix_to_csv, matrix_to_json, \
        similarity_matrix

    corpus = _load_corpus(args.corpus)
    providers = _providers_from(args)
    if providers.embedder is None:
        raise ConfigError("similarity requires an embedder provider")
    matrix = similarity_matrix(corpus, providers.embedder)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    matrix_to_csv(matrix, out / "similarity.csv")
    (out / "similarity.json").write_text(matrix_to_json(matrix) + "\n",
                                         encoding="utf-8")
    print(f"wrote {out / 'similarity.csv'}")
    print("most isolated topics first:")
    for topic_id, mean in difficulty_ranking(matrix):
        print(f"  {mean:.4f}  {topic_id}")
    return 0


def _cmd_suite(args) -> int:
    setting = None
    strategy = None
    shots = None
    if args.suite == "table2":
        setting, strategy, shots = ZERO_SHOT, NONE, 0
    config = _experiment_config(args, setting=setting, strategy=strategy,
                                shots=shots)
    corpus = _load_corpus(args.corpus)
    providers = _providers_from(args)
    record = run_suite(args.suite, corpus, config, providers=providers,
                       out_dir=args.out)
    out = Path(args.out if args.out is not None else config.output_dir)
    ok = len(record.cells) - len(record.failures)
    print(f"suite {args.suite}: {ok}/{len(record.cells)} cells ok")
    for key in sorted(record.aggregates):
        agg = record.aggregates[key]
        print(f"  {key}: mean MAP {agg['map']:.4f} over {agg['topics']} topics")
    for failure in record.failures:
        print(f"  FAILED {failure['cell']}: {failure['error']}")
    print(f"wrote {out / 'report.md'}, {out / 'cells.csv'}, {out / 'run.json'}")
    return 1 if record.failures else 0


_COMMANDS = {
    "load": _cmd_load,
    "normalize": _cmd_normalize,
    "split": _cmd_split,
    "train": _cmd_train,
    "rank": _cmd_rank,
    "eval": _cmd_eval,
    "augment": _cmd_augment,
    "similarity": _cmd_similarity,
    "suite": _cmd_suite,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ClaimCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
