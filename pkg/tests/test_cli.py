"""End-to-end command-line tests, driven in process through main()."""

import json

import pytest

from claimcheck.cli import build_parser, main, _experiment_config
from claimcheck.corpus import Corpus
from claimcheck.runner import FEW_SHOT, ZERO_SHOT

from synth import tiny_corpus


def write_simple_tsv(path, corpus):
    """Serialize records in the four-column headerless layout."""
    lines = []
    for rec in corpus.records:
        text = rec.text.replace("\t", " ")
        lines.append(f"{rec.topic_id}\t{rec.tweet_id}\t{text}\t{rec.label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture(scope="module")
def corpus_jsonl(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    tsv = root / "tweets.tsv"
    write_simple_tsv(tsv, tiny_corpus(3, per_topic=120))
    rc = main(["load", "--input", f"simple={tsv}", "--allow-noncanonical",
               "--out", str(root / "loaded")])
    assert rc == 0
    return root / "loaded" / "corpus.jsonl"


# ---------------------------------------------------------------------------
# load and normalize


def test_load_writes_corpus_and_stats(corpus_jsonl):
    assert corpus_jsonl.exists()
    stats = json.loads(
        corpus_jsonl.with_name("stats.json").read_text(encoding="utf-8"))
    assert stats["total"] == 360
    assert set(stats["topics"]) == {"S-A", "S-B", "S-C"}
    assert stats["duplicates_dropped"] == 0


def test_load_rejects_malformed_input_spec(tmp_path, capsys):
    rc = main(["load", "--input", "nosuchpreset=/tmp/x.tsv",
               "--out", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_load_enforces_canonical_topics_by_default(tmp_path, capsys):
    tsv = tmp_path / "tweets.tsv"
    write_simple_tsv(tsv, tiny_corpus(3, per_topic=10))
    rc = main(["load", "--input", f"simple={tsv}", "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_normalize_is_idempotent_at_file_level(corpus_jsonl, tmp_path):
    once = tmp_path / "once.jsonl"
    twice = tmp_path / "twice.jsonl"
    assert main(["normalize", str(corpus_jsonl), str(once)]) == 0
    assert main(["normalize", str(once), str(twice)]) == 0
    first = [json.loads(l)["text"] for l in
             once.read_text(encoding="utf-8").splitlines()]
    second = [json.loads(l)["text"] for l in
              twice.read_text(encoding="utf-8").splitlines()]
    assert first == second
    assert len(first) == len(list(Corpus.from_jsonl(corpus_jsonl).records))


# ---------------------------------------------------------------------------
# split / train / rank / eval


def test_split_zero_shot_excludes_target(corpus_jsonl, tmp_path):
    out = tmp_path / "split.json"
    rc = main(["split", "--corpus", str(corpus_jsonl), "--target", "S-A",
               "--holdout-k", "30", "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text(encoding="utf-8"))
    assert blob["target"] == "S-A"
    assert blob["shots"] == 0
    assert all(not i.startswith("S-A") for i in blob["train_ids"])
    assert all(i.startswith("S-A") for i in blob["test_ids"])


def test_split_few_shot_adds_pool_prefix(corpus_jsonl, tmp_path):
    out = tmp_path / "split.json"
    rc = main(["split", "--corpus", str(corpus_jsonl), "--target", "S-A",
               "--holdout-k", "50", "--shots", "50", "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text(encoding="utf-8"))
    assert blob["shots"] == 50
    target_train = [i for i in blob["train_ids"] if i.startswith("S-A")]
    assert sorted(target_train) == sorted(blob["shot_ids"])
    assert len(target_train) == 50


def test_train_rank_round_trip(corpus_jsonl, tmp_path, capsys):
    model = tmp_path / "model.npz"
    rc = main(["train", "--corpus", str(corpus_jsonl), "--target", "S-B",
               "--holdout-k", "30", "--out", str(model)])
    assert rc == 0
    assert model.exists()

    ranked = tmp_path / "ranked.csv"
    rc = main(["rank", "--corpus", str(corpus_jsonl), "--target", "S-B",
               "--model", str(model), "--holdout-k", "30",
               "--out", str(ranked)])
    assert rc == 0
    lines = ranked.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "rank,tweet_id,score,label"
    assert len(lines) == 1 + 90  # 120 records minus the 30-tweet pool


def test_eval_reports_map(corpus_jsonl, tmp_path, capsys):
    out = tmp_path / "eval.json"
    rc = main(["eval", "--corpus", str(corpus_jsonl), "--target", "S-C",
               "--holdout-k", "30", "--out", str(out)])
    assert rc == 0
    assert "MAP" in capsys.readouterr().out
    blob = json.loads(out.read_text(encoding="utf-8"))
    assert "S-C" in json.dumps(blob)


def test_eval_unknown_target_exits_two(corpus_jsonl, capsys):
    rc = main(["eval", "--corpus", str(corpus_jsonl), "--target", "S-Z",
               "--holdout-k", "30"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_missing_corpus_file_exits_two(tmp_path, capsys):
    rc = main(["eval", "--corpus", str(tmp_path / "nope.jsonl"),
               "--target", "S-A"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# augment and similarity


def test_augment_writes_synthetic_samples(corpus_jsonl, tmp_path, capsys):
    out = tmp_path / "synthetic.jsonl"
    rc = main(["augment", "--corpus", str(corpus_jsonl), "--target", "S-A",
               "--strategy", "CWE", "--shots", "50", "--holdout-k", "50",
               "--providers", "mock", "--out", str(out)])
    assert rc == 0
    samples = [json.loads(l) for l in
               out.read_text(encoding="utf-8").splitlines()]
    assert len(samples) == 50
    assert all(s["strategy"] == "CWE" for s in samples)
    assert all(s["origin_tweet_id"].startswith("S-A") for s in samples)


def test_augment_requires_a_strategy(corpus_jsonl, capsys):
    rc = main(["augment", "--corpus", str(corpus_jsonl), "--target", "S-A",
               "--shots", "50", "--holdout-k", "50", "--providers", "mock"])
    assert rc == 2
    assert "strategy" in capsys.readouterr().err


def test_similarity_writes_matrix(corpus_jsonl, tmp_path, capsys):
    rc = main(["similarity", "--corpus", str(corpus_jsonl),
               "--providers", "mock", "--out", str(tmp_path)])
    assert rc == 0
    blob = json.loads((tmp_path / "similarity.json").read_text(encoding="utf-8"))
    assert blob["topic_ids"] == ["S-A", "S-B", "S-C"]
    assert (tmp_path / "similarity.csv").exists()


def test_similarity_requires_embedder(corpus_jsonl, capsys):
    rc = main(["similarity", "--corpus", str(corpus_jsonl),
               "--providers", "none"])
    assert rc == 2
    assert "embedder" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# suites


def test_suite_table2_runs_clean(corpus_jsonl, tmp_path, capsys):
    rc = main(["suite", "table2", "--corpus", str(corpus_jsonl),
               "--holdout-k", "30", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "3/3 cells ok" in out
    for name in ("report.md", "cells.csv", "run.json"):
        assert (tmp_path / name).exists()


def test_suite_exits_nonzero_on_failed_cells(corpus_jsonl, tmp_path, capsys):
    rc = main(["suite", "table3", "--corpus", str(corpus_jsonl),
               "--shots", "50", "--holdout-k", "50", "--providers", "none",
               "--out", str(tmp_path)])
    assert rc == 1
    assert "FAILED" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# configuration plumbing


def test_config_file_feeds_experiment_settings(corpus_jsonl, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "setting": FEW_SHOT, "shots": 50, "holdout_k": 50, "seed": 5,
    }), encoding="utf-8")
    args = build_parser().parse_args(
        ["split", "--corpus", str(corpus_jsonl), "--target", "S-A",
         "--config", str(config)])
    cfg = _experiment_config(args)
    assert cfg.setting == FEW_SHOT
    assert cfg.shots == 50
    assert cfg.seed == 5


def test_flags_override_config_file(corpus_jsonl, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "setting": FEW_SHOT, "shots": 50, "holdout_k": 200, "seed": 5,
    }), encoding="utf-8")
    args = build_parser().parse_args(
        ["split", "--corpus", str(corpus_jsonl), "--target", "S-A",
         "--config", str(config), "--seed", "9", "--shots", "100"])
    cfg = _experiment_config(args)
    assert cfg.seed == 9
    assert cfg.shots == 100


def test_setting_inferred_from_flags(corpus_jsonl):
    args = build_parser().parse_args(
        ["split", "--corpus", str(corpus_jsonl), "--target", "S-A"])
    assert _experiment_config(args).setting == ZERO_SHOT
    args = build_parser().parse_args(
        ["split", "--corpus", str(corpus_jsonl), "--target", "S-A",
         "--shots", "50", "--holdout-k", "50"])
    assert _experiment_config(args).setting == FEW_SHOT


def test_providers_spec_from_config_file(corpus_jsonl, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"providers": "mock"}), encoding="utf-8")
    out = tmp_path / "synthetic.jsonl"
    rc = main(["augment", "--corpus", str(corpus_jsonl), "--target", "S-B",
               "--strategy", "BT", "--shots", "50", "--holdout-k", "50",
               "--config", str(config), "--out", str(out)])
    assert rc == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 50
