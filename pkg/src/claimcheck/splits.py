"""Cross-topic experiment splits.

For every topic a fixed holdout pool is sampled once per seed; the topic's
test set is everything outside that pool. Zero-shot training data is all
other topics; few-shot training data additionally takes a prefix of the
holdout pool, so shot sweeps are nested and every setting shares the exact
same test set.
"""

from __future__ import annotations

import hashlib
import json
import random
import warnings
from dataclasses import dataclass

from .corpus import CW, Corpus
from .errors import SplitError

__all__ = ["HoldoutTable", "TopicSplit", "make_holdouts", "zero_shot_split",
           "few_shot_split", "split_to_json"]


@dataclass(frozen=True)
class HoldoutTable:
    """Per-topic held-out id pools, fully determined by (corpus, seed)."""

    seed: int
    k: int
    per_topic: dict  # topic_id -> tuple of tweet_ids in fixed order

    def pool(self, topic_id: str) -> tuple:
        if topic_id not in self.per_topic:
            raise SplitError(f"no holdout pool for topic {topic_id!r}")
        return self.per_topic[topic_id]


@dataclass(frozen=True)
class TopicSplit:
    target_topic_id: str
    train: frozenset
    test: frozenset
    few_shot_used: int
    seed: int

    def __post_init__(self):
        overlap = self.train & self.test
        if overlap:
            raise SplitError(
                f"train/test leakage for {self.target_topic_id}: "
                f"{len(overlap)} shared ids"
            )

    def test_hash(self) -> str:
        digest = hashlib.sha256("\n".join(sorted(self.test)).encode("utf-8"))
        return digest.hexdigest()


def _stratified_pool(records, k: int, rng: random.Random) -> list:
    """Sample k ids, matching the records' label mix up to rounding."""
    cw_ids = sorted(r.tweet_id for r in records if r.label == CW)
    ncw_ids = sorted(r.tweet_id for r in records if r.label != CW)
    total = len(cw_ids) + len(ncw_ids)
    if k >= total:
        pool = cw_ids + ncw_ids
    else:
        n_cw = round(k * len(cw_ids) / total)
        n_cw = min(max(n_cw, k - len(ncw_ids)), len(cw_ids))
        rng.shuffle(cw_ids)
        rng.shuffle(ncw_ids)
        pool = cw_ids[:n_cw] + ncw_ids[:k - n_cw]
    # one final shuffle so pool prefixes (the shot subsets) stay mixed
    rng.shuffle(pool)
    return pool


def make_holdouts(corpus: Corpus, k: int = 200, seed: int = 0) -> HoldoutTable:
    """Sample one label-stratified holdout pool of size min(k, n) per topic.

    Sampling is keyed on (seed, topic id) and on sorted record ids, so the
    result does not depend on corpus file order. Topics smaller than k are
    held out whole, which leaves an empty test set; that is flagged with a
    warning rather than an error.
    """
    if k < 1:
        raise SplitError(f"holdout size must be >= 1, got {k}")
    per_topic = {}
    for topic_id in corpus.topic_ids():
        records = corpus.records_for(topic_id)
        if not records:
            raise SplitError(f"topic {topic_id!r} has no records")
        rng = random.Random(f"{seed}|holdout|{topic_id}")
        pool = _stratified_pool(records, k, rng)
        if len(pool) >= len(records):
            warnings.warn(
                f"topic {topic_id}: holdout of {k} covers all "
                f"{len(records)} records, test set is empty",
                stacklevel=2,
            )
        per_topic[topic_id] = tuple(pool)
    return HoldoutTable(seed=seed, k=k, per_topic=per_topic)


def _test_ids(corpus: Corpus, holdouts: HoldoutTable, target: str) -> frozenset:
    pool = set(holdouts.pool(target))
    return frozenset(
        r.tweet_id for r in corpus.records_for(target) if r.tweet_id not in pool
    )


def zero_shot_split(corpus: Corpus, holdouts: HoldoutTable, target: str) -> TopicSplit:
    """Train on every other topic; the target contributes test data only."""
    if target not in corpus.topic_ids():
        raise SplitError(f"unknown target topic: {target!r}")
    train = frozenset(
        r.tweet_id for r in corpus.records if r.topic_id != target
    )
    return TopicSplit(
        target_topic_id=target,
        train=train,
        test=_test_ids(corpus, holdouts, target),
        few_shot_used=0,
        seed=holdouts.seed,
    )


def few_shot_split(corpus: Corpus, holdouts: HoldoutTable, target: str,
                   shots: int) -> TopicSplit:
    """Zero-shot training data plus the first `shots` ids of the target pool.

    The test set is identical (as a set) to the zero-shot test set for the
    same corpus and seed.
    """
    if target not in corpus.topic_ids():
        raise SplitError(f"unknown target topic: {target!r}")
    if shots < 0:
        raise SplitError(f"shots must be >= 0, got {shots}")
    pool = holdouts.pool(target)
    if shots > len(pool):
        raise SplitError(
            f"requested {shots} shots but the {target} holdout pool "
            f"has only {len(pool)} records"
        )
    base = zero_shot_split(corpus, holdouts, target)
    return TopicSplit(
        target_topic_id=target,
        train=base.train | frozenset(pool[:shots]),
        test=base.test,
        few_shot_used=shots,
        seed=holdouts.seed,
    )


def split_to_json(split: TopicSplit, shots_pool: tuple = ()) -> str:
    """Serialize one split; id lists are sorted for stable output."""
    return json.dumps({
        "target": split.target_topic_id,
        "seed": split.seed,
        "shots": split.few_shot_used,
        "train_ids": sorted(split.train),
        "test_ids": sorted(split.test),
        "test_hash": split.test_hash(),
        "stratified_holdout": True,
        "shot_ids": list(shots_pool[:split.few_shot_used]),
    }, ensure_ascii=False, indent=2)
