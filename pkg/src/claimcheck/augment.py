"""Data augmentation for few-shot seeds: back translation, contextual word
substitution, and text generation.

Each strategy turns every few-shot pool sample into at most one synthetic
sample carrying the seed's label. Provider failures never abort a run: the
sample is skipped and the skip recorded, so |synthetic| + |skips| always
equals the pool size. All randomness is derived from the run seed plus the
origin tweet id, so results are reproducible and independent of provider
call order.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .cache import JsonCache, stable_hash
from .corpus import TweetRecord
from .errors import AugmentError
from .preprocess import PLACEHOLDERS
from .providers import MASK_TOKEN

BT = "BT"
CWE = "CWE"
TXTGEN = "TxtGen"
NONE = "none"
STRATEGIES = (BT, CWE, TXTGEN)
SYNTHETIC_SOURCE = "synthetic"

__all__ = [
    "BT", "CWE", "TXTGEN", "NONE", "STRATEGIES", "SYNTHETIC_SOURCE",
    "AugmentedSample", "GenerationParams", "AugmentationResult",
    "back_translate", "contextual_substitute", "generate_samples",
    "augment_training", "synthetic_record",
]


@dataclass(frozen=True)
class AugmentedSample:
    origin_tweet_id: str
    text: str
    label: str
    strategy: str

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise AugmentError(f"unknown strategy {self.strategy!r}")
        if not self.text:
            raise AugmentError(f"empty synthetic text for {self.origin_tweet_id}")


@dataclass(frozen=True)
class GenerationParams:
    num_beams: int = 5
    max_length: int = 200
    top_p: float = 0.75
    repetition_penalty: float = 3
    no_repeat_ngram_size: int = 3

    def to_dict(self) -> dict:
        return {
            "num_beams": self.num_beams,
            "max_length": self.max_length,
            "top_p": self.top_p,
            "repetition_penalty": self.repetition_penalty,
            "no_repeat_ngram_size": self.no_repeat_ngram_size,
        }


@dataclass(frozen=True)
class AugmentationResult:
    """Synthetic samples plus the skip log for one strategy run."""

    strategy: str
    pool_size: int
    samples: tuple = ()
    skips: tuple = ()  # (origin_tweet_id, reason) pairs
    identical_count: int = 0

    def __post_init__(self):
        if len(self.samples) + len(self.skips) != self.pool_size:
            raise AugmentError(
                f"samples ({len(self.samples)}) + skips ({len(self.skips)}) "
                f"!= pool size ({self.pool_size})"
            )


def _run_per_sample(records, worker, max_workers=None):
    """Apply worker to each record, assembling results in input order."""
    records = list(records)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(worker, records))
    else:
        outcomes = [worker(r) for r in records]
    samples, skips, identical = [], [], 0
    for record, outcome in zip(records, outcomes):
        kind, value = outcome
        if kind == "ok":
            samples.append(value)
            if value.text == record.text:
                identical += 1
        else:
            skips.append((record.tweet_id, value))
    return samples, skips, identical


def back_translate(samples, translator, pivot: str = "en",
                   max_workers=None) -> AugmentationResult:
    """Round-trip each sample through a pivot language."""
    if translator is None:
        raise AugmentError("back translation requires a translator provider")
    samples = list(samples)

    def worker(record):
        try:
            pivoted = translator(record.text, "ar", pivot)
            rebuilt = translator(pivoted, pivot, "ar")
        except Exception as exc:
            return ("skip", f"translator failed: {exc}")
        if not rebuilt or not rebuilt.strip():
            return ("skip", "translator returned empty text")
        return ("ok", AugmentedSample(record.tweet_id, rebuilt, record.label, BT))

    out, skips, identical = _run_per_sample(samples, worker, max_workers)
    return AugmentationResult(BT, len(samples), tuple(out), tuple(skips), identical)


def substitution_count(n_tokens: int, ratio: float) -> int:
    """Positions to substitute: ratio x token count, half rounding up."""
    return int(math.floor(ratio * n_tokens + 0.5))


def contextual_substitute(samples, filler, ratio: float = 0.3, seed: int = 0,
                          max_workers=None) -> AugmentationResult:
    """Mask a seed-chosen fraction of word positions and let the filler
    rewrite them in place.

    The position count comes from the full token count, but placeholder
    tokens are never masked; when placeholders leave fewer eligible
    positions than the count asks for, every eligible position is used.
    A fill that changes the word count is a provider failure.
    """
    if filler is None:
        raise AugmentError("contextual substitution requires a filler provider")
    if not 0.0 < ratio <= 1.0:
        raise AugmentError(f"ratio {ratio} outside (0, 1]")
    samples = list(samples)

    def worker(record):
        tokens = record.text.split()
        eligible = [i for i, t in enumerate(tokens) if t not in PLACEHOLDERS]
        count = min(substitution_count(len(tokens), ratio), len(eligible))
        if count == 0:
            return ("ok", AugmentedSample(record.tweet_id, record.text,
                                          record.label, CWE))
        rng = random.Random(f"{seed}|cwe|{record.tweet_id}")
        positions = set(rng.sample(eligible, count))
        masked = " ".join(
            MASK_TOKEN if i in positions else t for i, t in enumerate(tokens)
        )
        try:
            filled = filler(masked)
        except Exception as exc:
            return ("skip", f"filler failed: {exc}")
        if not filled or not filled.strip():
            return ("skip", "filler returned empty text")
        if len(filled.split()) != len(tokens):
            return ("skip",
                    f"filler changed word count ({len(tokens)} -> "
                    f"{len(filled.split())})")
        return ("ok", AugmentedSample(record.tweet_id, filled, record.label, CWE))

    out, skips, identical = _run_per_sample(samples, worker, max_workers)
    return AugmentationResult(CWE, len(samples), tuple(out), tuple(skips), identical)


def generate_samples(samples, generator, params: GenerationParams = None,
                     max_workers=None) -> AugmentationResult:
    """Generate one new text per seed, prompting with the seed's text.

    Generation parameters are forwarded to the provider verbatim; outputs
    longer than max_length tokens are truncated to it.
    """
    if generator is None:
        raise AugmentError("text generation requires a generator provider")
    if params is None:
        params = GenerationParams()
    samples = list(samples)

    def worker(record):
        try:
            text = generator(record.text, params)
        except Exception as exc:
            return ("skip", f"generator failed: {exc}")
        if not text or not text.strip():
            return ("skip", "generator returned empty text")
        tokens = text.split()
        if len(tokens) > params.max_length:
            text = " ".join(tokens[:params.max_length])
        return ("ok", AugmentedSample(record.tweet_id, text, record.label, TXTGEN))

    out, skips, identical = _run_per_sample(samples, worker, max_workers)
    return AugmentationResult(TXTGEN, len(samples), tuple(out), tuple(skips),
                              identical)


def synthetic_record(sample: AugmentedSample, origin: TweetRecord) -> TweetRecord:
    """Materialize a synthetic sample as a trainable record with an id that
    cannot collide with real tweet ids."""
    if sample.label != origin.label:
        raise AugmentError(
            f"synthetic label {sample.label} differs from origin {origin.label}"
        )
    return TweetRecord(
        tweet_id=f"{sample.origin_tweet_id}::{sample.strategy.lower()}",
        topic_id=origin.topic_id,
        text=sample.text,
        label=sample.label,
        source=SYNTHETIC_SOURCE,
    )


def _result_to_cache(result: AugmentationResult) -> dict:
    return {
        "strategy": result.strategy,
        "pool_size": result.pool_size,
        "samples": [
            {"origin_tweet_id": s.origin_tweet_id, "text": s.text,
             "label": s.label, "strategy": s.strategy}
            for s in result.samples
        ],
        "skips": [list(s) for s in result.skips],
        "identical_count": result.identical_count,
    }


def _result_from_cache(blob: dict) -> AugmentationResult:
    return AugmentationResult(
        strategy=blob["strategy"],
        pool_size=blob["pool_size"],
        samples=tuple(AugmentedSample(**s) for s in blob["samples"]),
        skips=tuple(tuple(s) for s in blob["skips"]),
        identical_count=blob["identical_count"],
    )


def augment_training(train_records, pool_records, strategy: str, providers,
                     seed: int = 0, params: GenerationParams = None,
                     ratio: float = 0.3, pivot: str = "en", cache_dir=None,
                     max_workers=None):
    """Extend a training set with synthetic variants of its few-shot pool.

    Returns (records, AugmentationResult or None). Strategy ``none`` is the
    identity. Only pool samples ever seed augmentation, and the pool must
    already be part of the training set. When a cache directory is given,
    results are reused across runs keyed by strategy, parameters, pool
    content, and seed.
    """
    train_records = list(train_records)
    pool_records = list(pool_records)
    if strategy == NONE:
        return train_records, None
    if strategy not in STRATEGIES:
        raise AugmentError(f"unknown strategy {strategy!r}")
    train_ids = {r.tweet_id for r in train_records}
    missing = [r.tweet_id for r in pool_records if r.tweet_id not in train_ids]
    if missing:
        raise AugmentError(
            f"augmentation seeds outside the training set: {missing[:5]}"
        )

    if params is None:
        params = GenerationParams()
    key = None
    cache = JsonCache(cache_dir) if cache_dir is not None else None
    if cache is not None:
        key = stable_hash({
            "strategy": strategy,
            "params": params.to_dict(),
            "ratio": ratio,
            "pivot": pivot,
            "pool": [(r.tweet_id, r.text, r.label) for r in pool_records],
            "seed": seed,
        })
        blob = cache.get(key)
        if blob is not None:
            result = _result_from_cache(blob)
            return _join(train_records, pool_records, result), result

    if strategy == BT:
        result = back_translate(pool_records,
                                getattr(providers, "translator", None),
                                pivot, max_workers)
    elif strategy == CWE:
        result = contextual_substitute(pool_records,
                                       getattr(providers, "filler", None),
                                       ratio, seed, max_workers)
    else:
        result = generate_samples(pool_records,
                                  getattr(providers, "generator", None),
                                  params, max_workers)

    if cache is not None:
        cache.put(key, _result_to_cache(result))
    return _join(train_records, pool_records, result), result


def _join(train_records, pool_records, result: AugmentationResult):
    by_id = {r.tweet_id: r for r in pool_records}
    extra = [synthetic_record(s, by_id[s.origin_tweet_id]) for s in result.samples]
    return train_records + extra
