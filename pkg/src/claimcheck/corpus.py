"""Tweet corpus ingestion and canonicalization.

Reads the tab-separated shared-task files, maps their label conventions onto
the binary CW/NCW scheme, folds the four COVID-related topics into one
canonical topic, and exposes per-topic class statistics. A canonical corpus is
immutable once built and serializes to JSON lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusError

__all__ = [
    "CW",
    "NCW",
    "LABELS",
    "TweetRecord",
    "Topic",
    "CorpusStats",
    "Corpus",
    "TsvSchema",
    "SCHEMA_PRESETS",
    "CANONICAL_TOPICS",
    "COVID_TOPIC_ID",
    "COVID_SOURCE_IDS",
    "DEFAULT_MERGE_TABLE",
    "parse_label",
    "load_tsv",
    "merge_covid_topics",
    "dedupe_records",
    "build_corpus",
    "corpus_stats",
]

CW = "CW"
NCW = "NCW"
LABELS = (CW, NCW)

# Accepted spellings per label, compared case-insensitively after trimming.
_LABEL_ALIASES = {
    "1": CW, "cw": CW, "checkworthy": CW,
    "0": NCW, "ncw": NCW,
}


def parse_label(value) -> str:
    """Map a raw check-worthiness field onto CW/NCW.

    Any claim/no-claim level a dataset carries alongside is simply ignored by
    the caller; only the check-worthiness value is interpreted here.
    """
    if value is None:
        raise CorpusError("missing check-worthiness label")
    text = str(value).strip().lower()
    if text not in _LABEL_ALIASES:
        raise CorpusError(f"unknown check-worthiness label: {value!r}")
    return _LABEL_ALIASES[text]


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    topic_id: str
    text: str
    label: str
    source: str  # CT20 | CT21

    def __post_init__(self):
        if self.label not in LABELS:
            raise CorpusError(f"label must be one of {LABELS}, got {self.label!r}")
        if not self.text.strip():
            raise CorpusError(f"tweet {self.tweet_id} has empty text")

    def to_dict(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "topic_id": self.topic_id,
            "text": self.text,
            "label": self.label,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TweetRecord":
        return cls(
            tweet_id=str(d["tweet_id"]),
            topic_id=d["topic_id"],
            text=d["text"],
            label=d["label"],
            source=d.get("source", "CT20"),
        )


@dataclass(frozen=True)
class Topic:
    topic_id: str
    title: str
    source_ids: tuple


COVID_TOPIC_ID = "COVID-19"
COVID_SOURCE_IDS = ("CT20-AR-03", "CT20-AR-28_w1", "CT20-AR-28_w2", "CT20-AR-29")

# The 14 canonical topics of the combined corpus.
CANONICAL_TOPICS = (
    Topic("CT20-AR-01", "Deal of the century", ("CT20-AR-01",)),
    Topic("CT20-AR-02", "Houthis in Yemen", ("CT20-AR-02",)),
    Topic("CT20-AR-05", "Protests in Lebanon", ("CT20-AR-05",)),
    Topic("CT20-AR-08", "Feminists", ("CT20-AR-08",)),
    Topic("CT20-AR-10", "Waseem Youssef", ("CT20-AR-10",)),
    Topic("CT20-AR-12", "Sudan and normalization", ("CT20-AR-12",)),
    Topic("CT20-AR-14", "Events in Libya", ("CT20-AR-14",)),
    Topic("CT20-AR-19", "Turkey's intervention in Syria", ("CT20-AR-19",)),
    Topic("CT20-AR-23", "The case of the Bidoon in Kuwait", ("CT20-AR-23",)),
    Topic("CT20-AR-27", "Algeria", ("CT20-AR-27",)),
    Topic("CT20-AR-30", "Boycotting countries and spreading rumors against Qatar", ("CT20-AR-30",)),
    Topic(COVID_TOPIC_ID, "COVID-19", COVID_SOURCE_IDS),
    Topic("CT21-AR-01", "Events in Gulf", ("CT21-AR-01",)),
    Topic("CT21-AR-02", "Events in USA", ("CT21-AR-02",)),
)

CANONICAL_TOPIC_IDS = tuple(t.topic_id for t in CANONICAL_TOPICS)

# Folds every known source topic id onto its canonical id (identity except
# for the four COVID topics).
DEFAULT_MERGE_TABLE = {
    src: topic.topic_id for topic in CANONICAL_TOPICS for src in topic.source_ids
}


@dataclass(frozen=True)
class CorpusStats:
    total_count: int
    per_topic: dict  # topic_id -> (cw_count, ncw_count)
    overall_cw_fraction: float


@dataclass(frozen=True)
class TsvSchema:
    """Column layout of one tab-separated input file.

    Column indices are zero-based. `claim_col`, when set, names the
    claim/no-claim column present in two-level files; its value is parsed only
    to be discarded.
    """

    name: str
    topic_col: int
    id_col: int
    text_col: int
    label_col: int
    n_cols: int
    source: str
    claim_col: int | None = None
    has_header: bool = True


# The two shared-task layouts we ship presets for, plus a minimal one for
# ad-hoc four-column files.
SCHEMA_PRESETS = {
    "ct20": TsvSchema("ct20", topic_col=0, id_col=1, text_col=3, label_col=4,
                      n_cols=5, source="CT20"),
    "ct21": TsvSchema("ct21", topic_col=0, id_col=1, text_col=3, label_col=5,
                      n_cols=6, source="CT21", claim_col=4),
    "simple": TsvSchema("simple", topic_col=0, id_col=1, text_col=2, label_col=3,
                        n_cols=4, source="CT20", has_header=False),
}


def load_tsv(path, schema: TsvSchema) -> list:
    """Parse one TSV file into TweetRecords.

    Raises CorpusError with the 1-based line number on malformed rows, on
    unknown label strings, and on tweet ids duplicated within the file.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"input file not found: {path}")
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if lineno == 1 and schema.has_header:
                continue
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != schema.n_cols:
                raise CorpusError(
                    f"{path.name}:{lineno}: expected {schema.n_cols} columns, "
                    f"got {len(cols)}"
                )
            try:
                label = parse_label(cols[schema.label_col])
            except CorpusError as exc:
                raise CorpusError(f"{path.name}:{lineno}: {exc}") from exc
            tweet_id = cols[schema.id_col].strip()
            if tweet_id in seen:
                raise CorpusError(f"{path.name}:{lineno}: duplicate tweet id {tweet_id}")
            seen.add(tweet_id)
            try:
                records.append(TweetRecord(
                    tweet_id=tweet_id,
                    topic_id=cols[schema.topic_col].strip(),
                    text=cols[schema.text_col],
                    label=label,
                    source=schema.source,
                ))
            except CorpusError as exc:
                raise CorpusError(f"{path.name}:{lineno}: {exc}") from exc
    return records


def merge_covid_topics(records, merge_table: dict | None = None) -> list:
    """Relabel topic ids onto their canonical ids; never drops a record.

    The default table folds the known source topics onto their canonical
    ids and maps every other observed id to itself; an explicit table must
    cover every topic id present.
    """
    if merge_table is None:
        table = {rec.topic_id: rec.topic_id for rec in records}
        table.update(DEFAULT_MERGE_TABLE)
    else:
        table = merge_table
    merged = []
    for rec in records:
        if rec.topic_id not in table:
            raise CorpusError(f"topic id not covered by the merge table: {rec.topic_id!r}")
        target = table[rec.topic_id]
        if target == rec.topic_id:
            merged.append(rec)
        else:
            merged.append(TweetRecord(rec.tweet_id, target, rec.text, rec.label, rec.source))
    return merged


def dedupe_records(records) -> tuple:
    """Drop cross-dataset duplicates by tweet id, keeping the CT20 copy.

    Returns (records, dropped_count). A duplicate id within one source is an
    error; across sources the CT20 record wins.
    """
    by_id = {}
    order = []
    dropped = 0
    for rec in records:
        prev = by_id.get(rec.tweet_id)
        if prev is None:
            by_id[rec.tweet_id] = rec
            order.append(rec.tweet_id)
            continue
        if prev.source == rec.source:
            raise CorpusError(
                f"duplicate tweet id {rec.tweet_id} within source {rec.source}"
            )
        dropped += 1
        if prev.source != "CT20" and rec.source == "CT20":
            by_id[rec.tweet_id] = rec
    return [by_id[i] for i in order], dropped


class Corpus:
    """Immutable collection of labelled tweets grouped by topic."""

    def __init__(self, records):
        records = list(records)
        if not records:
            raise CorpusError("corpus has no records")
        seen = set()
        for rec in records:
            if rec.tweet_id in seen:
                raise CorpusError(f"duplicate tweet id in corpus: {rec.tweet_id}")
            seen.add(rec.tweet_id)
        self._records = tuple(records)
        self._by_id = {r.tweet_id: r for r in records}
        by_topic = {}
        for rec in records:
            by_topic.setdefault(rec.topic_id, []).append(rec)
        self._by_topic = {t: tuple(rs) for t, rs in by_topic.items()}

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    @property
    def records(self) -> tuple:
        return self._records

    def topic_ids(self) -> list:
        return sorted(self._by_topic)

    def records_for(self, topic_id: str) -> tuple:
        if topic_id not in self._by_topic:
            raise CorpusError(f"unknown topic: {topic_id!r}")
        return self._by_topic[topic_id]

    def record(self, tweet_id: str) -> TweetRecord:
        if tweet_id not in self._by_id:
            raise CorpusError(f"unknown tweet id: {tweet_id!r}")
        return self._by_id[tweet_id]

    def labels(self) -> dict:
        return {r.tweet_id: r.label for r in self._records}

    def validate_canonical(self):
        """Require every topic id to be one of the 14 canonical ids."""
        unknown = sorted(set(self._by_topic) - set(CANONICAL_TOPIC_IDS))
        if unknown:
            raise CorpusError(f"non-canonical topic ids present: {unknown}")
        return self

    def to_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self._records:
                fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "Corpus":
        path = Path(path)
        if not path.exists():
            raise CorpusError(f"corpus file not found: {path}")
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(TweetRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError) as exc:
                    raise CorpusError(f"{path.name}:{lineno}: bad record: {exc}") from exc
        return cls(records)


@dataclass(frozen=True)
class BuildReport:
    files: tuple
    duplicates_dropped: int
    topics_before_merge: int
    topics_after_merge: int


def build_corpus(inputs, merge_table: dict | None = None,
                 require_canonical: bool = True) -> tuple:
    """Full ingestion pipeline: load, dedupe across datasets, merge topics.

    `inputs` is a sequence of (path, TsvSchema) pairs. Returns
    (Corpus, BuildReport).
    """
    records = []
    files = []
    for path, schema in inputs:
        records.extend(load_tsv(path, schema))
        files.append(str(path))
    records, dropped = dedupe_records(records)
    topics_before = len({r.topic_id for r in records})
    records = merge_covid_topics(records, merge_table)
    topics_after = len({r.topic_id for r in records})
    corpus = Corpus(records)
    if require_canonical:
        corpus.validate_canonical()
    report = BuildReport(tuple(files), dropped, topics_before, topics_after)
    return corpus, report


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Exact per-topic and overall class counts."""
    if len(corpus) == 0:
        raise CorpusError("cannot compute statistics of an empty corpus")
    per_topic = {}
    total_cw = 0
    for topic_id in corpus.topic_ids():
        records = corpus.records_for(topic_id)
        cw = sum(1 for r in records if r.label == CW)
        per_topic[topic_id] = (cw, len(records) - cw)
        total_cw += cw
    return CorpusStats(
        total_count=len(corpus),
        per_topic=per_topic,
        overall_cw_fraction=total_cw / len(corpus),
    )
