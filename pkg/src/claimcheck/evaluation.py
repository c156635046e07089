"""Ranking metrics and result-table arithmetic.

The task is scored as a ranking problem: each test set gets one average
precision per class (AP over the ranking ordered for that class), the mean of
the two is the MAP, and thresholded predictions additionally yield
precision/recall/F1 for the positive class. Improvement tables compare MAP
columns of two experiment variants topic by topic, with integer percentage
deltas.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .corpus import CW, NCW
from .errors import EvalError

__all__ = [
    "EvalReport",
    "ImprovementCell",
    "ImprovementTable",
    "average_precision",
    "mean_average_precision",
    "precision_recall_f1",
    "evaluate_scores",
    "improvement_table",
    "delta_percent",
    "render_report_table",
    "render_improvement_table",
]


@dataclass(frozen=True)
class EvalReport:
    """All evaluation numbers for one experiment cell (one target topic)."""

    target_topic_id: str
    ap_cw: float
    ap_ncw: float
    map: float
    precision: float
    recall: float
    f1: float
    n_test: int

    def __post_init__(self):
        if abs(self.map - (self.ap_cw + self.ap_ncw) / 2.0) > 1e-9:
            raise EvalError(
                f"map must be the mean of the class APs, got {self.map!r}"
            )

    def to_dict(self) -> dict:
        return {
            "target_topic_id": self.target_topic_id,
            "ap_cw": self.ap_cw,
            "ap_ncw": self.ap_ncw,
            "map": self.map,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "n_test": self.n_test,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(**{k: d[k] for k in (
            "target_topic_id", "ap_cw", "ap_ncw", "map",
            "precision", "recall", "f1", "n_test",
        )})


def _ranking_for(scores: dict, positive: str) -> list:
    """Order ids by descending P(positive); ties broken by ascending id."""
    if positive == CW:
        return sorted(scores, key=lambda i: (-scores[i], i))
    # descending P(NCW) == ascending P(CW)
    return sorted(scores, key=lambda i: (scores[i], i))


def average_precision(ranked_ids, labels: dict, positive: str, n: int | None = None) -> float:
    """AP of a ranking: mean of precision@rank over the positive items.

    `ranked_ids` must already be ordered for the positive class (best first).
    Only the top `n` items are considered (all of them when n is None).
    Returns 0.0 when no positive item appears in the considered prefix.
    """
    ranked_ids = list(ranked_ids)
    if not ranked_ids:
        raise EvalError("cannot compute average precision of an empty ranking")
    missing = [i for i in ranked_ids if i not in labels]
    if missing:
        raise EvalError(f"ranked ids without a label: {missing[:5]}")
    if n is not None:
        ranked_ids = ranked_ids[:n]
    hits = 0
    precisions = []
    for rank, item_id in enumerate(ranked_ids, start=1):
        if labels[item_id] == positive:
            hits += 1
            precisions.append(hits / rank)
    if not precisions:
        return 0.0
    return sum(precisions) / len(precisions)


def mean_average_precision(scores: dict, labels: dict, n: int | None = None,
                           cw_only: bool = False):
    """Per-class APs and their mean for one scored test set.

    `scores` maps id -> P(CW). The CW ranking is descending by score, the NCW
    ranking ascending; both break ties by ascending id. With `cw_only` the MAP
    collapses to the positive-class AP (the common shared-task convention).

    Returns (ap_cw, ap_ncw, map).
    """
    if set(scores) != set(labels):
        raise EvalError(
            f"scores and labels cover different ids "
            f"({len(scores)} scored vs {len(labels)} labelled)"
        )
    if not scores:
        raise EvalError("cannot evaluate an empty test set")
    ap_cw = average_precision(_ranking_for(scores, CW), labels, CW, n=n)
    ap_ncw = average_precision(_ranking_for(scores, NCW), labels, NCW, n=n)
    map_ = ap_cw if cw_only else (ap_cw + ap_ncw) / 2.0
    return ap_cw, ap_ncw, map_


def precision_recall_f1(predictions: dict, labels: dict, positive: str = CW):
    """Standard P/R/F1 against the positive class; 0/0 cases map to 0."""
    if set(predictions) != set(labels):
        raise EvalError("predictions and labels cover different ids")
    tp = sum(1 for i, p in predictions.items() if p == positive and labels[i] == positive)
    fp = sum(1 for i, p in predictions.items() if p == positive and labels[i] != positive)
    fn = sum(1 for i, p in predictions.items() if p != positive and labels[i] == positive)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def evaluate_scores(target_topic_id: str, scores: dict, labels: dict,
                    threshold: float = 0.5, cw_only: bool = False) -> EvalReport:
    """Build the full EvalReport for one scored test set."""
    ap_cw, ap_ncw, _ = mean_average_precision(scores, labels)
    map_ = ap_cw if cw_only else (ap_cw + ap_ncw) / 2.0
    predictions = {i: (CW if s >= threshold else NCW) for i, s in scores.items()}
    p, r, f1 = precision_recall_f1(predictions, labels, positive=CW)
    # EvalReport pins map == mean of class APs; the cw_only view reuses ap_cw
    # on both sides so the invariant still holds.
    if cw_only:
        return EvalReport(target_topic_id, ap_cw, ap_cw, map_, p, r, f1, len(labels))
    return EvalReport(target_topic_id, ap_cw, ap_ncw, map_, p, r, f1, len(labels))


def delta_percent(base_map: float, new_map: float) -> int:
    """Integer percentage-point delta, rounded half away from zero."""
    x = 100.0 * (new_map - base_map)
    if x == 0.0:
        return 0
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True)
class ImprovementCell:
    base_map: float
    new_map: float
    delta_pct: int

    def __post_init__(self):
        if self.delta_pct != delta_percent(self.base_map, self.new_map):
            raise EvalError("delta_pct inconsistent with its MAP pair")


@dataclass
class ImprovementTable:
    """Per-topic improvement cells for one or more variants over a base."""

    topics: list
    variant_names: list
    base: dict
    cells: dict  # variant name -> topic -> ImprovementCell
    average: dict = field(default_factory=dict)  # variant name -> ImprovementCell

    def cell(self, variant: str, topic: str) -> ImprovementCell:
        return self.cells[variant][topic]


def _as_map(value) -> float:
    return value.map if isinstance(value, EvalReport) else float(value)


def improvement_table(base: dict, variants: dict) -> ImprovementTable:
    """Compare variant MAP columns against a base column, topic by topic.

    `base` maps topic -> MAP (or EvalReport); `variants` maps a variant name to
    such a column. All columns must cover the same topics. The average row is
    computed from the arithmetic means of the full-precision columns.
    """
    topics = sorted(base)
    base_maps = {t: _as_map(v) for t, v in base.items()}
    cells = {}
    average = {}
    for name, column in variants.items():
        if set(column) != set(base):
            raise EvalError(f"variant {name!r} covers different topics than the base")
        col = {t: _as_map(v) for t, v in column.items()}
        cells[name] = {
            t: ImprovementCell(base_maps[t], col[t], delta_percent(base_maps[t], col[t]))
            for t in topics
        }
        base_avg = sum(base_maps.values()) / len(base_maps)
        new_avg = sum(col.values()) / len(col)
        average[name] = ImprovementCell(base_avg, new_avg, delta_percent(base_avg, new_avg))
    return ImprovementTable(topics, list(variants), base_maps, cells, average)


def format_delta(delta_pct: int) -> str:
    return "(0%)" if delta_pct == 0 else f"({delta_pct:+d}%)"


def render_report_table(reports: dict, title: str = "") -> str:
    """Aligned markdown table with P/R/F1/MAP rows plus an average row."""
    lines = []
    if title:
        lines.append(f"### {title}")
        lines.append("")
    lines.append("| Topic | Precision | Recall | F1 | MAP |")
    lines.append("|---|---|---|---|---|")
    for topic in sorted(reports):
        r = reports[topic]
        lines.append(
            f"| {topic} | {r.precision:.2f} | {r.recall:.2f} | {r.f1:.2f} | {r.map:.4f} |"
        )
    n = len(reports)
    if n:
        lines.append(
            "| Average | {:.2f} | {:.2f} | {:.2f} | {:.4f} |".format(
                sum(r.precision for r in reports.values()) / n,
                sum(r.recall for r in reports.values()) / n,
                sum(r.f1 for r in reports.values()) / n,
                sum(r.map for r in reports.values()) / n,
            )
        )
    return "\n".join(lines) + "\n"


def render_improvement_table(table: ImprovementTable, base_name: str = "base",
                             title: str = "") -> str:
    """Markdown table in the `MAP (+d%)` style, one column pair per variant."""
    lines = []
    if title:
        lines.append(f"### {title}")
        lines.append("")
    header = f"| Topic | {base_name} |"
    rule = "|---|---|"
    for name in table.variant_names:
        header += f" {name} | |"
        rule += "---|---|"
    lines.append(header)
    lines.append(rule)
    for topic in table.topics:
        row = f"| {topic} | {table.base[topic]:.4f} |"
        for name in table.variant_names:
            c = table.cell(name, topic)
            row += f" {c.new_map:.4f} | {format_delta(c.delta_pct)} |"
        lines.append(row)
    base_avg = sum(table.base.values()) / len(table.base)
    row = f"| Average | {base_avg:.4f} |"
    for name in table.variant_names:
        c = table.average[name]
        row += f" {c.new_map:.4f} | {format_delta(c.delta_pct)} |"
    lines.append(row)
    return "\n".join(lines) + "\n"


def improvement_csv(table: ImprovementTable, base_name: str = "base") -> str:
    """CSV export of every cell of an improvement table."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["topic", "variant", "base_map", "new_map", "delta_pct"])
    for name in table.variant_names:
        for topic in table.topics:
            c = table.cell(name, topic)
            writer.writerow([topic, name, f"{c.base_map:.10f}", f"{c.new_map:.10f}", c.delta_pct])
        c = table.average[name]
        writer.writerow(["AVERAGE", name, f"{c.base_map:.10f}", f"{c.new_map:.10f}", c.delta_pct])
    return buf.getvalue()


def reports_to_json(reports: dict) -> str:
    return json.dumps({t: r.to_dict() for t, r in sorted(reports.items())},
                      indent=2, sort_keys=True)
