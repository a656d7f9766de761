"""Classification metrics, pairwise agreement, and per-domain breakdowns.

Conventions: label 1 is the positive (novel) class; zero-denominator
precision/recall/F1 report 0 rather than NaN so degenerate predictors stay
comparable; abstentions count as incorrect in agreement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import CorpusStats


class MetricsError(ValueError):
    """Raised for mismatched prediction/label keys or empty inputs."""


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise MetricsError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class Decision:
    """One evaluated comparison: the gold slot and the predicted slot.

    ``predicted`` is 'A', 'B', or None for an abstention (counted as
    incorrect).
    """

    gold: str
    predicted: str | None
    domain: str | None = None


@dataclass(frozen=True)
class AgreementReport:
    overall: float
    total: int
    correct: int
    per_domain: dict[str, tuple[float, int]]  # domain -> (agreement, pair count)
    inconsistent_count: int = 0

    def to_json(self) -> dict:
        return {
            "overall": self.overall,
            "total": self.total,
            "correct": self.correct,
            "per_domain": {
                d: {"agreement": a, "pairs": n} for d, (a, n) in self.per_domain.items()
            },
            "inconsistent_count": self.inconsistent_count,
        }


def confusion(predictions: dict[str, int], labels: dict[str, int]) -> ConfusionCounts:
    """Count tp/fp/tn/fn over identical key sets (label 1 = positive)."""
    if set(predictions) != set(labels):
        missing = set(labels) ^ set(predictions)
        raise MetricsError(f"prediction/label key mismatch, e.g. {sorted(missing)[:3]}")
    tp = fp = tn = fn = 0
    for key, pred in predictions.items():
        label = labels[key]
        if pred == 1 and label == 1:
            tp += 1
        elif pred == 1 and label == 0:
            fp += 1
        elif pred == 0 and label == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def classification_metrics(c: ConfusionCounts) -> ClassificationMetrics:
    if c.total == 0:
        raise MetricsError("cannot compute metrics over zero examples")
    accuracy = (c.tp + c.tn) / c.total
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
    f1 = f1_score(precision, recall)
    return ClassificationMetrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def pairwise_agreement(decisions: list[Decision]) -> AgreementReport:
    """Fraction of comparisons whose predicted slot matches gold."""
    if not decisions:
        raise MetricsError("cannot compute agreement over zero decisions")
    correct = 0
    inconsistent = 0
    per_domain: dict[str, list[int]] = {}
    any_domains = any(d.domain is not None for d in decisions)
    for dec in decisions:
        hit = dec.predicted == dec.gold
        correct += hit
        if dec.predicted is None:
            inconsistent += 1
        if any_domains:
            bucket = per_domain.setdefault(dec.domain or "Other", [0, 0])
            bucket[0] += hit
            bucket[1] += 1
    return AgreementReport(
        overall=correct / len(decisions),
        total=len(decisions),
        correct=correct,
        per_domain={d: (c / n, n) for d, (c, n) in sorted(per_domain.items())},
        inconsistent_count=inconsistent,
    )


@dataclass(frozen=True)
class DomainRow:
    domain: str
    agreement: float
    pairs: int
    train_share: float  # fraction of training papers in this domain
    train_positive_share: float  # fraction of the domain's training papers labeled 1

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "agreement": self.agreement,
            "pairs": self.pairs,
            "train_share": self.train_share,
            "train_positive_share": self.train_positive_share,
        }


def domain_breakdown(decisions: list[Decision], train_stats: CorpusStats) -> list[DomainRow]:
    """Per-domain agreement joined with training-set shares.

    Rows appear in the agreement report's (sorted) domain order and are
    never reordered by value, so small domains keep their place.
    """
    report = pairwise_agreement(
        [Decision(gold=d.gold, predicted=d.predicted, domain=d.domain or "Other") for d in decisions]
    )
    total_train = train_stats.total
    rows = []
    for domain, (agreement, pairs) in report.per_domain.items():
        pos, neg = train_stats.per_domain.get(domain, (0, 0))
        domain_total = pos + neg
        rows.append(
            DomainRow(
                domain=domain,
                agreement=agreement,
                pairs=pairs,
                train_share=domain_total / total_train if total_train else 0.0,
                train_positive_share=pos / domain_total if domain_total else 0.0,
            )
        )
    return rows


def format_table(rows: list[dict], columns: list[str]) -> str:
    """Aligned plain-text table for report emission."""
    rendered = [
        [f"{row[c]:.4f}" if isinstance(row[c], float) else str(row[c]) for c in columns]
        for row in rows
    ]
    widths = [max(len(col), *(len(r[i]) for r in rendered)) if rendered else len(col) for i, col in enumerate(columns)]
    lines = [
        "  ".join(col.ljust(widths[i]) for i, col in enumerate(columns)),
        "  ".join("-" * widths[i] for i in range(len(columns))),
    ]
    for r in rendered:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(columns))))
    return "\n".join(lines) + "\n"


def write_report(rows: list[dict], path: str | Path, fmt: str = "jsonl") -> None:
    """Emit rows as line-delimited JSON or an aligned text table."""
    path = Path(path)
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
    elif fmt == "table":
        columns = list(rows[0].keys()) if rows else []
        path.write_text(format_table(rows, columns), encoding="utf-8")
    else:
        raise MetricsError(f"unknown report format {fmt!r} (expected jsonl or table)")
