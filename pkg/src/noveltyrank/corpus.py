"""Paper corpus: ingestion, validation, temporal splitting, and statistics.

The corpus is the single source of truth for paper metadata, binary novelty
labels, and publication dates. Every downstream stage (similarity search,
feature fusion, pair generation, evaluation) resolves papers by id through
an immutable ``Corpus``.

Input format: UTF-8 line-delimited JSON, one object per line with keys
``id``, ``title``, ``abstract``, ``domain``, ``published`` (YYYY-MM-DD),
``label`` (0/1) and ``categories`` (list of strings). Unknown keys are
ignored with a warning.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

DOMAINS = ("AI", "ML", "CV", "Robotics", "NLP", "Cryptography", "Other")

REQUIRED_KEYS = ("id", "title", "abstract", "domain", "published", "label", "categories")

DEFAULT_CUTOFF = dt.date(2025, 3, 15)


class CorpusError(ValueError):
    """Raised for malformed metadata lines, duplicate ids, or invalid fields."""


@dataclass(frozen=True)
class PaperRecord:
    """One paper's metadata plus its binary novelty label."""

    id: str
    title: str
    abstract: str
    domain: str
    published: dt.date
    label: int
    categories: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("paper id must be non-empty")
        if not self.title:
            raise CorpusError(f"record {self.id!r}: title must be non-empty")
        if self.domain not in DOMAINS:
            raise CorpusError(
                f"record {self.id!r}: unknown domain {self.domain!r} "
                f"(expected one of {', '.join(DOMAINS)})"
            )
        if self.label not in (0, 1):
            raise CorpusError(f"record {self.id!r}: label must be 0 or 1, got {self.label!r}")
        if not isinstance(self.published, dt.date):
            raise CorpusError(f"record {self.id!r}: published must be a date")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "abstract": self.abstract,
            "domain": self.domain,
            "published": self.published.isoformat(),
            "label": self.label,
            "categories": list(self.categories),
        }


@dataclass(frozen=True)
class CorpusStats:
    total: int
    positives: int
    per_domain: dict[str, tuple[int, int]]  # domain -> (positives, negatives)
    date_min: dt.date | None
    date_max: dt.date | None

    @property
    def positive_ratio(self) -> float:
        return self.positives / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "positives": self.positives,
            "positive_ratio": self.positive_ratio,
            "per_domain": {d: {"positives": p, "negatives": n} for d, (p, n) in self.per_domain.items()},
            "date_min": self.date_min.isoformat() if self.date_min else None,
            "date_max": self.date_max.isoformat() if self.date_max else None,
        }


@dataclass(frozen=True)
class Corpus:
    """Immutable id-indexed paper collection.

    ``ordering`` lists ids ascending by (published, id); the id tie-break
    keeps the order total and platform-independent.
    """

    records: dict[str, PaperRecord]
    ordering: tuple[str, ...] = field(default=())

    @classmethod
    def from_records(cls, records: Iterable[PaperRecord]) -> "Corpus":
        by_id: dict[str, PaperRecord] = {}
        for rec in records:
            if rec.id in by_id:
                raise CorpusError(f"duplicate paper id {rec.id!r}")
            by_id[rec.id] = rec
        ordering = tuple(sorted(by_id, key=lambda i: (by_id[i].published, i)))
        return cls(records=by_id, ordering=ordering)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.records

    def __iter__(self) -> Iterator[PaperRecord]:
        for paper_id in self.ordering:
            yield self.records[paper_id]

    def get(self, paper_id: str) -> PaperRecord:
        try:
            return self.records[paper_id]
        except KeyError:
            raise CorpusError(f"unknown paper id {paper_id!r}") from None

    def ids(self) -> tuple[str, ...]:
        return self.ordering


def _parse_date(raw: object, context: str) -> dt.date:
    if not isinstance(raw, str):
        raise CorpusError(f"{context}: published must be a YYYY-MM-DD string, got {raw!r}")
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise CorpusError(f"{context}: invalid date {raw!r}") from None


def parse_record(obj: dict, context: str = "record") -> PaperRecord:
    """Validate one decoded metadata object into a PaperRecord."""
    unknown = sorted(set(obj) - set(REQUIRED_KEYS) - {"authors", "venue"})
    if unknown:
        logger.warning("%s: ignoring unknown keys %s", context, ", ".join(unknown))
    missing = [k for k in REQUIRED_KEYS if k not in obj]
    if missing:
        raise CorpusError(f"{context}: missing keys {', '.join(missing)}")
    label = obj["label"]
    if not isinstance(label, int) or isinstance(label, bool) or label not in (0, 1):
        raise CorpusError(f"{context}: label must be integer 0 or 1, got {label!r}")
    categories = obj["categories"]
    if not isinstance(categories, list) or not all(isinstance(c, str) for c in categories):
        raise CorpusError(f"{context}: categories must be a list of strings")
    return PaperRecord(
        id=str(obj["id"]),
        title=str(obj["title"]),
        abstract=str(obj["abstract"]),
        domain=str(obj["domain"]),
        published=_parse_date(obj["published"], context),
        label=label,
        categories=tuple(categories),
    )


def load_corpus(source: str | Path | Iterable[str]) -> Corpus:
    """Load a corpus from a metadata file path or an iterable of JSON lines.

    Raises CorpusError naming the offending line for any malformed record,
    duplicate id, or invalid date/label.
    """
    if isinstance(source, (str, Path)):
        lines: Iterable[str] = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = source
    records: list[PaperRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CorpusError(f"line {lineno}: expected an object")
        rec = parse_record(obj, context=f"line {lineno}")
        if rec.id in seen:
            raise CorpusError(f"line {lineno}: duplicate paper id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return Corpus.from_records(records)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus in the metadata line format (round-trips exactly)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


def temporal_split(
    corpus: Corpus,
    cutoff: dt.date = DEFAULT_CUTOFF,
    train_after: dt.date | None = None,
) -> tuple[Corpus, Corpus]:
    """Partition by publication date: train ``published <= cutoff``, test after.

    The cutoff day itself is training data. ``train_after`` optionally drops
    training papers published on or before that earlier date.
    """
    train: list[PaperRecord] = []
    test: list[PaperRecord] = []
    for rec in corpus:
        if rec.published > cutoff:
            test.append(rec)
        elif train_after is None or rec.published > train_after:
            train.append(rec)
    if not train:
        logger.warning("temporal split produced an empty training side (cutoff %s)", cutoff)
    if not test:
        logger.warning("temporal split produced an empty test side (cutoff %s)", cutoff)
    return Corpus.from_records(train), Corpus.from_records(test)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    per_domain: dict[str, list[int]] = {}
    positives = 0
    dates: list[dt.date] = []
    for rec in corpus:
        bucket = per_domain.setdefault(rec.domain, [0, 0])
        if rec.label == 1:
            positives += 1
            bucket[0] += 1
        else:
            bucket[1] += 1
        dates.append(rec.published)
    return CorpusStats(
        total=len(corpus),
        positives=positives,
        per_domain={d: (p, n) for d, (p, n) in sorted(per_domain.items())},
        date_min=min(dates) if dates else None,
        date_max=max(dates) if dates else None,
    )
