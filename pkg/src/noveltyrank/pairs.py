"""Comparison-pair construction for training and evaluation.

Training pairs: each positive paper is matched with up to
``negatives_per_positive`` distinct same-domain negatives (sampled without
replacement), and each pair's slot order is decided by an independent fair
coin so the positive is not always in the same position.

Evaluation pairs are dense: every positive is paired with every available
same-domain negative, in canonical gold=A order, with a deterministic
enumeration (positive id ascending, then negative id ascending).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus

logger = logging.getLogger(__name__)

DEFAULT_NEGATIVES_PER_POSITIVE = 5


class PairError(ValueError):
    """Raised for malformed pair files or invalid pair definitions."""


@dataclass(frozen=True)
class ComparisonPair:
    """Ordered (slot A, slot B) pair; ``gold`` marks the more-novel slot."""

    a_id: str
    b_id: str
    gold: str  # "A" or "B"
    domain: str

    def __post_init__(self) -> None:
        if self.a_id == self.b_id:
            raise PairError(f"pair members must differ, got {self.a_id!r} twice")
        if self.gold not in ("A", "B"):
            raise PairError(f"gold must be 'A' or 'B', got {self.gold!r}")

    @property
    def positive_id(self) -> str:
        return self.a_id if self.gold == "A" else self.b_id

    @property
    def negative_id(self) -> str:
        return self.b_id if self.gold == "A" else self.a_id


@dataclass(frozen=True)
class PairSet:
    pairs: tuple[ComparisonPair, ...]
    provenance: str  # "sampled_training" | "dense_eval"
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def sample_training_pairs(
    train: Corpus,
    negatives_per_positive: int = DEFAULT_NEGATIVES_PER_POSITIVE,
    seed: int = 0,
) -> PairSet:
    """Sampled 1:n same-domain pairs with coin-flipped slot order.

    Positives with no same-domain negative are skipped (a warning reports
    the count). Identical (corpus, n, seed) inputs yield identical output.
    """
    if negatives_per_positive < 1:
        raise PairError(f"negatives_per_positive must be >= 1, got {negatives_per_positive}")
    rng = np.random.default_rng(seed)
    by_domain_neg: dict[str, list[str]] = {}
    positives: list[str] = []
    for rec in train:  # corpus ordering: deterministic
        if rec.label == 1:
            positives.append(rec.id)
        else:
            by_domain_neg.setdefault(rec.domain, []).append(rec.id)
    pairs: list[ComparisonPair] = []
    skipped = 0
    for pos_id in positives:
        domain = train.get(pos_id).domain
        negatives = by_domain_neg.get(domain, [])
        if not negatives:
            skipped += 1
            continue
        take = min(negatives_per_positive, len(negatives))
        chosen = rng.choice(len(negatives), size=take, replace=False)
        for idx in chosen:
            neg_id = negatives[int(idx)]
            if rng.random() < 0.5:
                pairs.append(ComparisonPair(a_id=pos_id, b_id=neg_id, gold="A", domain=domain))
            else:
                pairs.append(ComparisonPair(a_id=neg_id, b_id=pos_id, gold="B", domain=domain))
    if skipped:
        logger.warning("skipped %d positives with no same-domain negative", skipped)
    return PairSet(pairs=tuple(pairs), provenance="sampled_training", seed=seed)


def dense_eval_pairs(test: Corpus) -> PairSet:
    """Every positive paired with every same-domain negative, gold fixed to A."""
    by_domain: dict[str, tuple[list[str], list[str]]] = {}
    for rec in test:
        pos, neg = by_domain.setdefault(rec.domain, ([], []))
        (pos if rec.label == 1 else neg).append(rec.id)
    pairs: list[ComparisonPair] = []
    for domain in sorted(by_domain):
        pos_ids, neg_ids = by_domain[domain]
        for pos_id in sorted(pos_ids):
            for neg_id in sorted(neg_ids):
                pairs.append(ComparisonPair(a_id=pos_id, b_id=neg_id, gold="A", domain=domain))
    return PairSet(pairs=tuple(pairs), provenance="dense_eval", seed=None)


def save_pairs(pairset: PairSet, path: str | Path) -> None:
    """Line-delimited pair file; the header line records provenance and seed."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"provenance": pairset.provenance, "seed": pairset.seed}) + "\n")
        for pair in pairset:
            fh.write(
                json.dumps(
                    {"a_id": pair.a_id, "b_id": pair.b_id, "gold": pair.gold, "domain": pair.domain}
                )
                + "\n"
            )


def load_pairs(path: str | Path) -> PairSet:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise PairError(f"{path}: empty pair file (expected a header line)")
    header = json.loads(lines[0])
    if "provenance" not in header:
        raise PairError(f"{path}: first line must be a header with a provenance field")
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            pairs.append(
                ComparisonPair(
                    a_id=str(obj["a_id"]),
                    b_id=str(obj["b_id"]),
                    gold=str(obj["gold"]),
                    domain=str(obj["domain"]),
                )
            )
        except KeyError as exc:
            raise PairError(f"{path} line {lineno}: missing key {exc}") from None
    return PairSet(pairs=tuple(pairs), provenance=str(header["provenance"]), seed=header.get("seed"))
