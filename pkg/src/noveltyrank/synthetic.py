"""Deterministic synthetic corpora and embeddings for tests and demos.

The separable variants plant the label signal in the first coordinate of
the classification channel (positives strictly above a margin, negatives
strictly below its negation) so that a monotone scorer exists and small
training budgets can find it.
"""

from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np

from .corpus import DOMAINS, Corpus, PaperRecord, save_corpus
from .embeddings import EmbeddingStore, save_store

START_DATE = dt.date(2024, 6, 1)


def make_corpus(
    n: int,
    seed: int = 0,
    domains: tuple[str, ...] = DOMAINS[:6],
    positive_rate: float = 0.3,
    span_days: int = 365,
    id_prefix: str = "p",
) -> Corpus:
    rng = np.random.default_rng(seed)
    width = max(4, len(str(n)))
    records = []
    for i in range(n):
        paper_id = f"{id_prefix}{i:0{width}d}"
        domain = domains[int(rng.integers(len(domains)))]
        label = int(rng.random() < positive_rate)
        published = START_DATE + dt.timedelta(days=int(rng.integers(span_days)))
        records.append(
            PaperRecord(
                id=paper_id,
                title=f"Synthetic study {i} in {domain}",
                abstract=f"Abstract text for synthetic paper {i} ({'novel' if label else 'incremental'}).",
                domain=domain,
                published=published,
                label=label,
                categories=(f"cat.{domain.lower()}",),
            )
        )
    return Corpus.from_records(records)


def make_stores(
    corpus: Corpus,
    dim: int = 32,
    seed: int = 0,
    separable: bool = False,
    margin: float = 1.0,
) -> dict[str, EmbeddingStore]:
    """Random unit-ish embeddings; optionally label-separable (see module doc)."""
    rng = np.random.default_rng(seed)
    vectors: dict[str, dict[str, np.ndarray]] = {"classification": {}, "proximity": {}}
    for rec in corpus:
        for channel in ("classification", "proximity"):
            vec = rng.normal(size=dim)
            vec /= np.linalg.norm(vec)
            if separable and channel == "classification":
                sign = 1.0 if rec.label == 1 else -1.0
                vec[0] = sign * (margin + rng.random() * 0.5)
            vectors[channel][rec.id] = vec.astype(np.float32)
    return {
        channel: EmbeddingStore.from_vectors(channel, by_id) for channel, by_id in vectors.items()
    }


def write_fixture(
    directory: str | Path,
    n: int = 120,
    dim: int = 32,
    seed: int = 0,
    separable: bool = True,
) -> dict[str, Path]:
    """Materialize a corpus file + embedding file pairs under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    corpus = make_corpus(n, seed=seed)
    stores = make_stores(corpus, dim=dim, seed=seed + 1, separable=separable)
    corpus_path = directory / "corpus.jsonl"
    save_corpus(corpus, corpus_path)
    embeddings_dir = directory / "embeddings"
    for store in stores.values():
        save_store(store, embeddings_dir)
    return {"corpus": corpus_path, "embeddings": embeddings_dir}
