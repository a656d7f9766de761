"""Strictly-prior nearest-neighbor search over proximity embeddings.

Retrieval is leakage-safe by construction: a query paper may only match
papers published strictly before its own publication date (same-day papers
are excluded). Similarity is cosine, computed as the inner product of
L2-normalized vectors; the search is an exact scan, which is cheap at the
corpus sizes this engine targets.

The engineered features derived from a neighbor list (max/avg cosine and
the mean neighbor embedding) feed the fused input of both scoring heads.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, PaperRecord
from .embeddings import EmbeddingStore, EmbeddingStoreError

DEFAULT_K = 10


class SimIndexError(ValueError):
    """Raised for unknown query ids or corpus/store mismatches."""


@dataclass(frozen=True)
class NeighborList:
    """Top-k strictly-prior neighbors, sorted by cosine desc then id asc."""

    query_id: str
    entries: tuple[tuple[str, float], ...]
    k_requested: int

    def ids(self) -> tuple[str, ...]:
        return tuple(nid for nid, _ in self.entries)

    def cosines(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.entries)


@dataclass(frozen=True)
class SimilarityFeatures:
    """Aggregate similarity signals for one paper.

    With no prior work the convention is max_sim = avg_sim = 0 and a zero
    aggregated embedding.
    """

    max_sim: float
    avg_sim: float
    neighbor_ids: tuple[str, ...]
    aggregated_embedding: np.ndarray

    @property
    def neighbor_count(self) -> int:
        return len(self.neighbor_ids)


class PriorIndex:
    """Immutable exact-search index restricted to strictly-earlier papers.

    Vectors are unit-normalized in float64 at build time so that query
    results are invariant to positive rescaling of the stored vectors.
    """

    def __init__(self, corpus: Corpus, store: EmbeddingStore):
        if store.channel != "proximity":
            raise SimIndexError(f"index requires the proximity channel, got {store.channel!r}")
        missing = [pid for pid in corpus.ids() if pid not in store]
        if missing:
            raise SimIndexError(f"missing proximity embedding for paper {missing[0]!r}")
        self.corpus = corpus
        self.store = store
        self.dim = store.dim
        # Rows ordered by (published, id): the candidate set for a query is
        # always a prefix of this ordering.
        self._ids = list(corpus.ids())
        self._dates = [corpus.get(pid).published for pid in self._ids]
        mat = np.stack([store.get(pid) for pid in self._ids]).astype(np.float64)
        norms = np.linalg.norm(mat, axis=1, keepdims=True)
        self._unit = mat / norms
        self._unit.setflags(write=False)
        self._id_array = np.array(self._ids)
        self._row_of = {pid: i for i, pid in enumerate(self._ids)}

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._row_of

    def _prior_count(self, published: dt.date) -> int:
        # Binary search over the date-sorted ordering: first row with
        # date >= published bounds the strictly-prior prefix.
        lo, hi = 0, len(self._dates)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._dates[mid] < published:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def query_vector(self, vector: np.ndarray, published: dt.date, k: int = DEFAULT_K, query_id: str = "") -> NeighborList:
        """Top-k neighbors among papers published strictly before ``published``."""
        if k < 1:
            raise SimIndexError(f"k must be >= 1, got {k}")
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise SimIndexError(f"query vector has shape {vec.shape}, expected ({self.dim},)")
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.isfinite(norm):
            raise SimIndexError("query vector must be finite and non-zero")
        n_prior = self._prior_count(published)
        if n_prior == 0:
            return NeighborList(query_id=query_id, entries=(), k_requested=k)
        # einsum (not BLAS gemv) keeps the per-row reduction order independent
        # of row position, so identical vectors get bitwise-identical cosines
        # and the id tie-break is exact.
        cosines = np.einsum("ij,j->i", self._unit[:n_prior], vec / norm)
        # Sort by cosine descending, ties by id ascending. lexsort's last key
        # is primary; negating handles the descending direction.
        order = np.lexsort((self._id_array[:n_prior], -cosines))[:k]
        entries = tuple((self._ids[i], float(cosines[i])) for i in order)
        return NeighborList(query_id=query_id, entries=entries, k_requested=k)

    def query_prior_topk(self, query_id: str, k: int = DEFAULT_K) -> NeighborList:
        if query_id not in self._row_of:
            raise SimIndexError(f"unknown query id {query_id!r}")
        row = self._row_of[query_id]
        return self.query_vector(
            self.store.get(query_id),
            self._dates[row],
            k=k,
            query_id=query_id,
        )


def build_index(corpus: Corpus, store: EmbeddingStore) -> PriorIndex:
    return PriorIndex(corpus, store)


def query_prior_topk(index: PriorIndex, query_id: str, k: int = DEFAULT_K) -> NeighborList:
    return index.query_prior_topk(query_id, k=k)


def similarity_features(neighbors: NeighborList, store: EmbeddingStore) -> SimilarityFeatures:
    """max/avg cosine plus the arithmetic-mean embedding of the neighbors."""
    if not neighbors.entries:
        return SimilarityFeatures(
            max_sim=0.0,
            avg_sim=0.0,
            neighbor_ids=(),
            aggregated_embedding=np.zeros(store.dim, dtype=np.float64),
        )
    vectors = []
    for nid in neighbors.ids():
        if nid not in store:
            raise EmbeddingStoreError(f"no {store.channel} embedding for neighbor {nid!r}")
        vectors.append(store.get(nid))
    cosines = neighbors.cosines()
    aggregated = np.mean(np.stack(vectors).astype(np.float64), axis=0)
    return SimilarityFeatures(
        max_sim=float(max(cosines)),
        avg_sim=float(np.mean(cosines)),
        neighbor_ids=neighbors.ids(),
        aggregated_embedding=aggregated,
    )


def render_similarity_report(paper: PaperRecord, neighbors: NeighborList, corpus: Corpus) -> str:
    """Deterministic textual summary of a paper's closest prior work.

    Stands in for a generated prose report; output is byte-identical for
    identical inputs.
    """
    lines = [f'Prior-work similarity for "{paper.title}" ({paper.published.isoformat()}):']
    if not neighbors.entries:
        lines.append("No prior work retrieved.")
        max_sim = avg_sim = 0.0
    else:
        for rank, (nid, cosine) in enumerate(neighbors.entries, start=1):
            rec = corpus.get(nid)
            lines.append(f'{rank}. "{rec.title}" ({rec.published.isoformat()}) cosine={cosine:.4f}')
        max_sim = max(neighbors.cosines())
        avg_sim = sum(neighbors.cosines()) / len(neighbors.entries)
    lines.append(f"Max similarity to prior work: {max_sim:.4f}")
    lines.append(f"Average similarity to prior work: {avg_sim:.4f}")
    return "\n".join(lines) + "\n"


def write_features(features: dict[str, SimilarityFeatures], path: str | Path) -> None:
    """Export per-paper features as line-delimited JSON (full-precision floats)."""
    with open(path, "w", encoding="utf-8") as fh:
        for paper_id in sorted(features):
            feat = features[paper_id]
            fh.write(
                json.dumps(
                    {
                        "id": paper_id,
                        "max_sim": feat.max_sim,
                        "avg_sim": feat.avg_sim,
                        "neighbor_ids": list(feat.neighbor_ids),
                    }
                )
                + "\n"
            )


def read_features(path: str | Path, store: EmbeddingStore) -> dict[str, SimilarityFeatures]:
    """Load exported features, rebuilding aggregated embeddings from ``store``."""
    out: dict[str, SimilarityFeatures] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            neighbor_ids = tuple(obj["neighbor_ids"])
            if neighbor_ids:
                agg = np.mean(
                    np.stack([store.get(nid) for nid in neighbor_ids]).astype(np.float64), axis=0
                )
            else:
                agg = np.zeros(store.dim, dtype=np.float64)
            out[str(obj["id"])] = SimilarityFeatures(
                max_sim=float(obj["max_sim"]),
                avg_sim=float(obj["avg_sim"]),
                neighbor_ids=neighbor_ids,
                aggregated_embedding=agg,
            )
    return out


def compute_all_features(
    index: PriorIndex, store: EmbeddingStore, k: int = DEFAULT_K
) -> dict[str, SimilarityFeatures]:
    """Similarity features for every paper in the index's corpus."""
    return {
        pid: similarity_features(index.query_prior_topk(pid, k=k), store)
        for pid in index.corpus.ids()
    }
