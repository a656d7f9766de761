"""Novelty estimation engine for research papers.

Pipeline: ingest a labeled paper corpus, retrieve each paper's strictly-
prior nearest neighbors in proximity-embedding space, fuse embeddings and
similarity signals into fixed-order feature vectors, train a binary
classification head and/or a Siamese pairwise-ranking head, evaluate both
formulations, and serve scores over HTTP.
"""

__version__ = "0.1.0"

from .corpus import Corpus, CorpusError, PaperRecord, corpus_stats, load_corpus, save_corpus, temporal_split
from .embeddings import EmbeddingStore, EmbeddingStoreError, load_store, save_store
from .fusion import FeatureVector, FusionError, FusionRecipe, assemble_features, batch_assemble, default_recipe
from .pairs import ComparisonPair, PairSet, dense_eval_pairs, load_pairs, sample_training_pairs, save_pairs
from .simindex import (
    NeighborList,
    PriorIndex,
    SimilarityFeatures,
    SimIndexError,
    build_index,
    compute_all_features,
    query_prior_topk,
    render_similarity_report,
    similarity_features,
)

__all__ = [
    "__version__",
    "Corpus",
    "CorpusError",
    "PaperRecord",
    "load_corpus",
    "save_corpus",
    "temporal_split",
    "corpus_stats",
    "EmbeddingStore",
    "EmbeddingStoreError",
    "load_store",
    "save_store",
    "PriorIndex",
    "NeighborList",
    "SimilarityFeatures",
    "SimIndexError",
    "build_index",
    "query_prior_topk",
    "similarity_features",
    "render_similarity_report",
    "compute_all_features",
    "FusionRecipe",
    "FeatureVector",
    "FusionError",
    "default_recipe",
    "assemble_features",
    "batch_assemble",
    "ComparisonPair",
    "PairSet",
    "sample_training_pairs",
    "dense_eval_pairs",
    "save_pairs",
    "load_pairs",
]
