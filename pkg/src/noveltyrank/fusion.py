"""Fixed-order feature fusion feeding the scoring heads.

A ``FusionRecipe`` names the concatenation order and widths of the input
sources; the default recipe is

    classification_embedding (dim) + proximity_embedding (dim)
    + aggregated_neighbors (dim) + max_sim (1) + avg_sim (1)

which yields 2306 slots at the stock 768-dim embeddings. The recipe (and
its hash) travel with every feature vector and checkpoint so that a model
can never be scored against features assembled differently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .embeddings import EmbeddingStore
from .simindex import SimilarityFeatures

PART_NAMES = (
    "classification_embedding",
    "proximity_embedding",
    "aggregated_neighbors",
    "max_sim",
    "avg_sim",
    "external_text_embedding",
)

SCALAR_PARTS = ("max_sim", "avg_sim")


class FusionError(ValueError):
    """Raised for unresolvable parts, width mismatches, or non-finite values."""


@dataclass(frozen=True)
class FusionRecipe:
    """Ordered (part name, width) list; total width is the head input size."""

    parts: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise FusionError("recipe must name at least one part")
        for name, width in self.parts:
            if name not in PART_NAMES:
                raise FusionError(f"unknown recipe part {name!r}")
            if width < 1:
                raise FusionError(f"part {name!r} must have positive width, got {width}")
            if name in SCALAR_PARTS and width != 1:
                raise FusionError(f"scalar part {name!r} must have width 1")

    @property
    def expected_dim(self) -> int:
        return sum(width for _, width in self.parts)

    def to_json(self) -> list[list]:
        return [[name, width] for name, width in self.parts]

    @classmethod
    def from_json(cls, raw: list) -> "FusionRecipe":
        return cls(parts=tuple((str(name), int(width)) for name, width in raw))

    @property
    def hash(self) -> str:
        payload = json.dumps(self.to_json(), separators=(",", ":")).encode()
        return hashlib.sha256(payload).hexdigest()


def default_recipe(dim: int = 768) -> FusionRecipe:
    return FusionRecipe(
        parts=(
            ("classification_embedding", dim),
            ("proximity_embedding", dim),
            ("aggregated_neighbors", dim),
            ("max_sim", 1),
            ("avg_sim", 1),
        )
    )


@dataclass(frozen=True)
class FeatureVector:
    paper_id: str
    values: np.ndarray  # float32, length recipe.expected_dim
    recipe_hash: str


def assemble_values(paper_id: str, resolved: dict[str, np.ndarray], recipe: FusionRecipe) -> FeatureVector:
    """Concatenate already-resolved part values, in recipe order."""
    chunks: list[np.ndarray] = []
    for name, width in recipe.parts:
        if name not in resolved:
            raise FusionError(f"part {name!r} unresolved for paper {paper_id!r}")
        part = np.atleast_1d(np.asarray(resolved[name], dtype=np.float32))
        if part.shape != (width,):
            raise FusionError(
                f"part {name!r} for paper {paper_id!r} has shape {part.shape}, recipe expects ({width},)"
            )
        chunks.append(part)
    values = np.concatenate(chunks)
    if not np.all(np.isfinite(values)):
        raise FusionError(f"non-finite feature values for paper {paper_id!r}")
    values.setflags(write=False)
    return FeatureVector(paper_id=paper_id, values=values, recipe_hash=recipe.hash)


def assemble_features(
    paper_id: str,
    stores: dict[str, EmbeddingStore],
    sim: SimilarityFeatures,
    recipe: FusionRecipe,
    external: np.ndarray | None = None,
) -> FeatureVector:
    """Resolve the recipe's parts from the stores and fuse them."""
    resolved: dict[str, np.ndarray] = {}
    for name, _ in recipe.parts:
        if name == "classification_embedding":
            resolved[name] = _store_vector(stores, "classification", paper_id, name)
        elif name == "proximity_embedding":
            resolved[name] = _store_vector(stores, "proximity", paper_id, name)
        elif name == "aggregated_neighbors":
            resolved[name] = np.asarray(sim.aggregated_embedding, dtype=np.float32)
        elif name == "max_sim":
            resolved[name] = np.array([sim.max_sim], dtype=np.float32)
        elif name == "avg_sim":
            resolved[name] = np.array([sim.avg_sim], dtype=np.float32)
        else:  # external_text_embedding
            if external is None:
                raise FusionError(f"part {name!r} required but no external vector supplied for {paper_id!r}")
            resolved[name] = np.asarray(external, dtype=np.float32)
    return assemble_values(paper_id, resolved, recipe)


def _store_vector(stores: dict[str, EmbeddingStore], channel: str, paper_id: str, part: str) -> np.ndarray:
    store = stores.get(channel)
    if store is None:
        raise FusionError(f"part {part!r} needs the {channel} store, which was not provided")
    if paper_id not in store:
        raise FusionError(f"part {part!r}: no {channel} embedding for paper {paper_id!r}")
    return np.asarray(store.get(paper_id), dtype=np.float32)


def batch_assemble(
    corpus: Corpus,
    stores: dict[str, EmbeddingStore],
    sim_features: dict[str, SimilarityFeatures],
    recipe: FusionRecipe,
) -> dict[str, FeatureVector]:
    """One FeatureVector per corpus paper; content independent of iteration order."""
    out: dict[str, FeatureVector] = {}
    for rec in corpus:
        if rec.id not in sim_features:
            raise FusionError(f"no similarity features for paper {rec.id!r}")
        out[rec.id] = assemble_features(rec.id, stores, sim_features[rec.id], recipe)
    return out
