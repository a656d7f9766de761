"""HTTP scoring service over an immutable model snapshot.

A snapshot directory bundles a corpus, both embedding channels, and one or
both trained heads; ``snapshot.json`` names the files. Every request is
read-only against the loaded snapshot, so concurrent handling needs no
synchronization.

Endpoints (JSON in/out):
  GET  /v1/health            snapshot version, recipe hash, loaded heads
  POST /v1/score             {paper_id} or {embeddings, published, domain}
  POST /v1/compare           {a, b} -> winner by rank-head score
  POST /v1/similar           {paper_id, k} -> strictly-prior neighbors
  POST /v1/rank              {candidates: [ids]} -> score-ordered list
  GET  /v1/domains           per-domain corpus stats + recent papers

Errors use the envelope {"error": {"code", "message", "details"}} with
404 for unknown papers, 422 for malformed payloads, and 409 for feature
recipe mismatches.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .corpus import Corpus, load_corpus
from .embeddings import CHANNELS, EmbeddingStore, load_store
from .fusion import FeatureVector, FusionError, FusionRecipe, assemble_values
from .heads import MlpHead, load_checkpoint, predict
from .simindex import DEFAULT_K, PriorIndex, SimilarityFeatures, build_index, similarity_features

API_PREFIX = "/v1"


class SnapshotError(ValueError):
    """Raised when a snapshot directory is incomplete or inconsistent."""


class ApiError(Exception):
    """Request-level failure carrying the HTTP status and error envelope."""

    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}

    def body(self) -> dict:
        return {"error": {"code": self.code, "message": self.message, "details": self.details}}


@dataclass
class ModelSnapshot:
    version: str
    corpus: Corpus
    stores: dict[str, EmbeddingStore]
    index: PriorIndex
    recipe: FusionRecipe
    classify_head: MlpHead | None
    rank_head: MlpHead | None
    k: int = DEFAULT_K

    @property
    def heads(self) -> list[str]:
        out = []
        if self.classify_head is not None:
            out.append("classify")
        if self.rank_head is not None:
            out.append("rank")
        return out


def load_snapshot(directory: str | Path) -> ModelSnapshot:
    """Load and cross-validate a snapshot directory."""
    directory = Path(directory)
    manifest_file = directory / "snapshot.json"
    if not manifest_file.exists():
        raise SnapshotError(f"missing {manifest_file}")
    manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
    corpus = load_corpus(directory / manifest.get("corpus", "corpus.jsonl"))
    embeddings_dir = directory / manifest.get("embeddings", ".")
    stores = {channel: load_store(embeddings_dir, channel) for channel in CHANNELS}
    index = build_index(corpus, stores["proximity"])

    heads: dict[str, MlpHead | None] = {"classify": None, "rank": None}
    recipes: list[FusionRecipe] = []
    for task, key in (("classify", "classify_checkpoint"), ("rank", "rank_checkpoint")):
        rel = manifest.get(key)
        if not rel:
            continue
        head, recipe, _ = load_checkpoint(directory / rel)
        if head.task != task:
            raise SnapshotError(f"{rel}: checkpoint task {head.task!r} does not match slot {task!r}")
        if recipe is None:
            raise SnapshotError(f"{rel}: checkpoint carries no fusion recipe")
        heads[task] = head
        recipes.append(recipe)
    if not recipes:
        raise SnapshotError("snapshot must reference at least one checkpoint")
    if len(recipes) == 2 and recipes[0].hash != recipes[1].hash:
        raise SnapshotError("classify and rank checkpoints disagree on the fusion recipe")
    return ModelSnapshot(
        version=str(manifest.get("version", "unversioned")),
        corpus=corpus,
        stores=stores,
        index=index,
        recipe=recipes[0],
        classify_head=heads["classify"],
        rank_head=heads["rank"],
        k=int(manifest.get("k", DEFAULT_K)),
    )


def _neighbor_payload(snapshot: ModelSnapshot, neighbors) -> list[dict]:
    return [
        {"id": nid, "title": snapshot.corpus.get(nid).title, "cosine": cosine}
        for nid, cosine in neighbors.entries
    ]


def _features_for_payload(
    snapshot: ModelSnapshot, vectors: dict[str, np.ndarray], published: dt.date
) -> tuple[FeatureVector, SimilarityFeatures, object]:
    neighbors = snapshot.index.query_vector(vectors["proximity"], published, k=snapshot.k)
    sim = similarity_features(neighbors, snapshot.stores["proximity"])
    resolved = {
        "classification_embedding": vectors.get("classification"),
        "proximity_embedding": vectors.get("proximity"),
        "aggregated_neighbors": sim.aggregated_embedding,
        "max_sim": sim.max_sim,
        "avg_sim": sim.avg_sim,
    }
    resolved = {k: v for k, v in resolved.items() if v is not None}
    try:
        fv = assemble_values("<request>", resolved, snapshot.recipe)
    except FusionError as exc:
        raise ApiError(422, "bad_features", str(exc)) from exc
    return fv, sim, neighbors


def _vectors_for_paper(snapshot: ModelSnapshot, paper_id: str) -> dict[str, np.ndarray]:
    return {channel: store.get(paper_id) for channel, store in snapshot.stores.items()}


def _score_feature_vector(snapshot: ModelSnapshot, fv: FeatureVector) -> dict:
    if fv.recipe_hash != snapshot.recipe.hash:
        raise ApiError(409, "recipe_mismatch", "feature vector recipe does not match the snapshot recipe")
    out: dict = {}
    if snapshot.rank_head is not None:
        out["score"] = float(predict(snapshot.rank_head, fv.values))
    if snapshot.classify_head is not None:
        label, probs = predict(snapshot.classify_head, fv.values)
        out["label"] = int(label)
        out["probabilities"] = [float(p) for p in probs]
    return out


def _require_paper(snapshot: ModelSnapshot, paper_id: str) -> None:
    if paper_id not in snapshot.corpus:
        raise ApiError(404, "unknown_paper", f"unknown paper id {paper_id!r}", {"id": paper_id})


def _rank_score(snapshot: ModelSnapshot, paper_id: str) -> float:
    vectors = _vectors_for_paper(snapshot, paper_id)
    published = snapshot.corpus.get(paper_id).published
    fv, _, _ = _features_for_payload(snapshot, vectors, published)
    if fv.recipe_hash != snapshot.recipe.hash:
        raise ApiError(409, "recipe_mismatch", "feature vector recipe does not match the snapshot recipe")
    return float(predict(snapshot.rank_head, fv.values))


def _parse_payload_vectors(snapshot: ModelSnapshot, payload: dict) -> tuple[dict[str, np.ndarray], dt.date]:
    embeddings = payload.get("embeddings")
    if not isinstance(embeddings, dict):
        raise ApiError(422, "bad_payload", "request needs either paper_id or an embeddings object")
    vectors: dict[str, np.ndarray] = {}
    for channel, raw in embeddings.items():
        if channel not in CHANNELS:
            raise ApiError(422, "bad_payload", f"unknown embedding channel {channel!r}")
        vec = np.asarray(raw, dtype=np.float32)
        expected = snapshot.stores[channel].dim
        if vec.ndim != 1 or vec.shape[0] != expected:
            raise ApiError(
                422,
                "bad_payload",
                f"{channel} embedding must be a flat list of {expected} floats",
                {"channel": channel, "expected_dim": expected},
            )
        if not np.all(np.isfinite(vec)):
            raise ApiError(422, "bad_payload", f"{channel} embedding contains non-finite values")
        vectors[channel] = vec
    if "proximity" not in vectors:
        raise ApiError(422, "bad_payload", "a proximity embedding is required for neighbor retrieval")
    raw_date = payload.get("published")
    if not isinstance(raw_date, str):
        raise ApiError(422, "bad_payload", "published date (YYYY-MM-DD) is required with raw embeddings")
    try:
        published = dt.date.fromisoformat(raw_date)
    except ValueError:
        raise ApiError(422, "bad_payload", f"invalid published date {raw_date!r}") from None
    return vectors, published


def create_app(snapshot: ModelSnapshot) -> FastAPI:
    app = FastAPI(title="noveltyrank", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "bad_payload", "message": "malformed request body", "details": {}}},
        )

    @app.get(f"{API_PREFIX}/health")
    async def health():
        return {
            "status": "ok",
            "version": snapshot.version,
            "recipe_hash": snapshot.recipe.hash,
            "heads": snapshot.heads,
            "papers": len(snapshot.corpus),
        }

    @app.post(f"{API_PREFIX}/score")
    async def score(payload: dict):
        paper_id = payload.get("paper_id")
        if paper_id is not None:
            paper_id = str(paper_id)
            _require_paper(snapshot, paper_id)
            vectors = _vectors_for_paper(snapshot, paper_id)
            published = snapshot.corpus.get(paper_id).published
        else:
            vectors, published = _parse_payload_vectors(snapshot, payload)
        fv, sim, neighbors = _features_for_payload(snapshot, vectors, published)
        result = _score_feature_vector(snapshot, fv)
        result.update(
            {
                "paper_id": paper_id,
                "max_sim": sim.max_sim,
                "avg_sim": sim.avg_sim,
                "neighbors": _neighbor_payload(snapshot, neighbors),
            }
        )
        return result

    @app.post(f"{API_PREFIX}/compare")
    async def compare(payload: dict):
        if snapshot.rank_head is None:
            raise ApiError(409, "no_rank_head", "snapshot has no ranking head loaded")
        for key in ("a", "b"):
            if not isinstance(payload.get(key), str):
                raise ApiError(422, "bad_payload", f"compare needs paper id fields 'a' and 'b'")
        a_id, b_id = payload["a"], payload["b"]
        _require_paper(snapshot, a_id)
        _require_paper(snapshot, b_id)
        score_a = _rank_score(snapshot, a_id)
        score_b = _rank_score(snapshot, b_id)
        tie = score_a == score_b
        winner = "A" if score_a >= score_b else "B"  # exact tie reported as A
        return {"winner": winner, "score_a": score_a, "score_b": score_b, "tie": tie}

    @app.post(f"{API_PREFIX}/similar")
    async def similar(payload: dict):
        paper_id = payload.get("paper_id")
        if not isinstance(paper_id, str):
            raise ApiError(422, "bad_payload", "similar needs a paper_id field")
        _require_paper(snapshot, paper_id)
        k = payload.get("k", snapshot.k)
        if not isinstance(k, int) or k < 1:
            raise ApiError(422, "bad_payload", f"k must be a positive integer, got {k!r}")
        neighbors = snapshot.index.query_prior_topk(paper_id, k=k)
        return {"paper_id": paper_id, "neighbors": _neighbor_payload(snapshot, neighbors)}

    @app.post(f"{API_PREFIX}/rank")
    async def rank(payload: dict):
        if snapshot.rank_head is None:
            raise ApiError(409, "no_rank_head", "snapshot has no ranking head loaded")
        candidates = payload.get("candidates")
        if not isinstance(candidates, list) or not candidates or not all(isinstance(c, str) for c in candidates):
            raise ApiError(422, "bad_payload", "rank needs a non-empty candidates list of paper ids")
        unknown = sorted({c for c in candidates if c not in snapshot.corpus})
        if unknown:
            raise ApiError(404, "unknown_paper", "unknown paper ids in candidates", {"ids": unknown})
        unique = sorted(set(candidates))
        scores = {pid: _rank_score(snapshot, pid) for pid in unique}
        ordered = sorted(unique, key=lambda pid: (-scores[pid], pid))
        return {
            "ranking": [
                {"id": pid, "score": scores[pid], "rank": i + 1} for i, pid in enumerate(ordered)
            ]
        }

    @app.get(f"{API_PREFIX}/domains")
    async def domains():
        by_domain: dict[str, dict] = {}
        for rec in snapshot.corpus:  # date-ascending ordering
            entry = by_domain.setdefault(
                rec.domain, {"domain": rec.domain, "papers": 0, "positives": 0, "recent": []}
            )
            entry["papers"] += 1
            entry["positives"] += rec.label
            entry["recent"].append(
                {"id": rec.id, "title": rec.title, "published": rec.published.isoformat()}
            )
        out = []
        total = len(snapshot.corpus)
        for domain in sorted(by_domain):
            entry = by_domain[domain]
            entry["recent"] = list(reversed(entry["recent"][-10:]))  # newest first
            entry["share"] = entry["papers"] / total if total else 0.0
            entry["positive_share"] = entry["positives"] / entry["papers"]
            out.append(entry)
        return {"domains": out}

    return app


def resolve_config(
    flags: dict | None = None,
    env: dict | None = None,
    config_path: str | Path | None = None,
) -> dict:
    """Merge service settings: flags win over environment wins over file.

    Environment keys: NOVELTYRANK_CONFIG (file path), NOVELTYRANK_LISTEN,
    NOVELTYRANK_SNAPSHOT, NOVELTYRANK_JUDGE_ENDPOINT,
    NOVELTYRANK_EMBEDDER_ENDPOINT.
    """
    env = dict(os.environ) if env is None else env
    settings: dict = {
        "listen": "127.0.0.1:8000",
        "snapshot": None,
        "judge_endpoint": None,
        "embedder_endpoint": None,
    }
    path = config_path or env.get("NOVELTYRANK_CONFIG")
    if path:
        file_cfg = json.loads(Path(path).read_text(encoding="utf-8"))
        for key in settings:
            if key in file_cfg:
                settings[key] = file_cfg[key]
    env_map = {
        "listen": "NOVELTYRANK_LISTEN",
        "snapshot": "NOVELTYRANK_SNAPSHOT",
        "judge_endpoint": "NOVELTYRANK_JUDGE_ENDPOINT",
        "embedder_endpoint": "NOVELTYRANK_EMBEDDER_ENDPOINT",
    }
    for key, env_key in env_map.items():
        if env.get(env_key):
            settings[key] = env[env_key]
    for key, value in (flags or {}).items():
        if value is not None:
            settings[key] = value
    return settings
