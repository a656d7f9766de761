"""Id-addressable embedding matrices and their on-disk format.

Each corpus ships two embedding channels: ``classification`` (semantic
identity) and ``proximity`` (citation-space closeness; used for neighbor
retrieval). A store is persisted as a file pair:

* manifest: line-delimited ``{"id": ..., "row": ...}`` with rows 0..n-1
  contiguous, matching the matrix row order;
* matrix: a 16-byte header ``NVR1`` magic (4 bytes), format version u32,
  row count u64 (little-endian), followed by the column count u32 and then
  n*dim little-endian float32 values, row-major.

Zero vectors are rejected at load time: cosine similarity is undefined
for them.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"NVR1"
FORMAT_VERSION = 1
CHANNELS = ("classification", "proximity")
DEFAULT_DIM = 768

_HEADER = struct.Struct("<4sIQ")  # magic, version, n
_DIM = struct.Struct("<I")


class EmbeddingStoreError(ValueError):
    """Raised for malformed embedding files or id/dimension mismatches."""


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable id -> float-vector map for one channel."""

    channel: str
    dim: int
    matrix: np.ndarray  # (n, dim) float32
    manifest: tuple[str, ...]  # row order
    row_of: dict[str, int]

    @classmethod
    def from_vectors(cls, channel: str, vectors: dict[str, np.ndarray] | list[tuple[str, np.ndarray]]) -> "EmbeddingStore":
        if channel not in CHANNELS:
            raise EmbeddingStoreError(f"unknown channel {channel!r} (expected one of {CHANNELS})")
        items = list(vectors.items()) if isinstance(vectors, dict) else list(vectors)
        if not items:
            raise EmbeddingStoreError("embedding store must contain at least one vector")
        dim = len(items[0][1])
        matrix = np.zeros((len(items), dim), dtype=np.float32)
        manifest: list[str] = []
        row_of: dict[str, int] = {}
        for row, (paper_id, vec) in enumerate(items):
            arr = np.asarray(vec, dtype=np.float32)
            if arr.shape != (dim,):
                raise EmbeddingStoreError(
                    f"vector for {paper_id!r} has shape {arr.shape}, expected ({dim},)"
                )
            if paper_id in row_of:
                raise EmbeddingStoreError(f"duplicate id {paper_id!r} in embedding store")
            _check_vector(arr, paper_id)
            matrix[row] = arr
            manifest.append(paper_id)
            row_of[paper_id] = row
        matrix.setflags(write=False)
        return cls(channel=channel, dim=dim, matrix=matrix, manifest=tuple(manifest), row_of=row_of)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.row_of

    def __len__(self) -> int:
        return len(self.manifest)

    def get(self, paper_id: str) -> np.ndarray:
        try:
            return self.matrix[self.row_of[paper_id]]
        except KeyError:
            raise EmbeddingStoreError(
                f"no {self.channel} embedding for paper {paper_id!r}"
            ) from None


def _check_vector(arr: np.ndarray, paper_id: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise EmbeddingStoreError(f"non-finite values in embedding for {paper_id!r}")
    if not np.any(arr):
        raise EmbeddingStoreError(f"all-zero embedding for {paper_id!r} (cosine undefined)")


def matrix_path(directory: str | Path, channel: str) -> Path:
    return Path(directory) / f"{channel}.nvr1"


def manifest_path(directory: str | Path, channel: str) -> Path:
    return Path(directory) / f"{channel}.manifest.jsonl"


def save_store(store: EmbeddingStore, directory: str | Path) -> None:
    """Write the manifest + matrix file pair into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(manifest_path(directory, store.channel), "w", encoding="utf-8") as fh:
        for row, paper_id in enumerate(store.manifest):
            fh.write(json.dumps({"id": paper_id, "row": row}) + "\n")
    with open(matrix_path(directory, store.channel), "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(store.manifest)))
        fh.write(_DIM.pack(store.dim))
        fh.write(np.ascontiguousarray(store.matrix, dtype="<f4").tobytes())


def load_store(directory: str | Path, channel: str) -> EmbeddingStore:
    """Load one channel's file pair from ``directory``."""
    mpath = matrix_path(directory, channel)
    if not mpath.exists():
        raise EmbeddingStoreError(f"missing matrix file {mpath}")
    raw = mpath.read_bytes()
    if len(raw) < _HEADER.size + _DIM.size:
        raise EmbeddingStoreError(f"{mpath}: truncated header")
    magic, version, n = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise EmbeddingStoreError(f"{mpath}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise EmbeddingStoreError(f"{mpath}: unsupported format version {version}")
    (dim,) = _DIM.unpack_from(raw, _HEADER.size)
    body = raw[_HEADER.size + _DIM.size :]
    expected = n * dim * 4
    if len(body) != expected:
        raise EmbeddingStoreError(f"{mpath}: expected {expected} payload bytes, found {len(body)}")
    matrix = np.frombuffer(body, dtype="<f4").reshape(n, dim)

    manifest: list[str | None] = [None] * n
    with open(manifest_path(directory, channel), encoding="utf-8") as fh:
        count = 0
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            row = obj["row"]
            if not isinstance(row, int) or not 0 <= row < n:
                raise EmbeddingStoreError(f"manifest line {lineno}: row {row!r} out of range 0..{n - 1}")
            if manifest[row] is not None:
                raise EmbeddingStoreError(f"manifest line {lineno}: duplicate row {row}")
            manifest[row] = str(obj["id"])
            count += 1
    if count != n:
        raise EmbeddingStoreError(f"manifest lists {count} rows, matrix has {n}")
    ids = [paper_id for paper_id in manifest if paper_id is not None]
    for row, paper_id in enumerate(ids):
        _check_vector(matrix[row], paper_id)
    matrix = matrix.astype(np.float32, copy=True)
    matrix.setflags(write=False)
    return EmbeddingStore(
        channel=channel,
        dim=dim,
        matrix=matrix,
        manifest=tuple(ids),
        row_of={paper_id: row for row, paper_id in enumerate(ids)},
    )
