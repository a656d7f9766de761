"""Binary checkpoint format for trained heads.

Layout: magic ``NVRM`` (4 bytes), version u32, header length u32 (all
little-endian), a UTF-8 JSON header, then the payload. The header carries
the task, layer sizes, dropout rate, the producing fusion recipe, the
training seed, and a SHA-256 checksum of the payload; the payload is
little-endian float32 values per layer (weights row-major, then biases),
optionally followed by the optimizer's first and second moments in the
same parameter order (as float64).
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..fusion import FusionRecipe
from .nn import MlpHead
from .optim import OptimizerState

MAGIC = b"NVRM"
FORMAT_VERSION = 1

_PREFIX = struct.Struct("<4sII")  # magic, version, header length


class CheckpointError(ValueError):
    """Raised for bad magic/version, checksum failures, or truncated files."""


def _payload_bytes(head: MlpHead, optimizer: OptimizerState | None) -> bytes:
    parts = [np.ascontiguousarray(p, dtype="<f4").tobytes() for p in head.parameters()]
    if optimizer is not None:
        parts += [np.ascontiguousarray(m, dtype="<f8").tobytes() for m in optimizer.m]
        parts += [np.ascontiguousarray(v, dtype="<f8").tobytes() for v in optimizer.v]
    return b"".join(parts)


def save_checkpoint(
    path: str | Path,
    head: MlpHead,
    recipe: FusionRecipe | None = None,
    optimizer: OptimizerState | None = None,
) -> None:
    payload = _payload_bytes(head, optimizer)
    header = {
        "task": head.task,
        "layer_sizes": list(head.layer_sizes),
        "dropout_rate": head.dropout_rate,
        "recipe": recipe.to_json() if recipe is not None else None,
        "seed": head.seed,
        "has_optimizer": optimizer is not None,
        "optimizer_step": optimizer.step if optimizer is not None else None,
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    header_bytes = json.dumps(header, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)


def load_checkpoint(path: str | Path) -> tuple[MlpHead, FusionRecipe | None, OptimizerState | None]:
    raw = Path(path).read_bytes()
    if len(raw) < _PREFIX.size:
        raise CheckpointError(f"{path}: truncated prefix")
    magic, version, header_len = _PREFIX.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    header_end = _PREFIX.size + header_len
    if len(raw) < header_end:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(raw[_PREFIX.size : header_end])
    except json.JSONDecodeError:
        raise CheckpointError(f"{path}: corrupt header JSON") from None
    payload = raw[header_end:]
    digest = hashlib.sha256(payload).hexdigest()
    if digest != header["payload_sha256"]:
        raise CheckpointError(f"{path}: payload checksum mismatch (corrupted file)")

    sizes = tuple(int(s) for s in header["layer_sizes"])
    recipe = FusionRecipe.from_json(header["recipe"]) if header.get("recipe") else None
    weights, biases = [], []
    offset = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w_bytes = fan_in * fan_out * 4
        weights.append(
            np.frombuffer(payload, dtype="<f4", count=fan_in * fan_out, offset=offset)
            .reshape(fan_in, fan_out)
            .copy()
        )
        offset += w_bytes
        biases.append(np.frombuffer(payload, dtype="<f4", count=fan_out, offset=offset).copy())
        offset += fan_out * 4
    head = MlpHead(
        layer_sizes=sizes,
        weights=weights,
        biases=biases,
        dropout_rate=float(header["dropout_rate"]),
        task=str(header["task"]),
        mode="infer",
        seed=header.get("seed"),
        recipe_hash=recipe.hash if recipe is not None else None,
    )
    optimizer = None
    if header.get("has_optimizer"):
        shapes = [p.shape for p in head.parameters()]
        moments: list[list[np.ndarray]] = []
        for _ in range(2):
            arrays = []
            for shape in shapes:
                count = int(np.prod(shape))
                arrays.append(
                    np.frombuffer(payload, dtype="<f8", count=count, offset=offset).reshape(shape).copy()
                )
                offset += count * 8
            moments.append(arrays)
        optimizer = OptimizerState(m=moments[0], v=moments[1], step=int(header["optimizer_step"] or 0))
    if offset != len(payload):
        raise CheckpointError(f"{path}: {len(payload) - offset} unexpected trailing payload bytes")
    return head, recipe, optimizer
