"""Training loops for the classification and Siamese ranking heads.

Both loops share the same skeleton: epoch-level shuffling, micro-batches
of ``batch_size`` examples, gradient accumulation that averages (not sums)
micro-batch gradients before each optimizer step, and a linear
warmup/decay learning-rate multiplier evaluated per optimizer step.

All randomness (shuffling, dropout) derives from cfg.seed, so a fixed
seed reproduces the loss history and final weights bit-for-bit under
single-threaded execution.

The ranking loop is Siamese: both members of a pair pass through the same
parameters, so scoring an identical pair always yields equal scores.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .losses import classification_loss, ranknet_loss, softmax
from .nn import MlpHead
from .optim import OptimizerState, TrainConfig, adamw_step, lr_at

logger = logging.getLogger(__name__)


class TrainingError(ValueError):
    """Raised for empty datasets and feature/recipe mismatches."""


@dataclass(frozen=True)
class ClassifyDataset:
    x: np.ndarray  # (n, d) float32
    y: np.ndarray  # (n,) int64 in {0, 1}
    recipe_hash: str | None = None

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class RankDataset:
    """Pairs as two aligned feature matrices plus gold slots (1 = A wins)."""

    x_a: np.ndarray  # (n, d) float32
    x_b: np.ndarray  # (n, d) float32
    y: np.ndarray  # (n,) float64, 1.0 if slot A holds the positive
    recipe_hash: str | None = None

    def __len__(self) -> int:
        return self.x_a.shape[0]


def _check_compat(head: MlpHead, dim: int, recipe_hash: str | None) -> None:
    if dim != head.input_dim:
        raise TrainingError(f"feature width {dim} does not match head input {head.input_dim}")
    if recipe_hash and head.recipe_hash and recipe_hash != head.recipe_hash:
        raise TrainingError(
            f"feature recipe hash {recipe_hash[:12]} does not match head recipe hash {head.recipe_hash[:12]}"
        )


def train(
    head: MlpHead,
    data: ClassifyDataset | RankDataset,
    cfg: TrainConfig,
    task: str | None = None,
) -> tuple[MlpHead, list[float]]:
    """Train in place; returns (head, per-epoch mean loss history)."""
    task = task or head.task
    if task not in ("classify", "rank"):
        raise TrainingError(f"task must be 'classify' or 'rank', got {task!r}")
    if len(data) == 0:
        raise TrainingError("empty dataset")
    if task == "classify" and not isinstance(data, ClassifyDataset):
        raise TrainingError("classify task requires a ClassifyDataset")
    if task == "rank" and not isinstance(data, RankDataset):
        raise TrainingError("rank task requires a RankDataset")
    dim = data.x.shape[1] if isinstance(data, ClassifyDataset) else data.x_a.shape[1]
    _check_compat(head, dim, data.recipe_hash)

    n = len(data)
    micro_per_epoch = -(-n // cfg.batch_size)
    steps_per_epoch = -(-micro_per_epoch // cfg.grad_accumulation)
    total_steps = cfg.epochs * steps_per_epoch
    rng = np.random.default_rng(cfg.seed)
    params = head.parameters()
    state = OptimizerState.for_params(params)
    head.mode = "train"
    if head.seed is None:
        head.seed = cfg.seed

    history: list[float] = []
    opt_step = 0
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        acc_grads: list[np.ndarray] | None = None
        acc_count = 0

        def flush() -> None:
            nonlocal acc_grads, acc_count, opt_step
            if acc_count == 0:
                return
            averaged = [g / acc_count for g in acc_grads]
            opt_step += 1
            mult = lr_at(cfg, opt_step, total_steps)
            adamw_step(params, averaged, state, cfg, lr_multiplier=mult)
            acc_grads = None
            acc_count = 0

        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            if task == "classify":
                loss, grads = _classify_micro_batch(head, data, idx, rng)
            else:
                loss, grads = _rank_micro_batch(head, data, idx, rng)
            epoch_loss += loss * len(idx)
            if acc_grads is None:
                acc_grads = grads
            else:
                acc_grads = [a + g for a, g in zip(acc_grads, grads)]
            acc_count += 1
            if acc_count == cfg.grad_accumulation:
                flush()
        flush()  # partial accumulation group at epoch end still steps
        history.append(epoch_loss / n)
        logger.debug("epoch %d/%d mean loss %.6f", epoch + 1, cfg.epochs, history[-1])

    head.set_parameters(params)
    head.mode = "infer"
    return head, history


def _classify_micro_batch(head, data, idx, rng):
    out, cache = head.forward(data.x[idx], dropout_rng=rng)
    loss, grad_logits = classification_loss(out, data.y[idx])
    return loss, head.backward(cache, grad_logits)


def _rank_micro_batch(head, data, idx, rng):
    out_a, cache_a = head.forward(data.x_a[idx], dropout_rng=rng)
    out_b, cache_b = head.forward(data.x_b[idx], dropout_rng=rng)
    loss, grad_sa, grad_sb = ranknet_loss(out_a[:, 0], out_b[:, 0], data.y[idx])
    grads_a = head.backward(cache_a, grad_sa[:, None])
    grads_b = head.backward(cache_b, grad_sb[:, None])
    return loss, [ga + gb for ga, gb in zip(grads_a, grads_b)]


def predict(head: MlpHead, x: np.ndarray):
    """Inference: classify -> (label, probabilities); rank -> scalar score."""
    if head.mode != "infer":
        raise TrainingError("predict requires infer mode")
    out, _ = head.forward(x)
    if head.task == "classify":
        single = out.ndim == 1
        probs = softmax(out)
        labels = np.argmax(out, axis=-1)
        if single:
            return int(labels), probs
        return labels.astype(int), probs
    if out.ndim == 1:
        return float(out[0])
    return out[:, 0].astype(np.float64)
