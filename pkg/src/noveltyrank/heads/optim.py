"""AdamW with decoupled weight decay, plus the linear warmup/decay schedule.

Default hyperparameters mirror the two training setups the engine ships:
classification (lr 2e-5, batch 32, 5 epochs, weight decay 0.01, no
accumulation) and pairwise ranking (lr 1e-5, batch 64, 5 epochs, weight
decay 0.1, accumulation 2), both with warmup ratio 0.1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2e-5
    batch_size: int = 32
    epochs: int = 5
    weight_decay: float = 0.01
    warmup_ratio: float = 0.1
    grad_accumulation: int = 1
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1 or self.epochs < 1 or self.grad_accumulation < 1:
            raise ValueError("batch_size, epochs, and grad_accumulation must be >= 1")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise ValueError(f"warmup_ratio must be in [0, 1), got {self.warmup_ratio}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1 and self.adam_epsilon > 0):
            raise ValueError("invalid Adam moment/epsilon settings")

    def override(self, **kwargs) -> "TrainConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def classify_config(**overrides) -> TrainConfig:
    return TrainConfig(
        learning_rate=2e-5, batch_size=32, epochs=5, weight_decay=0.01,
        warmup_ratio=0.1, grad_accumulation=1,
    ).override(**overrides)


def rank_config(**overrides) -> TrainConfig:
    return TrainConfig(
        learning_rate=1e-5, batch_size=64, epochs=5, weight_decay=0.1,
        warmup_ratio=0.1, grad_accumulation=2,
    ).override(**overrides)


@dataclass
class OptimizerState:
    """Per-parameter first/second moment accumulators and the step counter."""

    m: list[np.ndarray] = field(repr=False)
    v: list[np.ndarray] = field(repr=False)
    step: int = 0

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "OptimizerState":
        return cls(
            m=[np.zeros_like(p, dtype=np.float64) for p in params],
            v=[np.zeros_like(p, dtype=np.float64) for p in params],
            step=0,
        )


def adamw_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: OptimizerState,
    cfg: TrainConfig,
    lr_multiplier: float = 1.0,
) -> None:
    """One in-place AdamW update with bias-corrected moments.

    Weight decay is decoupled: theta <- theta - lr*wd*theta, computed from
    the incoming parameter value, separate from the gradient step. ``lr``
    here is cfg.learning_rate * lr_multiplier.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError(
            f"parameter/gradient/state length mismatch: {len(params)}, {len(grads)}, {len(state.m)}"
        )
    if not 0.0 <= lr_multiplier <= 1.0:
        raise ValueError(f"lr_multiplier must be in [0, 1], got {lr_multiplier}")
    state.step += 1
    t = state.step
    b1, b2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon
    lr = cfg.learning_rate * lr_multiplier
    bias1 = 1.0 - b1**t
    bias2 = 1.0 - b2**t
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"parameter {i}: shape {p.shape} vs gradient shape {g.shape}")
        g64 = np.asarray(g, dtype=np.float64)
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g64
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g64 * g64
        m_hat = state.m[i] / bias1
        v_hat = state.v[i] / bias2
        update = lr * m_hat / (np.sqrt(v_hat) + eps) + lr * cfg.weight_decay * np.asarray(p, dtype=np.float64)
        p -= update.astype(p.dtype)


def lr_at(cfg: TrainConfig, step: int, total_steps: int) -> float:
    """Linear 0 -> 1 warmup, then linear 1 -> 0 decay, as a multiplier.

    warmup_steps = round(warmup_ratio * total_steps); steps are counted
    from 0 (multiplier 0 when warmup exists) to total_steps (multiplier 0).
    """
    if total_steps <= 0:
        raise ValueError(f"total_steps must be positive, got {total_steps}")
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    warmup_steps = round(cfg.warmup_ratio * total_steps)
    if warmup_steps > 0 and step <= warmup_steps:
        return step / warmup_steps
    if total_steps == warmup_steps:
        return 1.0
    return (total_steps - step) / (total_steps - warmup_steps)
