"""Numerically stable losses and their analytic gradients.

Both losses accept a single example or a batch; batch mode returns the
mean loss and gradients that already carry the 1/B factor, so they can be
fed straight into the backward pass.
"""

from __future__ import annotations

import numpy as np


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtraction stabilized softmax over the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def _softplus(x: np.ndarray) -> np.ndarray:
    # log(1 + e^x), stable on both tails.
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def classification_loss(logits: np.ndarray, label) -> tuple[float, np.ndarray]:
    """Cross-entropy over two logits: loss = -log softmax(logits)[label].

    Single example: returns (loss, softmax - onehot). Batch (B, 2) with a
    label array: returns (mean loss, per-example grads / B).
    """
    z = np.asarray(logits, dtype=np.float64)
    single = z.ndim == 1
    if single:
        z = z[None, :]
        labels = np.array([label], dtype=np.int64)
    else:
        labels = np.asarray(label, dtype=np.int64)
    if z.shape[0] != labels.shape[0]:
        raise ValueError(f"{z.shape[0]} logit rows vs {labels.shape[0]} labels")
    shifted = z - np.max(z, axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_norm[:, None]
    rows = np.arange(z.shape[0])
    losses = -log_probs[rows, labels]
    grads = np.exp(log_probs)
    grads[rows, labels] -= 1.0
    if single:
        return float(losses[0]), grads[0]
    return float(losses.mean()), grads / z.shape[0]


def ranknet_loss(s_a, s_b, gold) -> tuple[float, np.ndarray | float, np.ndarray | float]:
    """Binary cross-entropy on the score difference sigma(s_a - s_b).

    ``gold`` is 'A'/'B' (or an array of 1/0 targets, 1 meaning slot A is
    the more novel paper). Stabilized via softplus: for y=1 the loss is
    softplus(-(s_a - s_b)), for y=0 softplus(s_a - s_b). Returns
    (loss, grad_s_a, grad_s_b) with grad_s_b = -grad_s_a exactly; batch
    mode returns the mean loss and gradients carrying the 1/B factor.
    """
    sa = np.asarray(s_a, dtype=np.float64)
    sb = np.asarray(s_b, dtype=np.float64)
    single = sa.ndim == 0
    sa = np.atleast_1d(sa)
    sb = np.atleast_1d(sb)
    if isinstance(gold, str):
        if gold not in ("A", "B"):
            raise ValueError(f"gold must be 'A' or 'B', got {gold!r}")
        y = np.full(sa.shape, 1.0 if gold == "A" else 0.0)
    else:
        y = np.asarray(gold, dtype=np.float64)
        y = np.atleast_1d(y)
    if not (sa.shape == sb.shape == y.shape):
        raise ValueError(f"shape mismatch: s_a {sa.shape}, s_b {sb.shape}, gold {y.shape}")
    d = sa - sb
    losses = np.where(y == 1.0, _softplus(-d), _softplus(d))
    # -sigmoid(-d) equals sigmoid(d) - 1 without cancellation, and makes the
    # gradients exactly swap-symmetric alongside the loss.
    grad_sa = np.where(y == 1.0, -sigmoid(-d), sigmoid(d))
    if single:
        return float(losses[0]), float(grad_sa[0]), float(-grad_sa[0])
    n = sa.shape[0]
    grad_sa = grad_sa / n
    return float(losses.mean()), grad_sa, -grad_sa
