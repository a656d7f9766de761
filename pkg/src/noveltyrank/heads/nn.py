"""Feed-forward network with explicit forward caching and exact backprop.

Architecture: affine -> ReLU -> dropout for each hidden layer, a bare
affine at the output. Dropout is inverted (train-time activations are
scaled by 1/(1-p)); inference applies no dropout and no rescaling.

Parameters live in float32 by default; gradient-check tests run the same
code in float64 by constructing heads with ``dtype=np.float64``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CLASSIFY_LAYERS = (2306, 512, 128, 2)
RANK_LAYERS = (2306, 256, 64, 1)
CLASSIFY_DROPOUT = 0.1
RANK_DROPOUT = 0.5


class HeadError(ValueError):
    """Raised for dimension mismatches and invalid head configuration."""


@dataclass
class ForwardCache:
    """Intermediates needed to backpropagate one forward pass exactly."""

    inputs: list[np.ndarray]  # input to each affine layer, (B, fan_in)
    pre_activations: list[np.ndarray]  # hidden-layer z, (B, fan_out)
    dropout_masks: list[np.ndarray | None]
    squeeze: bool  # caller passed a single vector


@dataclass
class MlpHead:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray] = field(repr=False)
    biases: list[np.ndarray] = field(repr=False)
    dropout_rate: float = 0.0
    task: str = "classify"  # "classify" | "rank"
    mode: str = "train"  # "train" | "infer"
    seed: int | None = None
    recipe_hash: str | None = None

    @classmethod
    def initialize(
        cls,
        layer_sizes: tuple[int, ...] | list[int],
        dropout_rate: float,
        seed: int,
        task: str = "classify",
        dtype=np.float32,
        recipe_hash: str | None = None,
    ) -> "MlpHead":
        """Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases."""
        sizes = tuple(int(s) for s in layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise HeadError(f"layer sizes must be >= 2 positive entries, got {sizes}")
        if not 0.0 <= dropout_rate < 1.0:
            raise HeadError(f"dropout_rate must be in [0, 1), got {dropout_rate}")
        if task not in ("classify", "rank"):
            raise HeadError(f"task must be 'classify' or 'rank', got {task!r}")
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype))
            biases.append(np.zeros(fan_out, dtype=dtype))
        return cls(
            layer_sizes=sizes,
            weights=weights,
            biases=biases,
            dropout_rate=float(dropout_rate),
            task=task,
            seed=seed,
            recipe_hash=recipe_hash,
        )

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def dtype(self):
        return self.weights[0].dtype

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list, checkpoint order: W then b per layer."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def set_parameters(self, params: list[np.ndarray]) -> None:
        expected = 2 * len(self.weights)
        if len(params) != expected:
            raise HeadError(f"expected {expected} parameter arrays, got {len(params)}")
        for i in range(len(self.weights)):
            self.weights[i] = params[2 * i]
            self.biases[i] = params[2 * i + 1]

    def forward(self, x: np.ndarray, dropout_rng: np.random.Generator | None = None) -> tuple[np.ndarray, ForwardCache]:
        """Run the network; returns (output, cache) where the cache suffices
        for an exact backward pass.

        ``dropout_rng`` is required exactly when mode='train' and
        dropout_rate > 0; inference never applies dropout.
        """
        arr = np.asarray(x, dtype=self.dtype)
        squeeze = arr.ndim == 1
        if squeeze:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.input_dim:
            raise HeadError(f"input has shape {np.shape(x)}, expected (..., {self.input_dim})")
        if not np.all(np.isfinite(arr)):
            raise HeadError("non-finite values in head input")
        use_dropout = self.mode == "train" and self.dropout_rate > 0.0
        if use_dropout and dropout_rng is None:
            raise HeadError("dropout_rng required in train mode with dropout_rate > 0")

        inputs: list[np.ndarray] = []
        pre_activations: list[np.ndarray] = []
        masks: list[np.ndarray | None] = []
        h = arr
        n_layers = len(self.weights)
        for i in range(n_layers - 1):
            inputs.append(h)
            z = h @ self.weights[i] + self.biases[i]
            pre_activations.append(z)
            h = np.maximum(z, 0.0)
            if use_dropout:
                keep = dropout_rng.random(h.shape) >= self.dropout_rate
                h = h * keep / (1.0 - self.dropout_rate)
                masks.append(keep)
            else:
                masks.append(None)
        inputs.append(h)
        out = h @ self.weights[-1] + self.biases[-1]
        cache = ForwardCache(inputs=inputs, pre_activations=pre_activations, dropout_masks=masks, squeeze=squeeze)
        return (out[0] if squeeze else out), cache

    def backward(self, cache: ForwardCache, grad_output: np.ndarray) -> list[np.ndarray]:
        """Gradients w.r.t. every parameter, in parameters() order.

        ``grad_output`` is dLoss/dOutput for the forward pass that produced
        ``cache`` (already including any batch-mean factor).
        """
        g = np.asarray(grad_output, dtype=self.dtype)
        if cache.squeeze and g.ndim == 1:
            g = g[None, :]
        if g.shape != (cache.inputs[-1].shape[0], self.output_dim):
            raise HeadError(
                f"grad_output has shape {g.shape}, expected ({cache.inputs[-1].shape[0]}, {self.output_dim})"
            )
        grads: list[np.ndarray] = [np.empty(0)] * (2 * len(self.weights))
        n_layers = len(self.weights)
        for i in range(n_layers - 1, -1, -1):
            h_in = cache.inputs[i]
            grads[2 * i] = h_in.T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            if i == 0:
                break
            g = g @ self.weights[i].T
            mask = cache.dropout_masks[i - 1]
            if mask is not None:
                g = g * mask / (1.0 - self.dropout_rate)
            g = g * (cache.pre_activations[i - 1] > 0)
        return grads


def classification_head(input_dim: int = CLASSIFY_LAYERS[0], seed: int = 0, recipe_hash: str | None = None) -> MlpHead:
    """Default binary-classification head: input -> 512 -> 128 -> 2, dropout 0.1."""
    return MlpHead.initialize(
        (input_dim,) + CLASSIFY_LAYERS[1:], CLASSIFY_DROPOUT, seed, task="classify", recipe_hash=recipe_hash
    )


def ranking_head(input_dim: int = RANK_LAYERS[0], seed: int = 0, recipe_hash: str | None = None) -> MlpHead:
    """Default pairwise scoring head: input -> 256 -> 64 -> 1, dropout 0.5."""
    return MlpHead.initialize(
        (input_dim,) + RANK_LAYERS[1:], RANK_DROPOUT, seed, task="rank", recipe_hash=recipe_hash
    )
