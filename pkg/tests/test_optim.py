import numpy as np
import pytest

from noveltyrank.heads.optim import (
    OptimizerState,
    TrainConfig,
    adamw_step,
    classify_config,
    lr_at,
    rank_config,
)


class ReferenceAdam:
    """Independent textbook Adam (no weight decay) for cross-checking."""

    def __init__(self, shape, lr, b1=0.9, b2=0.999, eps=1e-8):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps

    def step(self, theta, grad):
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * grad
        self.v = self.b2 * self.v + (1 - self.b2) * grad * grad
        m_hat = self.m / (1 - self.b1**self.t)
        v_hat = self.v / (1 - self.b2**self.t)
        return theta - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def test_single_step_hand_oracle():
    # m_hat=0.5, v_hat=0.25 -> unit-ish step 1e-3, decay 1e-5
    params = [np.array([1.0])]
    state = OptimizerState.for_params(params)
    cfg = TrainConfig(learning_rate=1e-3, weight_decay=0.01)
    adamw_step(params, [np.array([0.5])], state, cfg)
    assert params[0][0] == pytest.approx(0.99899, abs=1e-6)
    assert state.step == 1


def test_zero_gradient_zero_decay_is_noop():
    params = [np.ones((3, 2)), np.zeros(2)]
    before = [p.copy() for p in params]
    state = OptimizerState.for_params(params)
    cfg = TrainConfig(learning_rate=1e-2, weight_decay=0.0)
    adamw_step(params, [np.zeros_like(p) for p in params], state, cfg)
    for p, b in zip(params, before):
        np.testing.assert_array_equal(p, b)


def test_no_decay_matches_reference_adam_100_steps():
    rng = np.random.default_rng(9)
    theta_ours = [rng.normal(size=(4, 3))]
    theta_ref = theta_ours[0].copy()
    state = OptimizerState.for_params(theta_ours)
    cfg = TrainConfig(learning_rate=3e-3, weight_decay=0.0)
    ref = ReferenceAdam(theta_ref.shape, lr=3e-3)
    for _ in range(100):
        grad = rng.normal(size=(4, 3))
        adamw_step(theta_ours, [grad], state, cfg)
        theta_ref = ref.step(theta_ref, grad)
    np.testing.assert_allclose(theta_ours[0], theta_ref, atol=1e-12)


def test_decay_is_decoupled():
    # with zero gradient, only the decay term moves the parameter
    params = [np.array([2.0])]
    state = OptimizerState.for_params(params)
    cfg = TrainConfig(learning_rate=1e-2, weight_decay=0.1)
    adamw_step(params, [np.array([0.0])], state, cfg)
    assert params[0][0] == pytest.approx(2.0 - 1e-2 * 0.1 * 2.0, abs=1e-12)


def test_lr_multiplier_scales_both_terms():
    params = [np.array([1.0])]
    state = OptimizerState.for_params(params)
    cfg = TrainConfig(learning_rate=1e-3, weight_decay=0.01)
    adamw_step(params, [np.array([0.5])], state, cfg, lr_multiplier=0.5)
    moved = 1.0 - params[0][0]
    assert moved == pytest.approx(0.5 * (1e-3 * (0.5 / (0.5 + 1e-8)) + 1e-5), rel=1e-9)


def test_shape_mismatch_raises():
    params = [np.ones(3)]
    state = OptimizerState.for_params(params)
    with pytest.raises(ValueError, match="shape"):
        adamw_step(params, [np.ones(4)], state, TrainConfig())


def test_warmup_schedule_values():
    cfg = TrainConfig(warmup_ratio=0.1)
    assert lr_at(cfg, 5, 100) == pytest.approx(0.5)
    assert lr_at(cfg, 10, 100) == pytest.approx(1.0)
    assert lr_at(cfg, 55, 100) == pytest.approx(0.5)  # (100-55)/90
    assert lr_at(cfg, 100, 100) == 0.0
    assert lr_at(cfg, 0, 100) == 0.0


def test_schedule_no_warmup():
    cfg = TrainConfig(warmup_ratio=0.0)
    assert lr_at(cfg, 0, 10) == 1.0
    assert lr_at(cfg, 5, 10) == 0.5
    assert lr_at(cfg, 10, 10) == 0.0


def test_schedule_piecewise_linear_and_bounded():
    cfg = TrainConfig(warmup_ratio=0.25)
    values = [lr_at(cfg, s, 40) for s in range(41)]
    assert max(values) == 1.0
    assert all(0.0 <= v <= 1.0 for v in values)
    peak = values.index(1.0)
    assert values[:peak] == sorted(values[:peak])
    assert values[peak:] == sorted(values[peak:], reverse=True)


def test_schedule_rejects_bad_inputs():
    cfg = TrainConfig()
    with pytest.raises(ValueError, match="total_steps"):
        lr_at(cfg, 0, 0)
    with pytest.raises(ValueError, match="outside"):
        lr_at(cfg, 11, 10)


def test_task_default_configs():
    c = classify_config()
    assert (c.learning_rate, c.batch_size, c.epochs) == (2e-5, 32, 5)
    assert (c.weight_decay, c.warmup_ratio, c.grad_accumulation) == (0.01, 0.1, 1)
    r = rank_config()
    assert (r.learning_rate, r.batch_size, r.epochs) == (1e-5, 64, 5)
    assert (r.weight_decay, r.warmup_ratio, r.grad_accumulation) == (0.1, 0.1, 2)
    assert r.adam_beta1 == 0.9 and r.adam_beta2 == 0.999 and r.adam_epsilon == 1e-8


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(warmup_ratio=1.0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_override_ignores_none():
    cfg = classify_config(epochs=None, learning_rate=1e-3)
    assert cfg.epochs == 5
    assert cfg.learning_rate == 1e-3
