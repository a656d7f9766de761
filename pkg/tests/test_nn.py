import numpy as np
import pytest

from noveltyrank.heads.losses import classification_loss, ranknet_loss
from noveltyrank.heads.nn import HeadError, MlpHead, classification_head, ranking_head


def straight_line_forward(head, x):
    """Duplicate-implementation oracle: unrolled affine/ReLU chain."""
    h = np.asarray(x, dtype=np.float64)
    for i in range(len(head.weights) - 1):
        h = np.maximum(h @ head.weights[i].astype(np.float64) + head.biases[i].astype(np.float64), 0.0)
    return h @ head.weights[-1].astype(np.float64) + head.biases[-1].astype(np.float64)


def all_param_gradients(head, x, loss_of):
    """Analytic parameter gradients for loss_of(output) via head.backward."""
    out, cache = head.forward(x)
    _, grad_out = loss_of(out)
    return head.backward(cache, grad_out)


def numeric_param_gradients(head, x, loss_of, h=1e-6):
    grads = []
    for p in head.parameters():
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gf = g.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            lp, _ = loss_of(head.forward(x)[0])
            flat[j] = orig - h
            lm, _ = loss_of(head.forward(x)[0])
            flat[j] = orig
            gf[j] = (lp - lm) / (2 * h)
        grads.append(g)
    return grads


def rel_err(a, b):
    # floor keeps finite-difference noise (~1e-10 at h=1e-6) from inflating
    # the relative error of near-zero gradients
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-4)
    return float(np.max(np.abs(a - b) / denom))


def test_zero_parameters_give_zero_output():
    head = MlpHead.initialize((3, 4, 2), 0.0, seed=0)
    for p in head.parameters():
        p[...] = 0.0
    head.mode = "infer"
    out, _ = head.forward(np.array([1.0, -2.0, 3.0]))
    np.testing.assert_array_equal(out, [0.0, 0.0])


def test_identity_single_layer():
    head = MlpHead.initialize((2, 2), 0.0, seed=0)
    head.weights[0][...] = np.eye(2)
    head.biases[0][...] = 0.0
    head.mode = "infer"
    out, _ = head.forward(np.array([3.0, -1.0]))
    np.testing.assert_allclose(out, [3.0, -1.0], atol=1e-7)


def test_forward_matches_straight_line_oracle():
    rng = np.random.default_rng(3)
    head = MlpHead.initialize((5, 4, 3, 2), 0.0, seed=4, dtype=np.float64)
    head.mode = "infer"
    for _ in range(25):
        x = rng.normal(size=5)
        out, _ = head.forward(x)
        np.testing.assert_allclose(out, straight_line_forward(head, x), atol=1e-12)


def test_forward_batch_equals_per_row():
    head = MlpHead.initialize((6, 5, 2), 0.0, seed=5)
    head.mode = "infer"
    x = np.random.default_rng(6).normal(size=(7, 6)).astype(np.float32)
    batch, _ = head.forward(x)
    for i in range(7):
        row, _ = head.forward(x[i])
        np.testing.assert_allclose(batch[i], row, atol=1e-6)


def test_dimension_mismatch_raises():
    head = MlpHead.initialize((4, 3, 2), 0.0, seed=0)
    with pytest.raises(HeadError, match="shape"):
        head.forward(np.ones(5))


def test_non_finite_input_raises():
    head = MlpHead.initialize((3, 2), 0.0, seed=0)
    with pytest.raises(HeadError, match="finite"):
        head.forward(np.array([1.0, np.nan, 0.0]))


def test_dropout_rng_required_in_train_mode():
    head = MlpHead.initialize((3, 4, 2), 0.5, seed=0)
    assert head.mode == "train"
    with pytest.raises(HeadError, match="dropout_rng"):
        head.forward(np.ones(3))


def test_infer_mode_applies_no_dropout():
    head = MlpHead.initialize((3, 64, 2), 0.5, seed=1)
    head.mode = "infer"
    a, _ = head.forward(np.ones(3))
    b, _ = head.forward(np.ones(3))
    np.testing.assert_array_equal(a, b)


def test_inverted_dropout_scaling_preserves_expectation():
    # with inputs and weights >= 0, pre-dropout activations are >= 0 and the
    # train-time mean over many draws approaches the infer-time activation
    head = MlpHead.initialize((4, 256, 1), 0.5, seed=2, dtype=np.float64)
    for p in head.parameters():
        p[...] = np.abs(p)
    x = np.abs(np.random.default_rng(3).normal(size=4))
    head.mode = "infer"
    reference, _ = head.forward(x)
    head.mode = "train"
    rng = np.random.default_rng(4)
    samples = np.array([head.forward(x, dropout_rng=rng)[0][0] for _ in range(3000)])
    assert abs(samples.mean() - reference[0]) < 0.05 * abs(reference[0])


def test_default_architectures():
    c = classification_head(2306, seed=0)
    assert c.layer_sizes == (2306, 512, 128, 2)
    assert c.dropout_rate == 0.1
    r = ranking_head(2306, seed=0)
    assert r.layer_sizes == (2306, 256, 64, 1)
    assert r.dropout_rate == 0.5


def test_init_is_seeded_and_bounded():
    a = MlpHead.initialize((10, 8, 2), 0.1, seed=42)
    b = MlpHead.initialize((10, 8, 2), 0.1, seed=42)
    c = MlpHead.initialize((10, 8, 2), 0.1, seed=43)
    assert all((x == y).all() for x, y in zip(a.parameters(), b.parameters()))
    assert any((x != y).any() for x, y in zip(a.parameters(), c.parameters()))
    bound = np.sqrt(6.0 / (10 + 8))
    assert np.abs(a.weights[0]).max() <= bound
    assert not a.biases[0].any()


def _well_conditioned_head_and_input(rng, sizes, margin=1e-3):
    """Redraw until no pre-activation sits near the ReLU kink (finite
    differences are invalid there)."""
    while True:
        head = MlpHead.initialize(sizes, 0.0, seed=int(rng.integers(2**31)), dtype=np.float64)
        head.mode = "infer"
        x = rng.normal(size=(sizes[0],))
        _, cache = head.forward(x)
        if all(np.abs(z).min() > margin for z in cache.pre_activations):
            return head, x


@pytest.mark.parametrize("loss_kind", ["classify", "rank"])
def test_parameter_gradients_match_finite_differences(loss_kind):
    rng = np.random.default_rng(1234)
    checks = 0
    for _ in range(30):
        if loss_kind == "classify":
            head, x = _well_conditioned_head_and_input(rng, (8, 6, 4, 2))
            label = int(rng.integers(2))

            def loss_of(out):
                return classification_loss(out, label)

            analytic = all_param_gradients(head, x, loss_of)
            numeric = numeric_param_gradients(head, x, loss_of)
        else:
            head, x = _well_conditioned_head_and_input(rng, (8, 6, 4, 1))
            while True:  # the second Siamese input must avoid kinks too
                head2_input = rng.normal(size=8)
                _, cache2 = head.forward(head2_input)
                if all(np.abs(z).min() > 1e-3 for z in cache2.pre_activations):
                    break
            gold = "A" if rng.random() < 0.5 else "B"

            def rank_loss_and_grads():
                out_a, cache_a = head.forward(x)
                out_b, cache_b = head.forward(head2_input)
                loss, gsa, gsb = ranknet_loss(out_a[0], out_b[0], gold)
                grads_a = head.backward(cache_a, np.array([gsa]))
                grads_b = head.backward(cache_b, np.array([gsb]))
                return loss, [ga + gb for ga, gb in zip(grads_a, grads_b)]

            _, analytic = rank_loss_and_grads()
            numeric = []
            h = 1e-6
            for p in head.parameters():
                g = np.zeros_like(p)
                flat, gf = p.reshape(-1), g.reshape(-1)
                for j in range(flat.size):
                    orig = flat[j]
                    flat[j] = orig + h
                    lp = ranknet_loss(head.forward(x)[0][0], head.forward(head2_input)[0][0], gold)[0]
                    flat[j] = orig - h
                    lm = ranknet_loss(head.forward(x)[0][0], head.forward(head2_input)[0][0], gold)[0]
                    flat[j] = orig
                    gf[j] = (lp - lm) / (2 * h)
                numeric.append(g)
        for a, nmr in zip(analytic, numeric):
            assert rel_err(a, nmr) < 1e-4
            checks += 1
    assert checks >= 100
