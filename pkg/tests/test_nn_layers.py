import numpy as np
import pytest

from ddsd.errors import DataError, NumericError, ShapeError
from ddsd.nn import (
    Context,
    Dense,
    Dropout,
    GRU,
    LayerNorm,
    Mask,
    ModelGraph,
    gru_cell,
    pad_batch,
    sigmoid,
)


def test_identity_dense_passthrough():
    layer = Dense(4, 4, "linear")
    layer.params["w"][...] = np.eye(4)
    layer.params["b"][...] = 0.0
    graph = ModelGraph([layer])
    x = np.random.default_rng(0).normal(size=(3, 4))
    np.testing.assert_array_equal(graph.forward(x), x)


def test_zero_dense_sigmoid_is_half():
    layer = Dense(7, 1, "sigmoid")
    layer.params["w"][...] = 0.0
    graph = ModelGraph([layer])
    x = np.random.default_rng(1).normal(size=(5, 7))
    np.testing.assert_allclose(graph.forward(x), 0.5)


def test_gru_cell_zero_params_zero_state():
    x = np.random.default_rng(2).normal(size=(1, 3))
    h = np.zeros((1, 4))
    out = gru_cell(x, h, np.zeros((3, 12)), np.zeros((4, 8)), np.zeros((4, 4)), np.zeros(12))
    # z = 0.5 and the candidate is tanh(0) = 0, so the new state stays 0
    np.testing.assert_array_equal(out, np.zeros((1, 4)))


def test_gru_cell_saturated_update_gate_keeps_state():
    rng = np.random.default_rng(3)
    nin, nh = 3, 4
    w_in = rng.normal(size=(nin, 3 * nh)) * 0.1
    u_zr = rng.normal(size=(nh, 2 * nh)) * 0.1
    u_c = rng.normal(size=(nh, nh)) * 0.1
    b = np.zeros(3 * nh)
    b[:nh] = -40.0  # update-gate bias: z ~ 0 so h_t ~ h_prev
    x = rng.normal(size=(1, nin)) * 0.01
    h = rng.uniform(-0.5, 0.5, size=(1, nh))
    out = gru_cell(x, h, w_in, u_zr, u_c, b)
    np.testing.assert_allclose(out, h, atol=1e-6)


def _scalar_gru_oracle(x_seq, w_in, u_zr, u_c, b, nh):
    """Plain scalar-loop GRU evaluating the same cell equations."""

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    h = [0.0] * nh
    for x in x_seq:
        z = [0.0] * nh
        r = [0.0] * nh
        c = [0.0] * nh
        for j in range(nh):
            az = b[j]
            ar = b[nh + j]
            for i in range(len(x)):
                az += x[i] * w_in[i, j]
                ar += x[i] * w_in[i, nh + j]
            for i in range(nh):
                az += h[i] * u_zr[i, j]
                ar += h[i] * u_zr[i, nh + j]
            z[j] = sig(az)
            r[j] = sig(ar)
        for j in range(nh):
            ac = b[2 * nh + j]
            for i in range(len(x)):
                ac += x[i] * w_in[i, 2 * nh + j]
            for i in range(nh):
                ac += r[i] * h[i] * u_c[i, j]
            c[j] = np.tanh(ac)
        h = [(1.0 - z[j]) * h[j] + z[j] * c[j] for j in range(nh)]
    return np.array(h)


def test_gru_matches_scalar_loop_oracle():
    rng = np.random.default_rng(7)
    nin, nh, nt = 3, 4, 6
    gru = GRU(nin, nh, rng=rng)
    x = rng.normal(size=(1, nt, nin))
    out = ModelGraph([gru]).forward(x)
    p = gru.params
    expected = _scalar_gru_oracle(x[0], p["w_in"], p["u_zr"], p["u_c"], p["b"], nh)
    np.testing.assert_allclose(out[0], expected, rtol=0, atol=1e-12)


def test_gru_masking_ignores_padding():
    rng = np.random.default_rng(11)
    gru = GRU(2, 5, rng=rng)
    graph = ModelGraph([Mask(), gru])
    seq = rng.normal(size=(3, 2))
    padded = np.zeros((1, 8, 2))
    padded[0, :3] = seq
    out_padded = graph.forward(padded, lengths=np.array([3]))
    out_exact = graph.forward(seq[None, :, :], lengths=np.array([3]))
    np.testing.assert_allclose(out_padded, out_exact, atol=1e-15)


def test_batch_masking_matches_unpadded_per_sample():
    rng = np.random.default_rng(13)
    gru = GRU(3, 6, rng=rng)
    head = Dense(6, 1, "sigmoid", rng=rng)
    graph = ModelGraph([Mask(), gru, head])
    seqs = [rng.normal(size=(t, 3)) for t in (4, 9, 2, 7)]
    x, lengths = pad_batch(seqs)
    batched = graph.forward(x, lengths=lengths)
    for i, s in enumerate(seqs):
        single = graph.forward(s[None], lengths=np.array([s.shape[0]]))
        np.testing.assert_allclose(batched[i], single[0], atol=1e-10)


def test_lengths_required_iff_mask_layer():
    gru = GRU(2, 3)
    with_mask = ModelGraph([Mask(), gru])
    without = ModelGraph([GRU(2, 3)])
    x = np.zeros((1, 4, 2))
    with pytest.raises(DataError):
        with_mask.forward(x)
    with pytest.raises(DataError):
        without.forward(x, lengths=np.array([4]))


def test_shape_mismatch_names_layer():
    graph = ModelGraph([Dense(4, 2)])
    with pytest.raises(ShapeError, match="layer 0 \\(dense\\)"):
        graph.forward(np.zeros((3, 5)))


def test_nonfinite_input_rejected():
    graph = ModelGraph([Dense(2, 2)])
    x = np.array([[1.0, np.nan]])
    with pytest.raises(NumericError):
        graph.forward(x)


def test_dropout_eval_identity_and_train_rate():
    d = Dropout(0.3)
    x = np.ones((100, 1))
    np.testing.assert_array_equal(d.forward(x, Context(train=False)), x)
    # train mode: kept fraction within 3 sigma of (1 - rate) over 1e5 units
    n = 100_000
    big = np.ones((n, 1))
    rng = np.random.default_rng(5)
    out = d.forward(big, Context(train=True, rng=rng))
    kept = np.count_nonzero(out)
    p = 0.7
    sigma = np.sqrt(n * p * (1 - p))
    assert abs(kept - n * p) < 3 * sigma
    # surviving units are rescaled by 1/(1-rate)
    np.testing.assert_allclose(out[out != 0], 1.0 / p)


def test_layer_norm_forward_statistics():
    ln = LayerNorm(8)
    rng = np.random.default_rng(17)
    x = rng.normal(3.0, 2.5, size=(9, 8))
    y = ln.forward(x, Context())
    np.testing.assert_allclose(y.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(y.std(axis=1), 1.0, atol=1e-4)


def test_sigmoid_extremes_stable():
    x = np.array([-800.0, 0.0, 800.0])
    y = sigmoid(x)
    assert np.all(np.isfinite(y))
    np.testing.assert_allclose(y, [0.0, 0.5, 1.0], atol=1e-12)
