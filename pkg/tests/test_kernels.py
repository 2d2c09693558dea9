"""Backend equivalence: numba kernels against the pure-numpy fallbacks."""

import numpy as np
import pytest

from ddsd import kernels


def test_flag_reflects_environment():
    assert isinstance(kernels.NUMBA_ENABLED, bool)


needs_numba = pytest.mark.skipif(not kernels._HAVE_NUMBA, reason="numba unavailable")


@needs_numba
def test_nccf_backends_agree():
    rng = np.random.default_rng(0)
    win, lag_max = 320, 140
    ext = rng.normal(size=(40, win + lag_max))
    a = kernels._nccf_numpy(ext, win, lag_max)
    b = kernels._nccf_numba(ext, win, lag_max)
    np.testing.assert_allclose(a, b, atol=1e-10)


@needs_numba
def test_hmm_backends_agree():
    rng = np.random.default_rng(1)
    p = rng.random(300)
    a = kernels._hmm_posterior_loops(p, 0.9)
    b = kernels._hmm_posterior_numba(p, 0.9)
    np.testing.assert_allclose(a, b, atol=1e-12)


@needs_numba
def test_viterbi_backends_agree():
    rng = np.random.default_rng(2)
    T, K = 60, 5
    log2f = rng.uniform(6, 8.6, size=(T, K))
    score = rng.uniform(0, 1, size=(T, K))
    valid = (rng.random((T, K)) < 0.8).astype(np.uint8)
    a = kernels._viterbi_pitch_loops(log2f, score, valid, 0.42, 0.45, 0.2)
    b = kernels._viterbi_pitch_numba(log2f, score, valid, 0.42, 0.45, 0.2)
    np.testing.assert_array_equal(a, b)


@needs_numba
def test_cycle_peaks_backends_agree():
    rng = np.random.default_rng(3)
    sr = 16000
    t = np.arange(sr) / sr
    x = 0.5 * np.sin(2 * np.pi * 150 * t) + 0.01 * rng.normal(size=sr)
    periods = np.full(98, sr / 150.0)
    pos_a, amp_a = kernels._cycle_peaks_loops(x, 200, len(x) - 200, periods, 160, 0, 98)
    pos_b, amp_b = kernels._cycle_peaks_numba(x, 200, len(x) - 200, periods, 160, 0, 98)
    np.testing.assert_allclose(pos_a, pos_b, atol=1e-9)
    np.testing.assert_allclose(amp_a, amp_b, atol=1e-9)


def test_hmm_posterior_suppresses_single_frame_island():
    p = np.full(100, 0.05)
    p[50] = 0.9
    post = kernels.hmm_posterior(p, 0.9)
    assert post[50] < 0.5


def test_hmm_posterior_tracks_sustained_segments():
    p = np.concatenate([np.full(50, 0.05), np.full(50, 0.95), np.full(50, 0.05)])
    post = kernels.hmm_posterior(p, 0.9)
    assert post[10] < 0.2
    assert post[75] > 0.8
    assert post[140] < 0.2


def test_nccf_finds_tone_period():
    sr = 16000
    t = np.arange(2000) / sr
    x = np.sin(2 * np.pi * 200 * t)
    win, lag_max = 640, 270
    ext = x[: win + lag_max][None, :]
    r = kernels.nccf(ext, win, lag_max)
    lag = np.argmax(r[0, 40:]) + 40
    assert abs(sr / lag - 200.0) / 200.0 < 0.02
