"""Hot numeric kernels with numba-accelerated and pure-numpy implementations.

The backend is picked once at import time from the ``DDSD_NUMBA`` environment
variable: ``1``/``on`` forces numba (import error if unavailable), ``0``/``off``
forces the numpy fallback, anything else auto-detects. Both paths compute the
same quantities; tiny float differences (different summation orders) are
expected between backends, while each backend is bit-deterministic on its own.

Kernels here are the loops that dominate corpus-scale feature extraction:
normalized cross-correlation for pitch, per-cycle peak tracking for
jitter/shimmer, two-state HMM smoothing for VAD, and the pitch Viterbi.
Recurrent-network training is intentionally not here: it is bound by BLAS
matmuls that numba cannot speed up.
"""

import os

import numpy as np

_FLAG = os.environ.get("DDSD_NUMBA", "auto").strip().lower()
if _FLAG in ("0", "off", "false", "no"):
    _WANT = False
elif _FLAG in ("1", "on", "true", "yes"):
    _WANT = True
else:
    _WANT = None  # auto

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False
    if _WANT:
        raise ImportError("DDSD_NUMBA=1 requested but numba is not importable")

NUMBA_ENABLED = _HAVE_NUMBA if _WANT is None else (_WANT and _HAVE_NUMBA)

_EPS = 1e-30


# ---------------------------------------------------------------------------
# Normalized cross-correlation over a lag range
# ---------------------------------------------------------------------------

def _nccf_numpy(ext, win, lag_max):
    """Cross-correlate each row's first `win` samples against its lagged self.

    ext: (T, win + lag_max) float64. Returns (T, lag_max + 1) with
    r[t, lag] = sum(x[:win] * x[lag:lag+win]) / sqrt(e0 * e_lag + eps).
    """
    n_rows, row_len = ext.shape
    nfft = 1
    while nfft < row_len + win:
        nfft *= 2
    head = np.zeros((n_rows, nfft))
    head[:, :win] = ext[:, :win]
    spec = np.fft.rfft(head).conj() * np.fft.rfft(ext, n=nfft)
    corr = np.fft.irfft(spec, n=nfft)[:, : lag_max + 1]

    sq = np.zeros((n_rows, row_len + 1))
    np.cumsum(ext * ext, axis=1, out=sq[:, 1:])
    e_lag = sq[:, win : win + lag_max + 1] - sq[:, : lag_max + 1]
    e0 = e_lag[:, :1]
    return corr / np.sqrt(e0 * e_lag + _EPS)


def _nccf_loops(ext, win, lag_max):
    n_rows = ext.shape[0]
    out = np.empty((n_rows, lag_max + 1))
    for t in range(n_rows):
        row = ext[t]
        head = row[:win]
        e0 = np.dot(head, head)
        e_lag = e0
        for lag in range(lag_max + 1):
            if lag > 0:
                a = row[lag - 1]
                b = row[lag - 1 + win]
                e_lag += b * b - a * a
            num = np.dot(head, row[lag : lag + win])
            out[t, lag] = num / np.sqrt(e0 * e_lag + _EPS)
    return out


# ---------------------------------------------------------------------------
# Per-cycle peak tracking for jitter/shimmer
# ---------------------------------------------------------------------------

def _cycle_peaks_loops(x, start, stop, period_frames, hop, frame_lo, frame_hi):
    """March through one voiced region picking one waveform peak per cycle.

    period_frames holds the pitch period in samples at the 10 ms frame rate
    (0 on unvoiced frames); frame indices derived from sample positions are
    clamped into [frame_lo, frame_hi). Peaks below 8% of the region maximum
    are treated as silence padding: skipped while locking on, terminal once
    tracking. Returns parabolic-refined peak positions and amplitudes.
    """
    max_peaks = int((stop - start) / 8.0) + 4
    pos = np.empty(max_peaks)
    amp = np.empty(max_peaks)
    count = 0
    if stop - start < 3 or frame_hi <= frame_lo:
        return pos[:0].copy(), amp[:0].copy()

    floor = 0.08 * np.max(np.abs(x[start:stop]))

    def _period_at(p):
        fi = p // hop
        if fi < frame_lo:
            fi = frame_lo
        elif fi >= frame_hi:
            fi = frame_hi - 1
        return period_frames[fi]

    # lock on: scan forward until a window's maximum clears the floor
    p = start
    locked = False
    while p < stop - 2:
        t0 = _period_at(p)
        if t0 <= 0:
            t0 = hop
        hi = p + int(1.25 * t0) + 1
        if hi > stop:
            hi = stop
        if hi - p < 3:
            break
        cand = p + int(np.argmax(x[p:hi]))
        if x[cand] >= floor:
            p = cand
            locked = True
            break
        p = hi - 1
    if not locked:
        return pos[:0].copy(), amp[:0].copy()

    while count < max_peaks:
        # parabolic refinement around integer peak p
        dp = 0.0
        ap = x[p]
        if 0 < p < x.shape[0] - 1:
            denom = x[p - 1] - 2.0 * x[p] + x[p + 1]
            if denom < 0.0:
                dp = 0.5 * (x[p - 1] - x[p + 1]) / denom
                if dp > 0.5:
                    dp = 0.5
                elif dp < -0.5:
                    dp = -0.5
                ap = x[p] - 0.25 * (x[p - 1] - x[p + 1]) * dp
        pos[count] = p + dp
        amp[count] = ap
        count += 1

        t0 = _period_at(p)
        if t0 <= 0:
            break
        lo = p + int(0.72 * t0)
        hi = p + int(1.35 * t0) + 1
        if hi > stop:
            hi = stop
        if hi - lo < 2 or lo <= p:
            break
        nxt = lo + int(np.argmax(x[lo:hi]))
        if x[nxt] < floor:
            break
        p = nxt

    return pos[:count].copy(), amp[:count].copy()


# ---------------------------------------------------------------------------
# Two-state HMM forward-backward smoothing
# ---------------------------------------------------------------------------

def _hmm_posterior_loops(p_emit, self_prob):
    """Speech-state posterior of a 2-state HMM given per-frame speech probs."""
    n = p_emit.shape[0]
    stay = self_prob
    switch = 1.0 - self_prob
    alpha = np.empty((n, 2))
    scale = np.empty(n)

    a0 = 0.5 * (1.0 - p_emit[0])
    a1 = 0.5 * p_emit[0]
    s = a0 + a1 + _EPS
    alpha[0, 0] = a0 / s
    alpha[0, 1] = a1 / s
    scale[0] = s
    for t in range(1, n):
        a0 = (alpha[t - 1, 0] * stay + alpha[t - 1, 1] * switch) * (1.0 - p_emit[t])
        a1 = (alpha[t - 1, 0] * switch + alpha[t - 1, 1] * stay) * p_emit[t]
        s = a0 + a1 + _EPS
        alpha[t, 0] = a0 / s
        alpha[t, 1] = a1 / s
        scale[t] = s

    post = np.empty(n)
    b0 = 1.0
    b1 = 1.0
    g0 = alpha[n - 1, 0] * b0
    g1 = alpha[n - 1, 1] * b1
    post[n - 1] = g1 / (g0 + g1 + _EPS)
    for t in range(n - 2, -1, -1):
        e0 = (1.0 - p_emit[t + 1]) * b0
        e1 = p_emit[t + 1] * b1
        nb0 = (stay * e0 + switch * e1) / scale[t + 1]
        nb1 = (switch * e0 + stay * e1) / scale[t + 1]
        b0, b1 = nb0, nb1
        g0 = alpha[t, 0] * b0
        g1 = alpha[t, 1] * b1
        post[t] = g1 / (g0 + g1 + _EPS)
    return post


# ---------------------------------------------------------------------------
# Viterbi over pitch candidates
# ---------------------------------------------------------------------------

def _viterbi_pitch_loops(log2f, score, valid, unvoiced_score, trans_w, uv_cost):
    """Best state sequence over per-frame pitch candidates plus an unvoiced state.

    log2f, score: (T, K) candidate log2-frequencies and merit scores.
    valid: (T, K) uint8 mask. State K is the unvoiced state. Returns int64
    path of chosen state per frame.
    """
    n_frames, n_cand = score.shape
    n_states = n_cand + 1
    big_neg = -1e30

    total = np.full((n_frames, n_states), big_neg)
    back = np.zeros((n_frames, n_states), dtype=np.int64)

    for k in range(n_cand):
        if valid[0, k] != 0:
            total[0, k] = score[0, k]
    total[0, n_cand] = unvoiced_score

    for t in range(1, n_frames):
        for k in range(n_states):
            if k < n_cand and valid[t, k] == 0:
                continue
            emit = score[t, k] if k < n_cand else unvoiced_score
            best = big_neg
            best_j = n_cand
            for j in range(n_states):
                prev = total[t - 1, j]
                if prev <= big_neg:
                    continue
                if j < n_cand and k < n_cand:
                    cost = trans_w * abs(log2f[t - 1, j] - log2f[t, k])
                elif j == n_cand and k == n_cand:
                    cost = 0.0
                else:
                    cost = uv_cost
                val = prev + emit - cost
                if val > best:
                    best = val
                    best_j = j
            total[t, k] = best
            back[t, k] = best_j

    path = np.empty(n_frames, dtype=np.int64)
    path[n_frames - 1] = int(np.argmax(total[n_frames - 1]))
    for t in range(n_frames - 2, -1, -1):
        path[t] = back[t + 1, path[t + 1]]
    return path


if _HAVE_NUMBA:
    _nccf_numba = njit(cache=True)(_nccf_loops)
    _cycle_peaks_numba = njit(cache=True)(_cycle_peaks_loops)
    _hmm_posterior_numba = njit(cache=True)(_hmm_posterior_loops)
    _viterbi_pitch_numba = njit(cache=True)(_viterbi_pitch_loops)


def nccf(ext, win, lag_max):
    ext = np.ascontiguousarray(ext, dtype=np.float64)
    if NUMBA_ENABLED:
        return _nccf_numba(ext, win, lag_max)
    return _nccf_numpy(ext, win, lag_max)


def cycle_peaks(x, start, stop, period_frames, hop, frame_lo, frame_hi):
    x = np.ascontiguousarray(x, dtype=np.float64)
    period_frames = np.ascontiguousarray(period_frames, dtype=np.float64)
    if NUMBA_ENABLED:
        return _cycle_peaks_numba(x, start, stop, period_frames, hop, frame_lo, frame_hi)
    return _cycle_peaks_loops(x, start, stop, period_frames, hop, frame_lo, frame_hi)


def hmm_posterior(p_emit, self_prob=0.9):
    p_emit = np.ascontiguousarray(p_emit, dtype=np.float64)
    if NUMBA_ENABLED:
        return _hmm_posterior_numba(p_emit, self_prob)
    return _hmm_posterior_loops(p_emit, self_prob)


def viterbi_pitch(log2f, score, valid, unvoiced_score, trans_w, uv_cost):
    log2f = np.ascontiguousarray(log2f, dtype=np.float64)
    score = np.ascontiguousarray(score, dtype=np.float64)
    valid = np.ascontiguousarray(valid, dtype=np.uint8)
    if NUMBA_ENABLED:
        return _viterbi_pitch_numba(log2f, score, valid, unvoiced_score, trans_w, uv_cost)
    return _viterbi_pitch_loops(log2f, score, valid, unvoiced_score, trans_w, uv_cost)
