"""Pitch and voicing from normalized cross-correlation with Viterbi smoothing."""

import numpy as np

from .. import kernels
from .audio import PITCH_WINDOW_S, centered_frames, frame_centers

F0_MIN = 60.0
F0_MAX = 400.0

MAX_CANDIDATES = 6
CANDIDATE_FLOOR = 0.25   # NCC below this never becomes a pitch candidate
OCTAVE_COST = 0.03       # per octave below F0_MAX; favors the true period over subharmonics
TRANSITION_WEIGHT = 0.45  # Viterbi penalty per octave of frame-to-frame pitch jump
UV_SWITCH_COST = 0.20    # voiced <-> unvoiced transition penalty
UNVOICED_MERIT = 0.42    # stand-in NCC merit of the unvoiced state


def _refine_peak(r, lag):
    """Parabolic interpolation of an NCC peak; returns (lag, value)."""
    denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1]
    if denom >= 0.0:
        return float(lag), r[lag]
    delta = 0.5 * (r[lag - 1] - r[lag + 1]) / denom
    delta = np.clip(delta, -0.5, 0.5)
    return lag + delta, r[lag] - 0.25 * (r[lag - 1] - r[lag + 1]) * delta


def extract_pitch_voicing(buf):
    """Per-frame (pitch_hz, voicing) on the shared grid; pitch 0 when unvoiced.

    NCC candidates per frame are refined by parabolic interpolation and
    smoothed by a Viterbi pass that penalizes log-pitch jumps; voicing is the
    peak NCC clipped to [0, 1].
    """
    sr = buf.sample_rate
    x = buf.samples
    centers = frame_centers(x.shape[0], sr)
    n_frames = centers.shape[0]

    win = int(round(PITCH_WINDOW_S * sr))
    lag_min = int(np.floor(sr / F0_MAX))
    lag_max = int(np.ceil(sr / F0_MIN))
    lag_hi = lag_max + 1  # one extra lag so boundary peaks can be interpolated

    ext = centered_frames(x, centers, win + lag_hi)
    r = kernels.nccf(ext, win, lag_hi)

    search = r[:, lag_min : lag_max + 1]
    voicing = np.clip(search.max(axis=1), 0.0, 1.0)

    # local maxima of the NCC in the searchable lag range
    inner = r[:, lag_min - 1 : lag_max + 2]
    is_peak = (inner[:, 1:-1] > inner[:, :-2]) & (inner[:, 1:-1] >= inner[:, 2:])
    is_peak &= inner[:, 1:-1] > CANDIDATE_FLOOR

    log2f = np.zeros((n_frames, MAX_CANDIDATES))
    merit = np.full((n_frames, MAX_CANDIDATES), -np.inf)
    valid = np.zeros((n_frames, MAX_CANDIDATES), dtype=np.uint8)
    for t in range(n_frames):
        lags = np.nonzero(is_peak[t])[0] + lag_min
        if lags.size == 0:
            continue
        vals = r[t, lags]
        if lags.size > MAX_CANDIDATES:
            keep = np.argsort(vals)[::-1][:MAX_CANDIDATES]
            lags = lags[keep]
        for k, lag in enumerate(lags):
            lag_ref, val = _refine_peak(r[t], int(lag))
            freq = float(np.clip(sr / lag_ref, F0_MIN, F0_MAX))
            log2f[t, k] = np.log2(freq)
            merit[t, k] = val - OCTAVE_COST * np.log2(F0_MAX / freq)
            valid[t, k] = 1

    merit[merit == -np.inf] = -1e30
    path = kernels.viterbi_pitch(
        log2f, merit, valid, UNVOICED_MERIT, TRANSITION_WEIGHT, UV_SWITCH_COST
    )

    pitch = np.zeros(n_frames)
    for t in range(n_frames):
        k = path[t]
        if k < MAX_CANDIDATES and valid[t, k]:
            pitch[t] = 2.0 ** log2f[t, k]
    return pitch, voicing
