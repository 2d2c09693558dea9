"""Jitter and shimmer from per-cycle peak tracking.

jitter  = mean |T_i - T_{i-1}| / mean T_i   over periods in a centered window
shimmer = mean |A_i - A_{i-1}| / mean A_i   over per-cycle peak amplitudes

Both are clipped to [0, 1] and are 0 on unvoiced frames or where fewer than
three cycle peaks fall inside the 40 ms window.
"""

import numpy as np

from .. import kernels
from .audio import PITCH_WINDOW_S, frame_centers, grid_params

MIN_PULSES = 3


def _voiced_regions(voiced):
    """(start_frame, stop_frame) pairs of consecutive voiced frames."""
    regions = []
    start = None
    for i, v in enumerate(voiced):
        if v and start is None:
            start = i
        elif not v and start is not None:
            regions.append((start, i))
            start = None
    if start is not None:
        regions.append((start, len(voiced)))
    return regions


def _relative_variation(values):
    """mean |v_i - v_{i-1}| / mean v_i, clipped to [0, 1]."""
    diffs = np.abs(np.diff(values))
    denom = np.mean(values)
    if denom <= 0:
        return 0.0
    return float(np.clip(np.mean(diffs) / denom, 0.0, 1.0))


def extract_jitter_shimmer(buf, pitch_hz):
    """Per-frame (jitter, shimmer) aligned to the pitch track's grid."""
    sr = buf.sample_rate
    x = buf.samples
    centers = frame_centers(x.shape[0], sr)
    n_frames = centers.shape[0]
    if pitch_hz.shape[0] != n_frames:
        from ..errors import DataError

        raise DataError("pitch track is not aligned to the frame grid")

    _, hop = grid_params(sr)
    half = int(round(PITCH_WINDOW_S * sr)) // 2
    voiced = pitch_hz > 0
    periods = np.where(voiced, sr / np.where(voiced, pitch_hz, 1.0), 0.0)

    jitter = np.zeros(n_frames)
    shimmer = np.zeros(n_frames)
    for f0, f1 in _voiced_regions(voiced):
        start = max(int(centers[f0]) - half, 0)
        stop = min(int(centers[f1 - 1]) + half, x.shape[0])
        pos, amp = kernels.cycle_peaks(x, start, stop, periods, hop, f0, f1)
        if pos.shape[0] < MIN_PULSES:
            continue
        cycle_t = np.diff(pos)
        cycle_mid = 0.5 * (pos[:-1] + pos[1:])
        for f in range(f0, f1):
            lo = centers[f] - half
            hi = centers[f] + half
            sel = (cycle_mid >= lo) & (cycle_mid < hi)
            if sel.sum() >= MIN_PULSES - 1:
                jitter[f] = _relative_variation(cycle_t[sel])
            in_win = (pos >= lo) & (pos < hi)
            if in_win.sum() >= MIN_PULSES:
                shimmer[f] = _relative_variation(np.abs(amp[in_win]))
    return jitter, shimmer
