import numpy as np

from ddsd.dsp import AudioBuffer, extract_jitter_shimmer, extract_pitch_voicing
from signals import SR, am_tone, gaussian_pulse_train


def _tracks(x):
    buf = AudioBuffer(x, SR)
    pitch, _ = extract_pitch_voicing(buf)
    jitter, shimmer = extract_jitter_shimmer(buf, pitch)
    return pitch, jitter, shimmer


def test_periodic_pulse_train_near_zero_jitter_shimmer():
    periods = np.full(150, 1.0 / 150.0)
    pitch, jitter, shimmer = _tracks(gaussian_pulse_train(periods))
    voiced = pitch > 0
    assert np.count_nonzero(jitter) > 50  # actively measured, not vacuously zero
    assert np.all(jitter[voiced] < 0.005)
    assert np.all(shimmer[voiced] < 0.005)


def test_alternating_periods_jitter_closed_form():
    # periods alternate 6.6 / 6.7 ms: jitter = |dT| / mean T = 0.1 / 6.65
    periods = np.tile([0.0066, 0.0067], 80)
    expected = 0.0001 / 0.00665
    _, jitter, _ = _tracks(gaussian_pulse_train(periods))
    measured = np.median(jitter[jitter > 0])
    assert abs(measured - expected) / expected < 0.20


def test_am_tone_shimmer_closed_form():
    # peaks alternate 1.1 / 0.9: shimmer = 0.2 / 1.0
    x = am_tone(200.0, depth=0.10)
    # scalar oracle over the extracted per-cycle peaks of the generated signal
    n_per_cycle = SR / 200.0
    peaks = []
    for c in range(int(len(x) / n_per_cycle) - 1):
        lo = int(c * n_per_cycle)
        hi = int((c + 1) * n_per_cycle)
        peaks.append(np.max(x[lo:hi]))
    peaks = np.array(peaks)
    oracle = np.mean(np.abs(np.diff(peaks))) / np.mean(peaks)

    _, _, shimmer = _tracks(x)
    measured = np.median(shimmer[shimmer > 0])
    assert abs(measured - oracle) / oracle < 0.20
    assert abs(oracle - 0.2) < 0.02  # sanity on the oracle itself


def test_unvoiced_frames_are_zero():
    x = np.concatenate([np.zeros(SR // 2), gaussian_pulse_train(np.full(80, 1 / 150.0))])
    pitch, jitter, shimmer = _tracks(x)
    unvoiced = pitch == 0
    assert np.all(jitter[unvoiced] == 0.0)
    assert np.all(shimmer[unvoiced] == 0.0)


def test_ranges_and_gain_invariance():
    periods = np.tile([0.0066, 0.0068], 60)
    x = gaussian_pulse_train(periods)
    pitch1, j1, s1 = _tracks(x)
    pitch2, j2, s2 = _tracks(0.5 * x)
    assert np.all((j1 >= 0) & (j1 <= 1) & (s1 >= 0) & (s1 <= 1))
    m = (pitch1 > 0) & (pitch2 > 0) & (j1 > 0) & (j2 > 0)
    assert m.any()
    assert np.all(np.abs(j1[m] - j2[m]) <= 0.01 * np.maximum(j1[m], 1e-9))
    assert np.all(np.abs(s1[m] - s2[m]) <= 0.01 * np.maximum(s1[m], 1e-9))
