"""Independent brute-force oracles used to pin expected values in tests.

These deliberately use plain Python loops and explicit enumeration so they
share no code path with the library implementations they check.
"""

import math


def brute_force_det(scores, labels):
    """Threshold sweep by explicit counting: (thresholds, fr, fa) lists."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    uniq = sorted(set(scores))
    thresholds, fr, fa = [], [], []
    for t in uniq:
        n_fa = sum(1 for s in neg if s >= t)
        n_fr = sum(1 for s in pos if s < t)
        thresholds.append(t)
        fa.append(n_fa / len(neg))
        fr.append(n_fr / len(pos))
    thresholds.append(math.nextafter(uniq[-1], math.inf))
    fa.append(0.0)
    fr.append(1.0)
    return thresholds, fr, fa


def brute_force_eer(scores, labels):
    _, fr, fa = brute_force_det(scores, labels)
    diffs = [a - r for a, r in zip(fa, fr)]
    for i, d in enumerate(diffs):
        if d <= 0.0:
            if d == 0.0:
                return 100.0 * fa[i]
            lam = diffs[i - 1] / (diffs[i - 1] - diffs[i])
            return 100.0 * (fa[i - 1] + lam * (fa[i] - fa[i - 1]))
    raise AssertionError("no crossing found")


def brute_force_fa_at_fr(scores, labels, fr_target=0.10):
    thresholds, fr, fa = brute_force_det(scores, labels)
    if fr_target >= 1.0:
        return 100.0 * fa[-1], thresholds[-1]
    i = max(j for j in range(len(fr)) if fr[j] <= fr_target)
    if i >= len(fr) - 1:
        return 100.0 * fa[-1], thresholds[-1]
    lam = (fr_target - fr[i]) / (fr[i + 1] - fr[i])
    fa_val = fa[i] + lam * (fa[i + 1] - fa[i])
    thr = thresholds[i] + lam * (thresholds[i + 1] - thresholds[i])
    return 100.0 * fa_val, thr


def central_difference(f, x, step=1e-5):
    return (f(x + step) - f(x - step)) / (2 * step)
