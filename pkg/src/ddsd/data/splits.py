"""Five-way split assignment with speaker disjointness."""

import numpy as np

from ..errors import DataError
from .manifest import SPLITS

# train:val:test roughly 60:20:20, train/val further divided into
# component and fusion subsets (same proportions as the reference counts)
DEFAULT_RATIOS = {
    "train-comp": 0.36,
    "train-fus": 0.22,
    "val-comp": 0.15,
    "val-fus": 0.09,
    "test": 0.18,
}


def split_manifest(utts, ratios=None, seed=0):
    """Assign splits; speaker-disjoint when speaker ids are present.

    Returns a new list of utterances with the split field set. Speakers (or
    utterances, if no speaker ids) are shuffled and assigned greedily to the
    split with the largest remaining deficit.
    """
    ratios = dict(ratios or DEFAULT_RATIOS)
    unknown = set(ratios) - set(SPLITS)
    if unknown:
        raise DataError(f"unknown split names in ratios: {sorted(unknown)}")
    total = sum(ratios.values())
    if total <= 0:
        raise DataError("split ratios must sum to a positive value")
    ratios = {k: v / total for k, v in ratios.items()}

    rng = np.random.default_rng(seed)
    have_speakers = all(u.speaker_id for u in utts)
    if have_speakers:
        groups = {}
        for u in utts:
            groups.setdefault(u.speaker_id, []).append(u)
        if len(groups) < len(ratios):
            raise DataError(
                f"need at least {len(ratios)} speakers for disjoint splits, have {len(groups)}"
            )
        units = [groups[k] for k in sorted(groups)]
    else:
        units = [[u] for u in utts]

    order = rng.permutation(len(units))
    n_total = len(utts)
    assigned = {k: 0 for k in ratios}
    out = []
    for idx in order:
        unit = units[idx]
        # largest remaining deficit relative to target
        split = max(ratios, key=lambda k: ratios[k] * n_total - assigned[k])
        for u in unit:
            u.split = split
            out.append(u)
        assigned[split] += len(unit)
    return out
