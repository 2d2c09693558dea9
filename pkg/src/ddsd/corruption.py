"""Missing-modality corruption protocol for robustness evaluation.

For every utterance and modality independently, with the given probability,
the modality is marked absent; its serialized form becomes the sentinel
encoding (score -1, embedding filled with -99999).
"""

import os

import numpy as np

from .data.records import Record, write_records
from .errors import DataError
from .fusion import (
    EMBEDDING_SENTINEL,
    SCORE_SENTINEL,
    EmbeddingSet,
    FusionSample,
    ScoreSet,
)
from .modalities import EMBEDDING_DIMS, MODALITIES


def corrupt_missing(samples, rate=0.30, seed=0):
    """(corrupted samples, realized per-modality drop rates).

    Deterministic per seed: one Bernoulli draw per (utterance, modality) in
    canonical order.
    """
    if not 0.0 <= rate < 1.0:
        raise DataError("corruption rate must be in [0, 1)")
    rng = np.random.default_rng(seed)
    draws = rng.random((len(samples), len(MODALITIES))) < rate

    dropped = {m: 0 for m in MODALITIES}
    eligible = {m: 0 for m in MODALITIES}
    out = []
    for i, sample in enumerate(samples):
        scores = dict(sample.scores.scores)
        embeddings = dict(sample.embeddings.embeddings)
        for j, m in enumerate(MODALITIES):
            known = m in scores or m in embeddings
            if not known:
                continue
            eligible[m] += 1
            if draws[i, j]:
                dropped[m] += 1
                if m in scores:
                    scores[m] = None
                if m in embeddings:
                    embeddings[m] = None
        out.append(
            FusionSample(
                utterance_id=sample.utterance_id,
                label=sample.label,
                scores=ScoreSet(scores),
                embeddings=EmbeddingSet(embeddings),
            )
        )
    realized = {m: (dropped[m] / eligible[m] if eligible[m] else 0.0) for m in MODALITIES}
    return out, realized


def write_directedness_records(samples, utts_by_id, base_dir, out_dir):
    """Serialize samples back to record files; sentinels written verbatim."""
    os.makedirs(os.path.join(base_dir, out_dir), exist_ok=True)
    for sample in samples:
        records = []
        for m in MODALITIES:
            if m in sample.scores.scores:
                present = sample.scores.present(m)
                value = sample.scores.scores[m] if present else SCORE_SENTINEL
                records.append(Record(sample.utterance_id, m, "score", present, np.array([value])))
            if m in sample.embeddings.embeddings:
                present = sample.embeddings.present(m)
                if present:
                    payload = sample.embeddings.embeddings[m]
                else:
                    payload = np.full(EMBEDDING_DIMS[m], EMBEDDING_SENTINEL)
                records.append(Record(sample.utterance_id, m, "embedding", present, payload))
        rel = os.path.join(out_dir, f"{sample.utterance_id}.dir.rec")
        write_records(os.path.join(base_dir, rel), records)
        u = utts_by_id[sample.utterance_id]
        u.feature_paths = dict(u.feature_paths)
        u.feature_paths["directedness"] = rel
