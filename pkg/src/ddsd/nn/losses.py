"""Classification losses."""

import numpy as np

from ..errors import DataError

CLAMP_EPS = 1e-7


def weighted_bce(pred, label, weights=(1.0, 1.0)):
    """Class-weighted binary cross-entropy, averaged over the batch.

    pred: probabilities, any shape; label: matching {0,1} array.
    weights: (w_pos, w_neg). Returns (loss, dloss/dpred).
    """
    pred = np.asarray(pred, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    if pred.shape != label.shape:
        raise DataError(f"pred shape {pred.shape} != label shape {label.shape}")
    if not np.all((label == 0.0) | (label == 1.0)):
        raise DataError("labels must be 0 or 1")
    w_pos, w_neg = weights

    inside = (pred >= CLAMP_EPS) & (pred <= 1.0 - CLAMP_EPS)
    p = np.clip(pred, CLAMP_EPS, 1.0 - CLAMP_EPS)
    n = pred.size
    loss = -(w_pos * label * np.log(p) + w_neg * (1.0 - label) * np.log1p(-p)).sum() / n
    dpred = (-w_pos * label / p + w_neg * (1.0 - label) / (1.0 - p)) / n
    dpred *= inside  # clamp is flat outside the open interval
    return loss, dpred
