"""Single-modality directedness models.

The prosody classifier is the full-fidelity model: mask -> GRU(5->128) ->
last valid step -> layer norm -> dropout(0.2) -> dense sigmoid head, with
the 128-dim pre-normalization GRU output exported as the fusion embedding.
The acoustic/text/asr models are lightweight stand-ins that honor the same
interface contract: a directedness score plus a fixed-size penultimate
embedding (256 / 128 / 16).
"""

import os
import zlib
from dataclasses import dataclass

import numpy as np

from .data.manifest import by_split
from .data.records import Record, read_records, read_single, write_records
from .errors import DataError
from .metrics import compute_eer
from .modalities import EMBEDDING_DIMS, MODALITIES
from .nn import (
    Dense,
    Dropout,
    GRU,
    LayerNorm,
    Mask,
    ModelGraph,
    TrainConfig,
    balanced_class_weights,
    fit,
    pad_batch,
)

TEXT_BAG_DIM = 4096
SEQUENCE_MODALITIES = ("prosody", "acoustic")

# parameter budget of the prosody model (reference: ~50K learnable parameters)
PROSODY_PARAM_RANGE = (45_000, 56_000)


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, rows):
        """Per-dimension moments over stacked rows; std floored for stability."""
        mean = rows.mean(axis=0)
        std = rows.std(axis=0)
        return cls(mean=mean, std=np.maximum(std, 1e-6))

    def apply(self, x):
        return (x - self.mean) / self.std


@dataclass
class DirectnessOutput:
    score: float
    embedding: np.ndarray


@dataclass
class ComponentModel:
    modality: str
    graph: ModelGraph
    embedding_tap: int  # index of the layer whose output is the embedding
    standardizer: Standardizer = None

    @property
    def embedding_dim(self):
        return EMBEDDING_DIMS[self.modality]

    def save(self, path):
        self.graph.meta = {
            "type": "component",
            "modality": self.modality,
            "embedding_tap": self.embedding_tap,
        }
        self.graph.extras = {}
        if self.standardizer is not None:
            self.graph.extras["standardizer_mean"] = self.standardizer.mean
            self.graph.extras["standardizer_std"] = self.standardizer.std
        self.graph.save(path)

    @classmethod
    def load(cls, path):
        graph = ModelGraph.load(path)
        if graph.meta.get("type") != "component":
            raise DataError(f"{path}: not a component model file")
        std = None
        if "standardizer_mean" in graph.extras:
            std = Standardizer(
                mean=graph.extras["standardizer_mean"],
                std=graph.extras["standardizer_std"],
            )
        return cls(
            modality=graph.meta["modality"],
            graph=graph,
            embedding_tap=graph.meta["embedding_tap"],
            standardizer=std,
        )


def build_prosody_model(seed=0):
    rng = np.random.default_rng(seed)
    graph = ModelGraph(
        [
            Mask(),
            GRU(5, 128, rng=rng),
            LayerNorm(128),
            Dropout(0.2),
            Dense(128, 1, "sigmoid", rng=rng),
        ],
        rng_seed=seed,
    )
    n = graph.num_params()
    assert PROSODY_PARAM_RANGE[0] <= n <= PROSODY_PARAM_RANGE[1], n
    model = ComponentModel(modality="prosody", graph=graph, embedding_tap=1)
    assert _tap_width(model) == EMBEDDING_DIMS["prosody"]
    return model


def build_standin(modality, seed=0):
    rng = np.random.default_rng(seed)
    if modality == "acoustic":
        layers = [Mask(), GRU(40, 256, rng=rng), Dense(256, 1, "sigmoid", rng=rng)]
        tap = 1
    elif modality == "text":
        layers = [Dense(TEXT_BAG_DIM, 128, "relu", rng=rng), Dense(128, 1, "sigmoid", rng=rng)]
        tap = 0
    elif modality == "asr":
        layers = [Dense(8, 16, "relu", rng=rng), Dense(16, 1, "sigmoid", rng=rng)]
        tap = 0
    else:
        raise DataError(f"no stand-in for modality {modality!r}")
    model = ComponentModel(modality=modality, graph=ModelGraph(layers, rng_seed=seed), embedding_tap=tap)
    assert _tap_width(model) == EMBEDDING_DIMS[modality]
    return model


def _tap_width(model):
    desc = model.graph.layers[model.embedding_tap].descriptor()
    return desc["nhidden"] if desc["kind"] == "gru" else desc["nout"]


def build_component(modality, seed=0):
    if modality == "prosody":
        return build_prosody_model(seed)
    return build_standin(modality, seed)


def text_trigram_bag(text, dim=TEXT_BAG_DIM):
    """Hashed character-trigram counts; crc32 keeps the hash stable."""
    s = f" {text.strip().lower()} "
    bag = np.zeros(dim)
    for i in range(len(s) - 2):
        idx = zlib.crc32(s[i : i + 3].encode("utf-8")) % dim
        bag[idx] += 1.0
    return bag


def load_features(modality, utt, base_dir):
    """Raw (unstandardized) model input for one utterance."""
    if modality == "text":
        if utt.text is None:
            raise DataError(f"{utt.utterance_id}: no text field")
        return text_trigram_bag(utt.text)
    key = modality
    if key not in utt.feature_paths:
        raise DataError(f"{utt.utterance_id}: no {modality} features in manifest")
    rec = read_single(os.path.join(base_dir, utt.feature_paths[key]), modality, "features")
    feats = rec.payload.astype(np.float64)
    if modality == "prosody" and (feats.ndim != 2 or feats.shape[1] != 5):
        raise DataError(f"{utt.utterance_id}: prosody features must be (T, 5)")
    if modality == "acoustic" and (feats.ndim != 2 or feats.shape[1] != 40):
        raise DataError(f"{utt.utterance_id}: acoustic features must be (T, 40)")
    if modality == "asr" and feats.shape != (8,):
        raise DataError(f"{utt.utterance_id}: asr features must be 8-dim")
    return feats


def _prepare_inputs(model, utts, base_dir, fit_standardizer=False):
    feats = [load_features(model.modality, u, base_dir) for u in utts]
    labels = np.array([u.label_int() for u in utts], dtype=np.float64)
    if fit_standardizer:
        rows = np.concatenate([f if f.ndim == 2 else f[None] for f in feats], axis=0)
        model.standardizer = Standardizer.fit(rows)
    if model.standardizer is None:
        raise DataError("model has no fitted standardizer")
    std = [model.standardizer.apply(f) for f in feats]
    if model.modality in SEQUENCE_MODALITIES:
        return std, labels
    return np.stack(std), labels


def train_component(
    model,
    utts,
    base_dir,
    config=None,
    train_split="train-comp",
    val_split="val-comp",
    log=None,
):
    """Fit on the component train split; returns (history, best_epoch).

    Class weights default to n_neg/n_pos from the training manifest; the
    checkpoint with the best validation EER is kept.
    """
    train_utts = by_split(utts, train_split)
    val_utts = by_split(utts, val_split)
    if not train_utts or not val_utts:
        raise DataError(f"empty split: {train_split if not train_utts else val_split}")

    config = config or TrainConfig()
    train_x, train_y = _prepare_inputs(model, train_utts, base_dir, fit_standardizer=True)
    val_x, val_y = _prepare_inputs(model, val_utts, base_dir)

    if config.class_weights == (1.0, 1.0):
        config.class_weights = balanced_class_weights(train_y)

    return fit(
        model.graph,
        train_x,
        train_y,
        val_x,
        val_y,
        config,
        val_metric=compute_eer,
        log=log,
    )


def infer_component(model, features):
    """DirectnessOutput for one utterance's raw features."""
    scores, embeddings = infer_component_batch(model, [features])
    return DirectnessOutput(score=float(scores[0]), embedding=embeddings[0])


def infer_component_batch(model, features_list, batch_size=256):
    """(scores (N,), embeddings (N, D)) in eval mode."""
    if model.standardizer is None:
        raise DataError("model has no fitted standardizer")
    std = [model.standardizer.apply(f) for f in features_list]
    n = len(std)
    scores = np.empty(n)
    embeddings = np.empty((n, model.embedding_dim))
    seq = model.modality in SEQUENCE_MODALITIES
    for start in range(0, n, batch_size):
        chunk = std[start : start + batch_size]
        if seq:
            x, lengths = pad_batch(chunk)
            out, acts = model.graph.forward_all(x, lengths=lengths)
        else:
            out, acts = model.graph.forward_all(np.stack(chunk))
        scores[start : start + len(chunk)] = out.ravel()
        embeddings[start : start + len(chunk)] = acts[model.embedding_tap]
    return scores, embeddings


def head_score_from_embedding(model, embedding):
    """Re-apply the model's own head (dropout off) to an embedding."""
    out = model.graph.head_forward(embedding[None, :], model.embedding_tap + 1)
    return float(out[0, 0])


def export_directedness(models, utts, base_dir, out_dir):
    """Run every model over the utterances; write score+embedding records.

    One record file per utterance holding a score and an embedding record
    per modality. Returns the updated utterance list (feature_paths gains a
    "directedness" entry relative to base_dir).
    """
    os.makedirs(os.path.join(base_dir, out_dir), exist_ok=True)
    per_modality = {}
    for modality, model in models.items():
        feats = [load_features(modality, u, base_dir) for u in utts]
        per_modality[modality] = infer_component_batch(model, feats)

    for i, u in enumerate(utts):
        records = []
        for modality in MODALITIES:
            if modality not in per_modality:
                continue
            scores, embeddings = per_modality[modality]
            records.append(Record(u.utterance_id, modality, "score", True, np.array([scores[i]])))
            records.append(Record(u.utterance_id, modality, "embedding", True, embeddings[i]))
        rel = os.path.join(out_dir, f"{u.utterance_id}.dir.rec")
        write_records(os.path.join(base_dir, rel), records)
        u.feature_paths = dict(u.feature_paths)
        u.feature_paths["directedness"] = rel
    return utts


def ingest_precomputed(utts, base_dir):
    """Read exported score/embedding records into FusionSamples.

    Dimension mismatches are rejected with the offending utterance id.
    """
    from .fusion import EmbeddingSet, FusionSample, ScoreSet

    samples = []
    for u in utts:
        if "directedness" not in u.feature_paths:
            raise DataError(f"{u.utterance_id}: no directedness records in manifest")
        recs = read_records(os.path.join(base_dir, u.feature_paths["directedness"]))
        scores = {}
        embeddings = {}
        for rec in recs:
            if rec.utterance_id != u.utterance_id:
                raise DataError(f"{u.utterance_id}: record belongs to {rec.utterance_id}")
            if rec.kind == "score":
                if rec.payload.shape != (1,):
                    raise DataError(f"{u.utterance_id}: {rec.modality} score must be scalar")
                scores[rec.modality] = float(rec.payload[0]) if rec.present else None
            elif rec.kind == "embedding":
                want = EMBEDDING_DIMS[rec.modality]
                if rec.payload.shape != (want,):
                    raise DataError(
                        f"{u.utterance_id}: {rec.modality} embedding has shape "
                        f"{tuple(rec.payload.shape)}, expected ({want},)"
                    )
                embeddings[rec.modality] = rec.payload.astype(np.float64) if rec.present else None
        samples.append(
            FusionSample(
                utterance_id=u.utterance_id,
                label=u.label_int(),
                scores=ScoreSet(scores),
                embeddings=EmbeddingSet(embeddings),
            )
        )
    return samples
