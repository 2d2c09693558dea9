"""Canonical modality names, ordering, and embedding dimensions."""

MODALITIES = ("acoustic", "text", "asr", "prosody")
VERBAL_MODALITIES = ("acoustic", "text", "asr")

EMBEDDING_DIMS = {"acoustic": 256, "text": 128, "asr": 16, "prosody": 128}

MODALITY_CODES = {name: i for i, name in enumerate(MODALITIES)}
MODALITY_NAMES = {i: name for i, name in enumerate(MODALITIES)}


def check_modalities(modalities):
    seen = set()
    for m in modalities:
        if m not in MODALITIES:
            raise ValueError(f"unknown modality {m!r}; expected one of {MODALITIES}")
        if m in seen:
            raise ValueError(f"duplicate modality {m!r}")
        seen.add(m)
    return tuple(modalities)
