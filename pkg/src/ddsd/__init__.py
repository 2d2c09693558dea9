"""Multimodal device-directed speech detection toolkit.

Prosody-based and stand-in verbal classifiers, score/embedding fusion with
modality dropout, EER/FA@FR evaluation, and a synthetic multimodal corpus
generator for end-to-end experiments.
"""

__version__ = "0.1.0"

from .modalities import EMBEDDING_DIMS, MODALITIES, VERBAL_MODALITIES

__all__ = ["EMBEDDING_DIMS", "MODALITIES", "VERBAL_MODALITIES", "__version__"]
