import pytest

from ddsd.data.synth import SynthConfig, generate_corpus
from ddsd.extraction import extract_features


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """A very small but fully extracted corpus shared across test modules."""
    root = tmp_path_factory.mktemp("tiny_corpus")
    cfg = SynthConfig(scale=0.02, seed=11)
    manifest_path, _ = generate_corpus(cfg, root)
    extract_features(manifest_path)
    return {"root": str(root), "manifest": manifest_path, "config": cfg}
