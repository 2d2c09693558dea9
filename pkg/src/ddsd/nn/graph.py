"""Sequential model graph and its single-file serialization container.

File layout: 8-byte magic, u32 version, u32 header length, JSON header
(layer descriptors, parameter names/shapes, metadata), then raw
little-endian float64 parameter blobs in header order. Round-trips are
bit-exact.
"""

import json
import struct

import numpy as np

from ..errors import DataError, NumericError, ShapeError
from .layers import Branches, Mask, layer_from_descriptor, Context

MAGIC = b"DDSDMDL1"
VERSION = 1


def _walk(layers, prefix=""):
    """Yield (name_prefix, layer) for all layers including branch chains."""
    for i, layer in enumerate(layers):
        name = f"{prefix}L{i}.{layer.descriptor()['kind']}"
        yield name, layer
        if isinstance(layer, Branches):
            for bi, chain in enumerate(layer.chains):
                yield from _walk(chain, prefix=f"{name}.b{bi}.")


class ModelGraph:
    """Ordered layer stack with shared forward context and recorded backward."""

    def __init__(self, layers, rng_seed=0, meta=None):
        self.layers = list(layers)
        self.rng_seed = rng_seed
        self.meta = dict(meta or {})
        self.extras = {}
        self._has_mask = any(isinstance(l, Mask) for l in self.layers)

    # -- forward / backward -------------------------------------------------

    def forward(self, x, lengths=None, train=False, rng=None):
        out, _ = self.forward_all(x, lengths=lengths, train=train, rng=rng)
        return out

    def forward_all(self, x, lengths=None, train=False, rng=None):
        """Run all layers; returns (output, per-layer outputs)."""
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise NumericError("non-finite values in forward input")
        if self._has_mask and lengths is None:
            raise DataError("graph has a mask layer: per-sample lengths are required")
        if not self._has_mask and lengths is not None:
            raise DataError("graph has no mask layer but lengths were supplied")
        ctx = Context(train=train, lengths=lengths, rng=rng)
        acts = []
        for i, layer in enumerate(self.layers):
            try:
                x = layer.forward(x, ctx)
            except ShapeError as e:
                raise ShapeError(f"layer {i} ({layer.descriptor()['kind']}): {e}") from None
            acts.append(x)
        return x, acts

    def backward(self, dout):
        d = np.asarray(dout, dtype=np.float64)
        for layer in reversed(self.layers):
            d = layer.backward(d)
        return d

    def head_forward(self, x, start, train=False, rng=None):
        """Run only layers[start:] on x (used to re-score an embedding)."""
        ctx = Context(train=train, lengths=None, rng=rng)
        for layer in self.layers[start:]:
            x = layer.forward(x, ctx)
        return x

    # -- parameter access ---------------------------------------------------

    def named_params(self):
        """(name, params-dict, key) triples in a stable order."""
        out = []
        for name, layer in _walk(self.layers):
            for key in sorted(layer.params):
                out.append((f"{name}.{key}", layer, key))
        return out

    def num_params(self):
        return sum(layer.params[key].size for _, layer, key in self.named_params())

    def zero_grads(self):
        for _, layer in _walk(self.layers):
            layer.zero_grads()

    def snapshot_params(self):
        return {name: layer.params[key].copy() for name, layer, key in self.named_params()}

    def restore_params(self, snap):
        for name, layer, key in self.named_params():
            layer.params[key][...] = snap[name]

    # -- serialization ------------------------------------------------------

    def save(self, path):
        names = self.named_params()
        header = {
            "rng_seed": self.rng_seed,
            "meta": self.meta,
            "layers": [l.descriptor() for l in self.layers],
            "params": [[name, list(layer.params[key].shape)] for name, layer, key in names],
            "extras": [[name, list(arr.shape)] for name, arr in sorted(self.extras.items())],
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<II", VERSION, len(blob)))
            f.write(blob)
            for _, layer, key in names:
                f.write(np.ascontiguousarray(layer.params[key], dtype="<f8").tobytes())
            for name, _ in header["extras"]:
                f.write(np.ascontiguousarray(self.extras[name], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            raw = f.read()
        if raw[:8] != MAGIC:
            raise DataError(f"{path}: bad magic bytes (not a model container)")
        version, hlen = struct.unpack_from("<II", raw, 8)
        if version != VERSION:
            raise DataError(f"{path}: unsupported container version {version}")
        header = json.loads(raw[16 : 16 + hlen].decode("utf-8"))
        layers = [layer_from_descriptor(d) for d in header["layers"]]
        graph = cls(layers, rng_seed=header["rng_seed"], meta=header["meta"])

        offset = 16 + hlen
        by_name = {name: (layer, key) for name, layer, key in graph.named_params()}
        for name, shape in header["params"]:
            size = int(np.prod(shape)) if shape else 1
            end = offset + 8 * size
            if end > len(raw):
                raise DataError(f"{path}: truncated at byte {len(raw)} reading {name}")
            arr = np.frombuffer(raw[offset:end], dtype="<f8").reshape(shape)
            layer, key = by_name[name]
            if layer.params[key].shape != arr.shape:
                raise DataError(f"{path}: shape mismatch for {name}")
            layer.params[key][...] = arr
            offset = end
        for name, shape in header["extras"]:
            size = int(np.prod(shape)) if shape else 1
            end = offset + 8 * size
            if end > len(raw):
                raise DataError(f"{path}: truncated at byte {len(raw)} reading {name}")
            graph.extras[name] = np.frombuffer(raw[offset:end], dtype="<f8").reshape(shape).copy()
            offset = end
        return graph
