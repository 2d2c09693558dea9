"""Layers with explicit forward/backward passes.

Every layer owns its parameters and gradient buffers as plain float64
numpy arrays. ``forward`` caches whatever ``backward`` needs; ``backward``
consumes the most recent forward pass, accumulates parameter gradients and
returns the gradient with respect to its input.
"""

import numpy as np

from ..errors import ShapeError


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def glorot_uniform(rng, nin, nout):
    limit = np.sqrt(6.0 / (nin + nout))
    return rng.uniform(-limit, limit, size=(nin, nout))


class Context:
    """Per-forward-pass state: train flag, sequence lengths, dropout rng."""

    def __init__(self, train=False, lengths=None, rng=None):
        self.train = train
        self.lengths = lengths
        self.rng = rng


class Layer:
    """Base layer; subclasses fill params/grads dicts keyed by short names."""

    def __init__(self):
        self.params = {}
        self.grads = {}

    def _init_grads(self):
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def zero_grads(self):
        for g in self.grads.values():
            g[...] = 0.0

    def forward(self, x, ctx):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError

    def descriptor(self):
        raise NotImplementedError

    def _check_width(self, x, expected, what="input"):
        if x.ndim != 2 or x.shape[1] != expected:
            raise ShapeError(
                f"{self.__class__.__name__} expected {what} of width {expected}, "
                f"got array of shape {tuple(x.shape)}"
            )


ACTIVATIONS = ("linear", "relu", "tanh", "sigmoid")


class Dense(Layer):
    """Affine map with an elementwise activation: y = act(x @ W + b)."""

    def __init__(self, nin, nout, activation="linear", rng=None):
        super().__init__()
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.nin = nin
        self.nout = nout
        self.activation = activation
        rng = rng or np.random.default_rng(0)
        self.params = {
            "w": glorot_uniform(rng, nin, nout),
            "b": np.zeros(nout),
        }
        self._init_grads()

    def forward(self, x, ctx):
        self._check_width(x, self.nin)
        self._x = x
        a = x @ self.params["w"] + self.params["b"]
        if self.activation == "linear":
            y = a
            self._cache = None
        elif self.activation == "relu":
            y = np.maximum(a, 0.0)
            self._cache = a > 0.0
        elif self.activation == "tanh":
            y = np.tanh(a)
            self._cache = y
        else:  # sigmoid
            y = sigmoid(a)
            self._cache = y
        return y

    def backward(self, dy):
        if self.activation == "linear":
            da = dy
        elif self.activation == "relu":
            da = dy * self._cache
        elif self.activation == "tanh":
            da = dy * (1.0 - self._cache**2)
        else:
            da = dy * self._cache * (1.0 - self._cache)
        self.grads["w"] += self._x.T @ da
        self.grads["b"] += da.sum(axis=0)
        return da @ self.params["w"].T

    def descriptor(self):
        return {
            "kind": "dense",
            "nin": self.nin,
            "nout": self.nout,
            "activation": self.activation,
        }


def gru_cell(x_t, h_prev, w_in, u_zr, u_c, b):
    """Single GRU step: h = (1-z)*h_prev + z*tanh(...), Cho-style reset gate.

    w_in is (nin, 3H) stacked [z | r | c] input projections, u_zr is (H, 2H)
    stacked [z | r] recurrent weights, u_c the candidate recurrent weights,
    b the (3H,) bias.
    """
    nh = h_prev.shape[-1]
    proj = x_t @ w_in + b
    g = h_prev @ u_zr
    z = sigmoid(proj[..., :nh] + g[..., :nh])
    r = sigmoid(proj[..., nh : 2 * nh] + g[..., nh:])
    c = np.tanh(proj[..., 2 * nh :] + (r * h_prev) @ u_c)
    return (1.0 - z) * h_prev + z * c


class GRU(Layer):
    """Single GRU layer over a padded batch; returns the last valid state.

    Input (B, T, nin) plus per-sample valid lengths via the context; the
    state is frozen once a sample's length is exhausted, so the final state
    equals the state at the last valid timestep.
    """

    def __init__(self, nin, nhidden, rng=None):
        super().__init__()
        self.nin = nin
        self.nhidden = nhidden
        rng = rng or np.random.default_rng(0)
        nh = nhidden
        w = np.concatenate([glorot_uniform(rng, nin, nh) for _ in range(3)], axis=1)
        u_zr = np.concatenate([glorot_uniform(rng, nh, nh) for _ in range(2)], axis=1)
        u_c = glorot_uniform(rng, nh, nh)
        self.params = {"w_in": w, "u_zr": u_zr, "u_c": u_c, "b": np.zeros(3 * nh)}
        self._init_grads()

    def cell(self, x_t, h_prev):
        p = self.params
        return gru_cell(x_t, h_prev, p["w_in"], p["u_zr"], p["u_c"], p["b"])

    def forward(self, x, ctx):
        if x.ndim != 3 or x.shape[2] != self.nin:
            raise ShapeError(
                f"GRU expected input of shape (batch, time, {self.nin}), "
                f"got {tuple(x.shape)}"
            )
        nb, nt, _ = x.shape
        nh = self.nhidden
        p = self.params

        if ctx.lengths is None:
            mask = None
        else:
            lengths = np.asarray(ctx.lengths)
            if lengths.shape != (nb,):
                raise ShapeError(
                    f"GRU lengths shape {tuple(lengths.shape)} does not match batch {nb}"
                )
            mask = (np.arange(nt)[None, :] < lengths[:, None]).astype(np.float64)

        proj = (x.reshape(nb * nt, self.nin) @ p["w_in"] + p["b"]).reshape(nb, nt, 3 * nh)
        h = np.zeros((nb, nh))
        h_all = np.empty((nt + 1, nb, nh))
        h_all[0] = h
        zs = np.empty((nt, nb, nh))
        rs = np.empty((nt, nb, nh))
        cs = np.empty((nt, nb, nh))

        for t in range(nt):
            g = h @ p["u_zr"]
            z = sigmoid(proj[:, t, :nh] + g[:, :nh])
            r = sigmoid(proj[:, t, nh : 2 * nh] + g[:, nh:])
            c = np.tanh(proj[:, t, 2 * nh :] + (r * h) @ p["u_c"])
            h_new = (1.0 - z) * h + z * c
            if mask is not None:
                m = mask[:, t : t + 1]
                h = m * h_new + (1.0 - m) * h
            else:
                h = h_new
            h_all[t + 1] = h
            zs[t] = z
            rs[t] = r
            cs[t] = c

        self._x = x
        self._mask = mask
        self._h_all = h_all
        self._z = zs
        self._r = rs
        self._c = cs
        return h

    def backward(self, dy):
        x, mask = self._x, self._mask
        nb, nt, _ = x.shape
        nh = self.nhidden
        p, g = self.params, self.grads

        dh = dy.copy()
        dproj = np.empty((nb, nt, 3 * nh))
        for t in range(nt - 1, -1, -1):
            h_prev = self._h_all[t]
            z, r, c = self._z[t], self._r[t], self._c[t]
            if mask is not None:
                m = mask[:, t : t + 1]
                dh_new = dh * m
                dh = dh * (1.0 - m)
            else:
                dh_new = dh
                dh = np.zeros_like(dh)

            dz = dh_new * (c - h_prev)
            dc = dh_new * z
            dh += dh_new * (1.0 - z)

            dac = dc * (1.0 - c**2)
            drh = dac @ p["u_c"].T
            g["u_c"] += (r * h_prev).T @ dac
            dr = drh * h_prev
            dh += drh * r

            daz = dz * z * (1.0 - z)
            dar = dr * r * (1.0 - r)
            dg = np.concatenate([daz, dar], axis=1)
            g["u_zr"] += h_prev.T @ dg
            dh += dg @ p["u_zr"].T

            dproj[:, t, :nh] = daz
            dproj[:, t, nh : 2 * nh] = dar
            dproj[:, t, 2 * nh :] = dac

        flat = dproj.reshape(nb * nt, 3 * nh)
        g["w_in"] += x.reshape(nb * nt, self.nin).T @ flat
        g["b"] += flat.sum(axis=0)
        return (flat @ p["w_in"].T).reshape(nb, nt, self.nin)

    def descriptor(self):
        return {"kind": "gru", "nin": self.nin, "nhidden": self.nhidden}


class LayerNorm(Layer):
    """Per-row normalization with learned scale and shift."""

    EPS = 1e-8

    def __init__(self, dim):
        super().__init__()
        self.dim = dim
        self.params = {"gamma": np.ones(dim), "beta": np.zeros(dim)}
        self._init_grads()

    def forward(self, x, ctx):
        self._check_width(x, self.dim)
        mu = x.mean(axis=1, keepdims=True)
        xc = x - mu
        var = (xc**2).mean(axis=1, keepdims=True)
        self._inv = 1.0 / np.sqrt(var + self.EPS)
        self._xhat = xc * self._inv
        return self._xhat * self.params["gamma"] + self.params["beta"]

    def backward(self, dy):
        xhat, inv = self._xhat, self._inv
        self.grads["gamma"] += (dy * xhat).sum(axis=0)
        self.grads["beta"] += dy.sum(axis=0)
        dxhat = dy * self.params["gamma"]
        n = self.dim
        return inv / n * (
            n * dxhat
            - dxhat.sum(axis=1, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
        )

    def descriptor(self):
        return {"kind": "layer_norm", "dim": self.dim}


class Dropout(Layer):
    """Inverted dropout; identity when the context is not in train mode."""

    def __init__(self, rate):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate

    def forward(self, x, ctx):
        if not ctx.train or self.rate == 0.0:
            self._mask = None
            return x
        if ctx.rng is None:
            raise ValueError("dropout in train mode requires a forward rng")
        keep = 1.0 - self.rate
        self._mask = (ctx.rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, dy):
        if self._mask is None:
            return dy
        return dy * self._mask

    def descriptor(self):
        return {"kind": "dropout", "rate": self.rate}


class Mask(Layer):
    """Marker layer: declares that the graph consumes per-sample lengths."""

    def forward(self, x, ctx):
        return x

    def backward(self, dy):
        return dy

    def descriptor(self):
        return {"kind": "mask"}


class Branches(Layer):
    """Parallel sub-chains over a width-partitioned input, concatenated out.

    The input (B, sum(widths)) is split columnwise; chain i maps its slice
    through its own layer stack. Used by the fusion networks where each
    modality gets a private branch before the shared trunk.
    """

    def __init__(self, widths, chains):
        super().__init__()
        if len(widths) != len(chains):
            raise ValueError("one chain per input width required")
        self.widths = list(widths)
        self.chains = [list(c) for c in chains]

    def forward(self, x, ctx):
        total = sum(self.widths)
        self._check_width(x, total)
        outs = []
        self._out_widths = []
        start = 0
        for width, chain in zip(self.widths, self.chains):
            h = x[:, start : start + width]
            for layer in chain:
                h = layer.forward(h, ctx)
            outs.append(h)
            self._out_widths.append(h.shape[1])
            start += width
        return np.concatenate(outs, axis=1)

    def backward(self, dy):
        dxs = []
        start = 0
        for width, chain in zip(self._out_widths, self.chains):
            d = dy[:, start : start + width]
            for layer in reversed(chain):
                d = layer.backward(d)
            dxs.append(d)
            start += width
        return np.concatenate(dxs, axis=1)

    def zero_grads(self):
        for chain in self.chains:
            for layer in chain:
                layer.zero_grads()

    def descriptor(self):
        return {
            "kind": "branches",
            "widths": self.widths,
            "chains": [[layer.descriptor() for layer in chain] for chain in self.chains],
        }


def layer_from_descriptor(desc, rng=None):
    kind = desc["kind"]
    if kind == "dense":
        return Dense(desc["nin"], desc["nout"], desc["activation"], rng=rng)
    if kind == "gru":
        return GRU(desc["nin"], desc["nhidden"], rng=rng)
    if kind == "layer_norm":
        return LayerNorm(desc["dim"])
    if kind == "dropout":
        return Dropout(desc["rate"])
    if kind == "mask":
        return Mask()
    if kind == "branches":
        chains = [
            [layer_from_descriptor(d, rng=rng) for d in chain] for chain in desc["chains"]
        ]
        return Branches(desc["widths"], chains)
    raise ValueError(f"unknown layer kind {kind!r}")
