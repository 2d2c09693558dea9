"""Adam optimizer with global-norm gradient clipping."""

import numpy as np

from ..errors import NumericError


def global_grad_norm(named_params):
    total = 0.0
    for _, layer, key in named_params:
        g = layer.grads[key]
        total += float(np.dot(g.ravel(), g.ravel()))
    return np.sqrt(total)


class Adam:
    """Standard Adam; gradients are clipped to a global L2 norm first."""

    def __init__(self, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8, clip_norm=1.0):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.clip_norm = clip_norm
        self.t = 0
        self._m = {}
        self._v = {}

    def step(self, named_params):
        for name, layer, key in named_params:
            if not np.all(np.isfinite(layer.grads[key])):
                raise NumericError(f"non-finite gradient for parameter {name}")

        scale = 1.0
        if self.clip_norm is not None and self.clip_norm > 0:
            norm = global_grad_norm(named_params)
            if norm > self.clip_norm:
                scale = self.clip_norm / norm

        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, layer, key in named_params:
            g = layer.grads[key] * scale
            if name not in self._m:
                self._m[name] = np.zeros_like(g)
                self._v[name] = np.zeros_like(g)
            m = self._m[name]
            v = self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            layer.params[key] -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
