"""RMSProp with global gradient-norm clipping.

Update per unfrozen parameter: s <- decay*s + (1-decay)*g^2,
theta <- theta - lr * g / (sqrt(s) + eps), where g is the gradient after
clipping the global norm (computed over unfrozen parameters only). Frozen
parameters are skipped entirely, leaving value and accumulator bit-identical.
"""

import numpy as np

from ..nn import global_grad_norm


class RMSProp:
    def __init__(self, params, learning_rate, decay=0.99, eps=1e-5, clip_norm=0.5):
        self.learning_rate = learning_rate
        self.decay = decay
        self.eps = eps
        self.clip_norm = clip_norm
        self._sq = {name: np.zeros_like(p.value) for name, p in params.items()}

    def step(self, params):
        """Apply one update from the accumulated gradients; returns the
        pre-clip global gradient norm."""
        norm = global_grad_norm(params)
        coef = 1.0
        if self.clip_norm > 0 and norm > self.clip_norm:
            coef = self.clip_norm / norm
        for name, p in params.items():
            if p.frozen:
                continue
            g = p.grad if coef == 1.0 else p.grad * coef
            sq = self._sq[name]
            sq *= self.decay
            sq += (1.0 - self.decay) * g * g
            p.value -= self.learning_rate * g / (np.sqrt(sq) + self.eps)
        return norm
