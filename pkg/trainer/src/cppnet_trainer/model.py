"""Full-precision shift-predictor net: d inputs, ceil(d/2) hidden units, one
output, clipped-sine activation on both layers. Forward/backward are plain
numpy; the nets are tiny (at most a few dozen parameters)."""

import math
from dataclasses import dataclass

import numpy as np


def sin_act(z):
    z = np.asarray(z)
    return np.where(z < -1.0, 0.0, np.where(z > 1.0, 1.0, 0.5 * (np.sin(0.5 * np.pi * z) + 1.0)))


def sin_act_grad(z):
    z = np.asarray(z)
    inside = (z >= -1.0) & (z <= 1.0)
    return np.where(inside, 0.25 * np.pi * np.cos(0.5 * np.pi * z), 0.0)


@dataclass
class Net:
    wa: np.ndarray  # (h, d)
    ba: np.ndarray  # (h,)
    wb: np.ndarray  # (h,)
    bb: float

    @property
    def degree(self):
        return self.wa.shape[1]

    @property
    def hidden(self):
        return self.wa.shape[0]

    def params(self):
        return {"wa": self.wa, "ba": self.ba, "wb": self.wb, "bb": self.bb}

    def copy(self):
        return Net(self.wa.copy(), self.ba.copy(), self.wb.copy(), float(self.bb))


def init_net(degree, rng):
    h = (degree + 1) // 2
    scale = 1.0 / math.sqrt(degree)
    return Net(
        wa=rng.uniform(-scale, scale, size=(h, degree)),
        ba=rng.uniform(-0.1, 0.1, size=h),
        wb=rng.uniform(-scale, scale, size=h),
        bb=float(rng.uniform(-0.1, 0.1)),
    )


def forward(net, v):
    """Batched forward pass; returns the prediction and the cache for backprop."""
    v = np.atleast_2d(v)
    z1 = v @ net.wa.T + net.ba
    a1 = sin_act(z1)
    z2 = a1 @ net.wb + net.bb
    out = sin_act(z2)
    return out, (v, z1, a1, z2)


def predict(net, v):
    return forward(net, v)[0]


def backward(net, cache, dloss_dout):
    """Gradients of a scalar loss given d(loss)/d(prediction) per sample
    (already carrying any 1/batch factor)."""
    v, z1, a1, z2 = cache
    g2 = dloss_dout * sin_act_grad(z2)  # (n,)
    grads = {
        "wb": a1.T @ g2,
        "bb": float(g2.sum()),
    }
    g1 = np.outer(g2, net.wb) * sin_act_grad(z1)  # (n, h)
    grads["wa"] = g1.T @ v
    grads["ba"] = g1.sum(axis=0)
    return grads
