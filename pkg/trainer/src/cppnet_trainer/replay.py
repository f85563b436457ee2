"""Replay projection inputs through the iterative loop to measure how many
iterations a warm start saves. Independent reimplementation of the decoder's
projection (doubles as a cross-check of the exchange contract); iteration
counts use the same convention: a membership short-circuit counts as one
evaluation."""

import numpy as np

from .weights_io import quantized_forward


def _cut(v):
    theta = np.where(v >= 0.5, 1.0, -1.0)
    npos = int((theta > 0).sum())
    if npos % 2 == 0:
        i = int(np.argmin(np.abs(v - 0.5)))
        theta[i] = -theta[i]
        npos += 1 if theta[i] > 0 else -1
    return theta, float(npos - 1)


def replay_iterations(v, eps=1e-6, net=None, cap=10_000):
    """Iteration count for one projection, warm-started by ``net`` when given."""
    v = np.asarray(v, dtype=np.float64).copy()
    d = v.size
    theta, p = _cut(v)
    u = np.clip(v, 0.0, 1.0)
    eta = (theta @ u - p) / d
    if eta < eps:
        return 1
    eta_k = quantized_forward(net, v) if net is not None else 0.0
    k = 0
    while True:
        v -= eta_k * theta
        k += 1
        eta_k = (theta @ np.clip(v, 0.0, 1.0) - p) / d
        if abs(eta_k) < eps:
            return k
        if k >= cap:
            raise RuntimeError("projection replay did not converge")


def mean_iterations(samples, eps=1e-6, net=None):
    ks = np.array(
        [replay_iterations(f, eps=eps, net=net) for f in samples.features], dtype=np.int64
    )
    return float(ks.mean()), int(ks.max())
