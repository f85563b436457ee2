"""Post-training quantization of the net weights to signed powers of two.

Weights map to the nearest value (linear distance) in {0} U {±2^k, k <= cap};
magnitudes below the zero threshold collapse to 0, exact ties resolve toward
the smaller magnitude. Biases stay full precision and are finetuned afterwards
with the quantized weights frozen."""

import numpy as np

from .model import Net
from .training import train


def quantize_weight(w, cap=7, zero_threshold=0.5):
    if abs(w) < zero_threshold:
        return 0
    candidates = 2.0 ** np.arange(cap + 1)
    dist = np.abs(abs(w) - candidates)
    best = int(np.argmin(dist))  # first minimum: ties toward the smaller power
    q = int(candidates[best])
    return q if w > 0 else -q


def quantize_net(net, cap=7, zero_threshold=0.5):
    qa = np.vectorize(lambda w: quantize_weight(w, cap, zero_threshold), otypes=[np.int64])
    return Net(
        wa=qa(net.wa).astype(np.int64),
        ba=net.ba.copy(),
        wb=qa(net.wb).astype(np.int64),
        bb=float(net.bb),
    )


def finetune_biases(qnet, samples, cfg):
    """Re-train ba/bb with the quantized weights frozen; the weights pass
    through float64 exactly (small integers), so the quantized forward path
    is unchanged."""
    fnet = Net(
        wa=qnet.wa.astype(np.float64),
        ba=qnet.ba.copy(),
        wb=qnet.wb.astype(np.float64),
        bb=float(qnet.bb),
    )
    tuned, history = train(samples, cfg, net=fnet, trainable=("ba", "bb"))
    return (
        Net(wa=qnet.wa.copy(), ba=tuned.ba, wb=qnet.wb.copy(), bb=float(tuned.bb)),
        history,
    )
