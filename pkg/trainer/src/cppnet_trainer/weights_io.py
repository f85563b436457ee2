"""cppnet-v1 weight-file writer/reader (the decoder package's exchange format)
and the bit-exact quantized forward used for the cross-implementation fixture.

Accumulation contract shared with the decoder: per neuron, add the nonzero
weighted inputs in index order, then the bias; the activation uses libm sin.
"""

import math

import numpy as np

from .model import Net

MAGIC = "cppnet-v1"
VALID = frozenset([0] + [s * 2**k for s in (1, -1) for k in range(8)])


def _check_quantized(net):
    for w in np.concatenate([net.wa.ravel(), net.wb.ravel()]):
        if float(w) != int(w) or int(w) not in VALID:
            raise ValueError(f"weight {w} is not quantized to {{0, ±2^k}}")
    if net.hidden != (net.degree + 1) // 2:
        raise ValueError("hidden size must be ceil(degree/2)")


def render(nets):
    """Serialize {degree: Net} to cppnet-v1 text."""
    blocks = []
    for d in sorted(nets):
        net = nets[d]
        _check_quantized(net)
        lines = [f"degree {d}", f"hidden {net.hidden}", "Wa"]
        lines += [" ".join(str(int(w)) for w in row) for row in net.wa]
        lines += ["ba", " ".join(repr(float(b)) for b in net.ba)]
        lines += ["wb", " ".join(str(int(w)) for w in net.wb)]
        lines += ["bb", repr(float(net.bb))]
        blocks.append("\n".join(lines))
    return MAGIC + "\n" + "\n\n".join(blocks) + "\n"


def write_file(nets, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(render(nets))


def parse(text):
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != MAGIC:
        raise ValueError("bad magic")
    body = [ln for ln in lines[1:] if ln]
    nets = {}
    pos = 0
    while pos < len(body):
        if not body[pos].startswith("degree"):
            raise ValueError(f"expected degree, got {body[pos]!r}")
        d = int(body[pos].split()[1])
        h = int(body[pos + 1].split()[1])
        pos += 2
        assert body[pos] == "Wa"
        wa = np.array([[int(t) for t in body[pos + 1 + i].split()] for i in range(h)])
        pos += 1 + h
        assert body[pos] == "ba"
        ba = np.array([float(t) for t in body[pos + 1].split()])
        pos += 2
        assert body[pos] == "wb"
        wb = np.array([int(t) for t in body[pos + 1].split()])
        pos += 2
        assert body[pos] == "bb"
        bb = float(body[pos + 1])
        pos += 2
        nets[d] = Net(wa=wa, ba=ba, wb=wb, bb=bb)
    return nets


def _sin_act_scalar(x):
    if x < -1.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return 0.5 * (math.sin(0.5 * math.pi * x) + 1.0)


def quantized_forward(net, v):
    """Scalar-order forward pass matching the decoder's accumulation exactly."""
    hidden = []
    for m in range(net.hidden):
        acc = 0.0
        for j in range(net.degree):
            w = float(net.wa[m, j])
            if w != 0.0:
                acc += w * v[j]
        acc += float(net.ba[m])
        hidden.append(_sin_act_scalar(acc))
    acc = 0.0
    for m in range(net.hidden):
        w = float(net.wb[m])
        if w != 0.0:
            acc += w * hidden[m]
    acc += float(net.bb)
    return _sin_act_scalar(acc)


def write_forward_fixture(net, feats, path):
    """Dump (input, prediction) rows for the decoder's bit-match contract test."""
    d = net.degree
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join([f"v{i+1}" for i in range(d)] + ["s_tilde"]) + "\n")
        for row in feats:
            s = quantized_forward(net, row)
            fh.write(",".join(repr(float(x)) for x in row) + f",{repr(float(s))}\n")
