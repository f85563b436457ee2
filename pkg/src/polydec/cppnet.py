"""Inference path for the shift-coefficient predictor net (CPP-net).

One tiny subnetwork per check degree d: a d -> ceil(d/2) -> 1 perceptron with
the clipped-sine activation on both layers. Weights are quantized to signed
powers of two (or zero) so every multiply is a sign flip plus a binary shift;
biases stay full precision. This module only runs and serializes nets --
training lives in the separate trainer package.
"""

import math
from dataclasses import dataclass

import numpy as np

MAGIC = "cppnet-v1"
MAX_EXPONENT = 7  # largest |weight| is 2**7
_VALID_WEIGHTS = frozenset(
    [0] + [s * 2**k for s in (1, -1) for k in range(MAX_EXPONENT + 1)]
)


def sin_act(x):
    """Clipped sine squashing to [0, 1]: 0 below -1, 1 above +1, smooth between."""
    if x < -1.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return 0.5 * (math.sin(0.5 * math.pi * x) + 1.0)


def make_sin_act_table(bits):
    """Lookup table with 2**bits entries sampling sin_act over [-1, 1]."""
    n = 1 << bits
    grid = np.linspace(-1.0, 1.0, n)
    return np.array([sin_act(g) for g in grid])


def _sin_act_lut(x, table):
    n = table.size
    if x < -1.0:
        return table[0]
    if x > 1.0:
        return table[n - 1]
    idx = int(round((x + 1.0) * 0.5 * (n - 1)))
    return table[idx]


@dataclass(frozen=True)
class Subnet:
    """Quantized weights for one check degree."""

    degree: int
    wa: np.ndarray  # int, shape (hidden, degree)
    ba: np.ndarray  # float, shape (hidden,)
    wb: np.ndarray  # int, shape (hidden,)
    bb: float

    @property
    def hidden(self):
        return self.wa.shape[0]

    def op_cost(self):
        """(muls, adds) of one forward pass.

        Shift-realized multiplies (|w| >= 2) count as muls; every nonzero
        weight costs one add (the last add of each neuron folds in the bias).
        """
        muls = int((np.abs(self.wa) >= 2).sum() + (np.abs(self.wb) >= 2).sum())
        adds = int((self.wa != 0).sum() + (self.wb != 0).sum())
        return muls, adds


def _check_subnet(sub):
    d, h = sub.degree, sub.hidden
    if d < 2:
        raise ValueError(f"degree {d} < 2")
    if h != (d + 1) // 2:
        raise ValueError(f"degree {d} needs {(d + 1) // 2} hidden units, got {h}")
    if sub.wa.shape != (h, d) or sub.wb.shape != (h,) or sub.ba.shape != (h,):
        raise ValueError("weight/bias shape mismatch")
    for w in np.concatenate([sub.wa.ravel(), sub.wb]):
        if int(w) not in _VALID_WEIGHTS:
            raise ValueError(f"weight {int(w)} not in {{0, ±2^k}} (k <= {MAX_EXPONENT})")


class CppNetWeights:
    """Per-degree collection of quantized subnetworks."""

    def __init__(self, subnets):
        self._subs = {}
        for sub in subnets:
            if sub.degree in self._subs:
                raise ValueError(f"duplicate subnetwork for degree {sub.degree}")
            _check_subnet(sub)
            self._subs[sub.degree] = sub

    def degrees(self):
        return sorted(self._subs)

    def subnet(self, degree):
        try:
            return self._subs[degree]
        except KeyError:
            raise KeyError(f"no subnetwork for check degree {degree}") from None

    def __contains__(self, degree):
        return degree in self._subs

    def __eq__(self, other):
        if not isinstance(other, CppNetWeights) or self.degrees() != other.degrees():
            return False
        for d in self.degrees():
            a, b = self.subnet(d), other.subnet(d)
            if not (
                np.array_equal(a.wa, b.wa)
                and np.array_equal(a.wb, b.wb)
                and np.array_equal(a.ba, b.ba)
                and a.bb == b.bb
            ):
                return False
        return True


def _shift_mul(x, w):
    # w is 0 or ±2^k: realize w*x as a sign flip plus an exponent shift
    if w > 0:
        return math.ldexp(x, w.bit_length() - 1)
    return -math.ldexp(x, (-w).bit_length() - 1)


def forward(net, v, mode="shift", lut_bits=None):
    """Predicted shift coefficient for one projection input ``v``.

    ``mode`` selects the multiply realization: "shift" (sign + binary shift,
    the deployment path) or "float" (plain multiplies, the reference path).
    Both are bit-identical. ``lut_bits`` switches the activation to a
    2**lut_bits-entry table; correctness tests run the direct sine.
    """
    v = np.asarray(v, dtype=np.float64)
    sub = net.subnet(v.size) if isinstance(net, CppNetWeights) else net
    if v.size != sub.degree:
        raise ValueError(f"input has {v.size} entries, subnetwork expects {sub.degree}")
    if mode not in ("shift", "float"):
        raise ValueError(f"unknown mode {mode!r}")

    table = make_sin_act_table(lut_bits) if lut_bits else None
    act = (lambda x: _sin_act_lut(x, table)) if table is not None else sin_act

    hidden = np.empty(sub.hidden)
    for h in range(sub.hidden):
        acc = 0.0
        for j in range(sub.degree):
            w = int(sub.wa[h, j])
            if w == 0:
                continue
            acc += _shift_mul(v[j], w) if mode == "shift" else float(w) * v[j]
        acc += float(sub.ba[h])
        hidden[h] = act(acc)
    acc = 0.0
    for h in range(sub.hidden):
        w = int(sub.wb[h])
        if w == 0:
            continue
        acc += _shift_mul(hidden[h], w) if mode == "shift" else float(w) * hidden[h]
    acc += float(sub.bb)
    return act(acc)


# ---------------------------------------------------------------------------
# cppnet-v1 weight files


class WeightFormatError(ValueError):
    pass


def save_weights(net):
    """Serialize to cppnet-v1 text (biases written full precision)."""
    blocks = []
    for d in net.degrees():
        sub = net.subnet(d)
        lines = [f"degree {d}", f"hidden {sub.hidden}", "Wa"]
        lines += [" ".join(str(int(w)) for w in row) for row in sub.wa]
        lines += ["ba", " ".join(repr(float(b)) for b in sub.ba)]
        lines += ["wb", " ".join(str(int(w)) for w in sub.wb)]
        lines += ["bb", repr(float(sub.bb))]
        blocks.append("\n".join(lines))
    return MAGIC + "\n" + "\n\n".join(blocks) + "\n"


def load_weights(text):
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != MAGIC:
        raise WeightFormatError(f"bad magic: expected {MAGIC!r}")
    body = [ln for ln in lines[1:] if ln]

    pos = 0

    def expect(keyword):
        nonlocal pos
        if pos >= len(body) or not body[pos].startswith(keyword):
            got = body[pos] if pos < len(body) else "<eof>"
            raise WeightFormatError(f"expected {keyword!r}, got {got!r}")
        parts = body[pos].split()
        pos += 1
        return parts

    def int_row(expected_len, what):
        nonlocal pos
        if pos >= len(body):
            raise WeightFormatError(f"missing {what} row")
        try:
            vals = [int(t) for t in body[pos].split()]
        except ValueError:
            raise WeightFormatError(f"non-integer entry in {what}") from None
        if len(vals) != expected_len:
            raise WeightFormatError(
                f"dimension mismatch: {what} has {len(vals)} entries, expected {expected_len}"
            )
        for w in vals:
            if w not in _VALID_WEIGHTS:
                raise WeightFormatError(f"weight {w} not in {{0, ±2^k}}")
        pos += 1
        return vals

    def float_row(expected_len, what):
        nonlocal pos
        if pos >= len(body):
            raise WeightFormatError(f"missing {what} row")
        try:
            vals = [float(t) for t in body[pos].split()]
        except ValueError:
            raise WeightFormatError(f"non-numeric entry in {what}") from None
        if len(vals) != expected_len:
            raise WeightFormatError(
                f"dimension mismatch: {what} has {len(vals)} entries, expected {expected_len}"
            )
        pos += 1
        return vals

    subs = []
    while pos < len(body):
        parts = expect("degree")
        if len(parts) != 2:
            raise WeightFormatError("malformed degree line")
        d = int(parts[1])
        parts = expect("hidden")
        h = int(parts[1])
        if h != (d + 1) // 2:
            raise WeightFormatError(
                f"dimension mismatch: degree {d} needs hidden {(d + 1) // 2}, file says {h}"
            )
        expect("Wa")
        wa = np.array([int_row(d, "Wa") for _ in range(h)], dtype=np.int64)
        expect("ba")
        ba = np.array(float_row(h, "ba"))
        expect("wb")
        wb = np.array(int_row(h, "wb"), dtype=np.int64)
        expect("bb")
        bb = float_row(1, "bb")[0]
        subs.append(Subnet(degree=d, wa=wa, ba=ba, wb=wb, bb=bb))
    if not subs:
        raise WeightFormatError("file contains no subnetworks")
    return CppNetWeights(subs)


def load_weights_file(path):
    with open(path, "r", encoding="ascii") as fh:
        return load_weights(fh.read())


def save_weights_file(net, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(save_weights(net))


# ---------------------------------------------------------------------------
# projection sample dumps (training data for the trainer package)


@dataclass(frozen=True)
class ProjectionSample:
    degree: int
    features: np.ndarray  # the projected vector, length == degree
    label: float  # converged shift estimate
    k_iters: int  # projection iteration count


def sample_filename(degree):
    return f"samples_d{degree}.csv"


def write_samples(samples, fh, degree):
    """Write one degree's samples as CSV. Rejects iteration counts < 2:
    one-iteration projections carry no shift information."""
    fh.write(",".join([f"v{i+1}" for i in range(degree)] + ["s_hat", "k_iters"]) + "\n")
    for s in samples:
        if s.degree != degree:
            raise ValueError(f"sample has degree {s.degree}, file is for {degree}")
        if s.k_iters < 2:
            raise ValueError(f"sample with k_iters={s.k_iters} < 2 must not be stored")
        feats = ",".join(repr(float(x)) for x in s.features)
        fh.write(f"{feats},{repr(float(s.label))},{int(s.k_iters)}\n")


def read_samples(fh):
    header = fh.readline().strip()
    cols = header.split(",")
    if len(cols) < 4 or cols[-2:] != ["s_hat", "k_iters"]:
        raise ValueError(f"malformed sample header: {header!r}")
    degree = len(cols) - 2
    if cols[:degree] != [f"v{i+1}" for i in range(degree)]:
        raise ValueError(f"malformed sample header: {header!r}")
    out = []
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != degree + 2:
            raise ValueError(f"line {lineno}: expected {degree + 2} fields")
        try:
            feats = np.array([float(t) for t in parts[:degree]])
            label = float(parts[degree])
            k = int(parts[degree + 1])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed row") from None
        if k < 2:
            raise ValueError(f"line {lineno}: k_iters={k} < 2")
        out.append(ProjectionSample(degree=degree, features=feats, label=label, k_iters=k))
    return out


# ---------------------------------------------------------------------------
# packed view for the decode kernels


@dataclass(frozen=True)
class NetPack:
    """Subnetworks stacked into rectangular arrays for the jit kernels."""

    slot_for_degree: np.ndarray  # int64, index by degree, -1 when absent
    wa: np.ndarray  # float64 (n_slots, h_max, d_max)
    ba: np.ndarray  # float64 (n_slots, h_max)
    wb: np.ndarray  # float64 (n_slots, h_max)
    bb: np.ndarray  # float64 (n_slots,)
    muls: np.ndarray  # int64 (n_slots,), per-forward op charge
    adds: np.ndarray  # int64 (n_slots,)


def empty_pack():
    return NetPack(
        slot_for_degree=np.full(1, -1, dtype=np.int64),
        wa=np.zeros((0, 1, 1)),
        ba=np.zeros((0, 1)),
        wb=np.zeros((0, 1)),
        bb=np.zeros(0),
        muls=np.zeros(0, dtype=np.int64),
        adds=np.zeros(0, dtype=np.int64),
    )


def pack(net):
    degrees = net.degrees()
    d_max = max(degrees)
    h_max = max(net.subnet(d).hidden for d in degrees)
    slot_for_degree = np.full(d_max + 1, -1, dtype=np.int64)
    wa = np.zeros((len(degrees), h_max, d_max))
    ba = np.zeros((len(degrees), h_max))
    wb = np.zeros((len(degrees), h_max))
    bb = np.zeros(len(degrees))
    muls = np.zeros(len(degrees), dtype=np.int64)
    adds = np.zeros(len(degrees), dtype=np.int64)
    for slot, d in enumerate(degrees):
        sub = net.subnet(d)
        slot_for_degree[d] = slot
        wa[slot, : sub.hidden, :d] = sub.wa
        ba[slot, : sub.hidden] = sub.ba
        wb[slot, : sub.hidden] = sub.wb
        bb[slot] = sub.bb
        muls[slot], adds[slot] = sub.op_cost()
    return NetPack(slot_for_degree, wa, ba, wb, bb, muls, adds)
