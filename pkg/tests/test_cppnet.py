import io
import math

import numpy as np
import pytest

from polydec.cppnet import (
    CppNetWeights,
    ProjectionSample,
    Subnet,
    WeightFormatError,
    forward,
    load_weights,
    make_sin_act_table,
    pack,
    read_samples,
    save_weights,
    sin_act,
    write_samples,
)
from polydec._kernels_numba import _net_forward


def zero_net(d=6, bb=0.0):
    h = (d + 1) // 2
    return Subnet(
        degree=d,
        wa=np.zeros((h, d), dtype=np.int64),
        ba=np.zeros(h),
        wb=np.zeros(h, dtype=np.int64),
        bb=bb,
    )


EXAMPLE_WA = np.array(
    [[0, 0, 0, -2, 0, 0], [0, 0, 0, -2, 0, 0], [1, 1, -1, 0, 0, 0]], dtype=np.int64
)
EXAMPLE_WB = np.array([-1, 1, 0], dtype=np.int64)


def example_net(ba=None, bb=0.0):
    return CppNetWeights(
        [
            Subnet(
                degree=6,
                wa=EXAMPLE_WA,
                ba=np.zeros(3) if ba is None else np.asarray(ba, dtype=float),
                wb=EXAMPLE_WB,
                bb=bb,
            )
        ]
    )


def test_sin_act_values():
    assert sin_act(0.0) == 0.5
    assert sin_act(1.0) == 1.0
    assert sin_act(-1.0) == 0.0
    assert sin_act(5.0) == 1.0
    assert sin_act(-5.0) == 0.0
    assert sin_act(0.5) == pytest.approx((math.sqrt(2) / 2 + 1) / 2, abs=1e-12)


def test_sin_act_monotone_and_continuous():
    xs = np.linspace(-2, 2, 4001)
    ys = np.array([sin_act(x) for x in xs])
    assert np.all(np.diff(ys) >= 0)
    # branch values agree at the clip points
    assert sin_act(-1.0) == 0.0 and sin_act(-1.0 - 1e-15) == 0.0
    assert sin_act(1.0) == 1.0 and sin_act(1.0 + 1e-15) == 1.0


def test_forward_zero_net():
    out = forward(zero_net(), np.linspace(-1, 2, 6))
    assert out == 0.5  # hidden all 0.5, output sin_act(0)


def test_forward_saturated_bias():
    assert forward(zero_net(bb=2.0), np.random.default_rng(0).normal(size=6)) == 1.0


def test_forward_range():
    rng = np.random.default_rng(1)
    net = example_net(ba=rng.normal(size=3), bb=float(rng.normal()))
    for _ in range(200):
        out = forward(net, rng.uniform(-2, 2, 6))
        assert 0.0 <= out <= 1.0


def test_shift_and_float_paths_bit_identical():
    rng = np.random.default_rng(2)
    choices = np.array([0, 1, -1, 2, -2, 4, -4])
    for _ in range(20):
        d = int(rng.integers(2, 9))
        h = (d + 1) // 2
        sub = Subnet(
            degree=d,
            wa=choices[rng.integers(0, len(choices), size=(h, d))],
            ba=rng.normal(size=h),
            wb=choices[rng.integers(0, len(choices), size=h)],
            bb=float(rng.normal()),
        )
        for _ in range(500):
            v = rng.uniform(-3, 3, d)
            assert forward(sub, v, mode="shift") == forward(sub, v, mode="float")


def test_kernel_forward_matches_reference():
    rng = np.random.default_rng(3)
    net = example_net(ba=rng.normal(size=3), bb=0.25)
    packed = pack(net)
    for _ in range(200):
        v = rng.uniform(-2, 2, 6)
        kern = _net_forward(packed.wa, packed.ba, packed.wb, packed.bb, 0, v, 6)
        assert kern == forward(net, v, mode="float")


def test_lut_mode_close_to_direct():
    rng = np.random.default_rng(4)
    net = example_net(ba=rng.normal(size=3), bb=0.1)
    table = make_sin_act_table(10)
    assert table.size == 1024
    for _ in range(50):
        v = rng.uniform(-2, 2, 6)
        direct = forward(net, v)
        lut = forward(net, v, lut_bits=10)
        assert abs(direct - lut) < 5e-3


def test_weight_round_trip():
    rng = np.random.default_rng(5)
    net = CppNetWeights(
        [
            Subnet(
                degree=6,
                wa=EXAMPLE_WA,
                ba=rng.normal(size=3),
                wb=EXAMPLE_WB,
                bb=float(rng.normal()),
            ),
            Subnet(
                degree=7,
                wa=np.full((4, 7), 128, dtype=np.int64),
                ba=rng.normal(size=4),
                wb=np.array([0, 1, -128, 2], dtype=np.int64),
                bb=-0.125,
            ),
        ]
    )
    again = load_weights(save_weights(net))
    assert again == net
    assert save_weights(again) == save_weights(net)


def test_published_example_weights_load():
    text = "\n".join(
        [
            "cppnet-v1",
            "degree 6",
            "hidden 3",
            "Wa",
            "0 0 0 -2 0 0",
            "0 0 0 -2 0 0",
            "1 1 -1 0 0 0",
            "ba",
            "0.0 0.0 0.0",
            "wb",
            "-1 1 0",
            "bb",
            "0.0",
            "",
        ]
    )
    net = load_weights(text)
    sub = net.subnet(6)
    assert np.array_equal(sub.wa, EXAMPLE_WA)
    assert np.array_equal(sub.wb, EXAMPLE_WB)
    assert sub.op_cost() == (2, 7)


def test_weight_validation():
    with pytest.raises(WeightFormatError, match="bad magic"):
        load_weights("cppnet-v2\n")
    good = save_weights(example_net())
    with pytest.raises(WeightFormatError, match="not in"):
        load_weights(good.replace("0 0 0 -2 0 0", "0 0 0 3 0 0", 1))
    with pytest.raises(WeightFormatError, match="hidden"):
        load_weights(good.replace("hidden 3", "hidden 2"))
    with pytest.raises(ValueError, match="not in"):
        CppNetWeights([Subnet(6, np.full((3, 6), 256, dtype=np.int64), np.zeros(3), EXAMPLE_WB, 0.0)])


def test_sample_round_trip():
    rng = np.random.default_rng(6)
    samples = [
        ProjectionSample(degree=4, features=rng.uniform(-1, 2, 4), label=float(rng.random()), k_iters=int(k))
        for k in rng.integers(2, 40, size=50)
    ]
    buf = io.StringIO()
    write_samples(samples, buf, 4)
    buf.seek(0)
    again = read_samples(buf)
    assert len(again) == len(samples)
    for a, b in zip(samples, again):
        assert np.array_equal(a.features, b.features)  # exact: repr round-trip
        assert a.label == b.label and a.k_iters == b.k_iters


def test_sample_k1_rejected_at_write():
    bad = [ProjectionSample(degree=3, features=np.zeros(3), label=0.1, k_iters=1)]
    with pytest.raises(ValueError, match="k_iters=1"):
        write_samples(bad, io.StringIO(), 3)


def test_sample_empty_file():
    buf = io.StringIO()
    write_samples([], buf, 5)
    assert buf.getvalue() == "v1,v2,v3,v4,v5,s_hat,k_iters\n"
    buf.seek(0)
    assert read_samples(buf) == []


def test_sample_malformed_rows():
    with pytest.raises(ValueError, match="header"):
        read_samples(io.StringIO("a,b,c\n"))
    ok = "v1,v2,s_hat,k_iters\n0.1,0.2,0.3,2\n"
    assert len(read_samples(io.StringIO(ok))) == 1
    with pytest.raises(ValueError, match="line 2"):
        read_samples(io.StringIO("v1,v2,s_hat,k_iters\n0.1,0.2,0.3\n"))
    with pytest.raises(ValueError, match="k_iters=1"):
        read_samples(io.StringIO("v1,v2,s_hat,k_iters\n0.1,0.2,0.3,1\n"))


def test_pack_slots():
    rng = np.random.default_rng(7)
    net = CppNetWeights(
        [
            Subnet(6, EXAMPLE_WA, rng.normal(size=3), EXAMPLE_WB, 0.5),
            Subnet(
                3,
                np.array([[1, -1, 0], [0, 2, 0]], dtype=np.int64),
                rng.normal(size=2),
                np.array([1, -1], dtype=np.int64),
                0.0,
            ),
        ]
    )
    packed = pack(net)
    assert packed.slot_for_degree[3] >= 0 and packed.slot_for_degree[6] >= 0
    assert packed.slot_for_degree[4] == -1 and packed.slot_for_degree[5] == -1
    s6 = packed.slot_for_degree[6]
    assert packed.muls[s6] == 2 and packed.adds[s6] == 7
