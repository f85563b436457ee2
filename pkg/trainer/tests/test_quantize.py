import numpy as np
import pytest

from cppnet_trainer.model import Net, init_net
from cppnet_trainer.quantize import finetune_biases, quantize_net, quantize_weight
from cppnet_trainer.training import TrainConfig
from cppnet_trainer.weights_io import parse, render
from test_training import synth_samples


@pytest.mark.parametrize(
    "w,q",
    [
        (0.9, 1),
        (1.6, 2),
        (0.2, 0),  # below the 0.5 zero threshold
        (-3.1, -4),  # distance 0.9 to -4 beats 1.1 to -2
        (0.5, 1),
        (-0.49999, 0),
        (1.5, 1),  # exact tie resolves toward the smaller power
        (300.0, 128),  # clamped at the exponent cap
        (-1000.0, -128),
    ],
)
def test_quantize_weight(w, q):
    assert quantize_weight(w) == q


def test_quantizer_idempotent():
    rng = np.random.default_rng(0)
    net = init_net(6, rng)
    net.wa *= 10.0
    q1 = quantize_net(net)
    q2 = quantize_net(Net(q1.wa.astype(float), q1.ba, q1.wb.astype(float), q1.bb))
    assert np.array_equal(q1.wa, q2.wa)
    assert np.array_equal(q1.wb, q2.wb)


def test_quantized_net_serializes():
    rng = np.random.default_rng(1)
    q = quantize_net(init_net(5, rng))
    text = render({5: q})
    again = parse(text)[5]
    assert np.array_equal(again.wa, q.wa)
    assert np.array_equal(again.ba, q.ba)
    assert again.bb == q.bb


def test_render_rejects_unquantized():
    rng = np.random.default_rng(2)
    with pytest.raises(ValueError, match="not quantized"):
        render({6: init_net(6, rng)})


def test_zero_net_replay_still_converges():
    # a constant-0.5 predictor changes iteration counts, never correctness
    rng = np.random.default_rng(9)
    from cppnet_trainer.replay import mean_iterations
    from test_training import synth_samples

    samples = synth_samples(200, 6, rng)
    zero = Net(np.zeros((3, 6), dtype=np.int64), np.zeros(3), np.zeros(3, dtype=np.int64), 0.0)
    mean_cold, _ = mean_iterations(samples)
    mean_zero, _ = mean_iterations(samples, net=zero)
    assert mean_cold > 0 and mean_zero > 0  # report only, no ordering claim


def test_finetune_improves_frozen_weight_loss():
    rng = np.random.default_rng(3)
    samples = synth_samples(3000, 6, rng)
    cfg = TrainConfig(learning_rate=3e-3, epochs=60, batch_size=256, seed=4)
    from cppnet_trainer.training import evaluate_loss, train

    net, _ = train(samples, cfg)
    qnet = quantize_net(net)

    def as_float(n):
        return Net(n.wa.astype(float), n.ba, n.wb.astype(float), n.bb)

    before = evaluate_loss(as_float(qnet), samples, cfg.kappa)
    tuned, _ = finetune_biases(qnet, samples, cfg)
    after = evaluate_loss(as_float(tuned), samples, cfg.kappa)
    assert after <= before
    assert np.array_equal(tuned.wa, qnet.wa)  # weights stayed frozen
