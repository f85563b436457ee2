"""Training loop: Adam on the asymmetric shift loss.

Per sample the loss is (s_hat - s_tilde) + kappa*(s_hat - s_tilde)^2: the
squared term fits the label, the linear term tilts the fit so the net prefers
overshooting the true shift (overshoot costs fewer downstream iterations than
undershoot)."""

from dataclasses import dataclass

import numpy as np

from .model import backward, forward, init_net


MIN_TRAIN_SAMPLES = 1000


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    kappa: float = 4.0
    epochs: int = 200
    batch_size: int = 256
    seed: int = 0
    exponent_cap: int = 7
    zero_threshold: float = 0.5
    finetune_budget: float = 0.0  # tolerated validation-loss rise after finetuning

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")


def loss_value(pred, labels, kappa):
    diff = labels - pred
    return float(np.mean(diff + kappa * diff * diff))


def loss_grad_wrt_pred(pred, labels, kappa):
    """d(mean loss)/d(pred) per sample, including the 1/n factor."""
    diff = labels - pred
    return (-1.0 - 2.0 * kappa * diff) / labels.size


class Adam:
    def __init__(self, shapes, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros(s) for k, s in shapes.items()}
        self.v = {k: np.zeros(s) for k, s in shapes.items()}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        out = {}
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g
            out[k] = params[k] - self.lr * (self.m[k] / b1c) / (
                np.sqrt(self.v[k] / b2c) + self.eps
            )
        return out


def _apply(net, params):
    net.wa = params["wa"]
    net.ba = params["ba"]
    net.wb = params["wb"]
    net.bb = float(params["bb"])


def train(samples, cfg, net=None, trainable=("wa", "ba", "wb", "bb"), log=None):
    """Train (or finetune, via ``trainable``) on one degree's sample set.

    Returns (net, history); raises on divergence."""
    if len(samples) < MIN_TRAIN_SAMPLES:
        raise ValueError(
            f"need at least {MIN_TRAIN_SAMPLES} samples to fit a net, got {len(samples)}"
        )
    rng = np.random.default_rng(cfg.seed)
    if net is None:
        net = init_net(samples.degree, rng)
    else:
        net = net.copy()
    feats, labels = samples.features, samples.labels
    shapes = {k: np.shape(v) for k, v in net.params().items() if k in trainable}
    opt = Adam(shapes, cfg.learning_rate)
    history = []
    n = len(samples)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            pred, cache = forward(net, feats[idx])
            epoch_loss += loss_value(pred, labels[idx], cfg.kappa) * idx.size
            grads = backward(net, cache, loss_grad_wrt_pred(pred, labels[idx], cfg.kappa))
            grads = {k: g for k, g in grads.items() if k in trainable}
            params = {k: v for k, v in net.params().items() if k in trainable}
            _apply(net, {**net.params(), **opt.step(params, grads)})
        epoch_loss /= n
        if not np.isfinite(epoch_loss):
            raise FloatingPointError(f"training diverged at epoch {epoch}: loss {epoch_loss}")
        history.append(epoch_loss)
        if log and (epoch % 20 == 0 or epoch == cfg.epochs - 1):
            log(f"epoch {epoch:4d}: loss {epoch_loss:.6f}")
    return net, history


def evaluate_loss(net, samples, kappa):
    pred, _ = forward(net, samples.features)
    return loss_value(pred, samples.labels, kappa)
