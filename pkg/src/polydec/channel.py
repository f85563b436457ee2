"""BPSK over AWGN: modulation, noise, and LLR computation.

Bits map 0 -> +1, 1 -> -1. For noise variance sigma2 the channel LLR of a
received sample y is 2*y/sigma2 (log of the likelihood ratio favouring bit 0).
"""

from dataclasses import dataclass, field

import numpy as np


def sigma2_from_ebn0(ebn0_db, rate):
    """Noise variance for a given Eb/N0 in dB at code rate ``rate``."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float
    seed: int = 0
    sigma2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma2", sigma2_from_ebn0(self.ebn0_db, self.rate))


def frame_rng(seed, *stream_key):
    """Independent deterministic generator for one frame of the simulation.

    Streams are derived from (seed, *stream_key) so frames can be generated
    in any order (or in parallel) and still reproduce byte-identical results.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in stream_key))
    return np.random.default_rng(ss)


def transmit(bits, params, rng):
    """BPSK-modulate ``bits`` and add white Gaussian noise."""
    bits = np.asarray(bits)
    symbols = 1.0 - 2.0 * bits
    return symbols + rng.normal(0.0, np.sqrt(params.sigma2), size=bits.shape)


def llr(y, sigma2):
    """Channel LLRs for BPSK observations ``y`` with noise variance sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    v = 2.0 * np.asarray(y, dtype=np.float64) / sigma2
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite LLR")
    return v
