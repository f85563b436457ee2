"""Baseline decoders for BLER comparison: flooding sum-product BP and the
ADMM decoder with a concave distance-from-half penalty (the classic penalized
LP decoding baseline). Both share the projection kernels and report the same
DecodeOutcome shape as the main decoder."""

from dataclasses import dataclass

import numpy as np

from . import _backend
from ._prep import prepare
from .errors import ConfigError, NumericError
from .pdd import DecodeOutcome, ProjStats, _net_pack_for
from .projection import DEFAULT_MAX_ITERS


@dataclass
class BpConfig:
    max_iters: int = 100
    early_exit_on_syndrome: bool = True
    llr_clip: float = 30.0

    def __post_init__(self):
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.llr_clip <= 0:
            raise ConfigError("llr_clip must be positive")


@dataclass
class AdmmL2Config:
    mu: float = 3.0
    alpha: float = 0.8
    max_iters: int = 200
    tol: float = 1e-5
    epsilon_proj: float = 1e-6
    proj_max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if self.mu <= 0:
            raise ConfigError("mu must be positive")
        if self.alpha < 0:
            raise ConfigError("alpha must be >= 0")
        if min(self.tol, self.epsilon_proj) <= 0:
            raise ConfigError("tolerances must be positive")


def _check_llr(code, llr):
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (code.n_vars,):
        raise ConfigError(f"LLR length {llr.shape} does not match code length {code.n_vars}")
    if not np.all(np.isfinite(llr)):
        raise NumericError("non-finite channel LLRs")
    return llr


def decode_bp(code, llr, cfg=None, _prep=None):
    """Flooding sum-product decode (tanh rule, clipped messages).

    max_iters = 0 degenerates to the channel hard decision."""
    cfg = cfg or BpConfig()
    llr = _check_llr(code, llr)
    prep = _prep if _prep is not None else prepare(code)
    bits, converged, iters = _backend.kernels().bp_decode_frame(
        prep, llr, cfg.max_iters, cfg.llr_clip, cfg.early_exit_on_syndrome
    )
    return DecodeOutcome(
        bits=bits, converged=converged, outer_iters=iters, inner_iters_total=iters
    )


def decode_admm_l2(code, llr, cfg=None, net=None, _prep=None, hist=None, collector=None):
    """Penalized ADMM decode; alpha = 0 reduces to plain LP decoding."""
    cfg = cfg or AdmmL2Config()
    llr = _check_llr(code, llr)
    if cfg.mu * int(code.var_degrees.min()) <= 2.0 * cfg.alpha:
        raise ConfigError(
            f"x-subproblem not convex: need mu*min_var_degree > 2*alpha "
            f"(mu={cfg.mu}, alpha={cfg.alpha}, min degree {int(code.var_degrees.min())})"
        )
    pack = _net_pack_for(code, net)
    prep = _prep if _prep is not None else prepare(code)
    out = _backend.kernels().admm_decode_frame(
        prep,
        llr,
        cfg.mu,
        cfg.alpha,
        cfg.max_iters,
        cfg.tol,
        cfg.epsilon_proj,
        cfg.proj_max_iters,
        pack=pack,
        hist=hist,
        collector=collector,
    )
    bits, converged, iters, calls, iter_sum, iter_max, muls, adds, ok = out
    if not ok:
        raise NumericError(
            "numeric failure during decoding (non-finite values or projection cap hit)"
        )
    return DecodeOutcome(
        bits=bits,
        converged=converged,
        outer_iters=iters,
        inner_iters_total=iters,
        proj=ProjStats(calls=calls, iter_sum=iter_sum, iter_max=iter_max, muls=muls, adds=adds),
    )
