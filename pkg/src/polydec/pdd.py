"""Penalty-dual-decomposition decoder.

Outer loop: dual-variable and penalty updates. Inner loop: block coordinate
descent over the relaxed bits x, the per-check copies z, and the auxiliary
x_hat enforcing x (x_hat - 1) = 0 and x = x_hat; each block has a closed-form
minimizer. The per-frame hot loop lives in the kernel backends; the block
updates here are the reference implementations used by the decoder tests.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend, cppnet
from ._prep import prepare
from .code_model import syndrome_ok
from .errors import ConfigError, NumericError
from .projection import DEFAULT_MAX_ITERS, project_icpp, project_ncpp

PROJECTORS = ("icpp", "ncpp")


@dataclass
class PddConfig:
    # defaults tuned on the bundled (96,48) code at 3 dB: slow penalty growth
    # with a generous outer budget decodes best; fast growth freezes x early
    mu0: float = 1.0
    c: float = 1.02  # penalty growth per outer iteration
    max_outer: int = 150
    max_inner: int = 50
    tol_inner: float = 1e-5
    tol_feas: float = 1e-5
    epsilon_proj: float = 1e-6
    projector: str = "icpp"
    proj_max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if self.mu0 <= 0:
            raise ConfigError("mu0 must be positive")
        if self.c < 1.0:
            raise ConfigError("penalty growth factor c must be >= 1")
        if min(self.tol_inner, self.tol_feas, self.epsilon_proj) <= 0:
            raise ConfigError("tolerances must be positive")
        if self.projector not in PROJECTORS:
            raise ConfigError(f"projector must be one of {PROJECTORS}")


@dataclass
class PddState:
    x: np.ndarray
    x_hat: np.ndarray
    z: np.ndarray  # flat over edges, row-major by check
    y_dual: np.ndarray  # flat over edges
    w_dual: np.ndarray
    eta_dual: np.ndarray
    mu: float
    alpha: np.ndarray = None  # coupling term, refreshed by update_x

    @classmethod
    def initial(cls, code, mu0):
        n, nnz = code.n_vars, code.nnz
        return cls(
            x=np.full(n, 0.5),
            x_hat=np.full(n, 0.5),
            z=np.zeros(nnz),
            y_dual=np.zeros(nnz),
            w_dual=np.zeros(n),
            eta_dual=np.zeros(n),
            mu=float(mu0),
            alpha=np.zeros(n),
        )

    def z_blocks(self, code):
        return [self.z[code.row_ptr[j] : code.row_ptr[j + 1]] for j in range(code.n_checks)]


@dataclass
class ProjStats:
    calls: int = 0
    iter_sum: int = 0
    iter_max: int = 0
    muls: int = 0
    adds: int = 0

    @property
    def mean_iters(self):
        return self.iter_sum / self.calls if self.calls else 0.0

    @property
    def mean_muls(self):
        return self.muls / self.calls if self.calls else 0.0

    @property
    def mean_adds(self):
        return self.adds / self.calls if self.calls else 0.0


@dataclass
class DecodeOutcome:
    bits: np.ndarray
    converged: bool
    outer_iters: int
    inner_iters_total: int
    proj: ProjStats = field(default_factory=ProjStats)


def compute_alpha(state, code):
    """Coupling of the per-check duals and copies back onto the variables."""
    state.alpha = 0.5 * state.mu * np.bincount(
        code.col_idx, weights=state.y_dual / state.mu - state.z, minlength=code.n_vars
    )
    return state.alpha


def update_x(state, code, llr):
    """Exact minimizer of the x block: per-variable clamped quadratic.

    Returns the max absolute change."""
    mu = state.mu
    alpha = compute_alpha(state, code)
    a = 0.5 * mu * (code.var_degrees + (state.x_hat - 1.0) ** 2 + 1.0)
    assert np.all(a > 0)
    b = llr + 2.0 * alpha + state.w_dual * (state.x_hat - 1.0) + state.eta_dual - mu * state.x_hat
    x_new = np.clip(-b / (2.0 * a), 0.0, 1.0)
    change = float(np.abs(x_new - state.x).max())
    state.x = x_new
    return change


def update_z(state, code, net=None, epsilon=None, max_iters=DEFAULT_MAX_ITERS):
    """Project each check's view of x (plus its scaled dual) onto its parity
    polytope. Returns (max change, per-check iteration counts, shift sums)."""
    epsilon = 1e-6 if epsilon is None else epsilon
    change = 0.0
    iters = np.zeros(code.n_checks, dtype=np.int64)
    shifts = np.zeros(code.n_checks)
    for j, row in enumerate(code.check_rows):
        lo, hi = code.row_ptr[j], code.row_ptr[j + 1]
        vin = state.x[row] + state.y_dual[lo:hi] / state.mu
        if net is None:
            res = project_icpp(vin, epsilon, max_iters)
        else:
            res = project_ncpp(vin, epsilon, net, max_iters)
        change = max(change, float(np.abs(res.r - state.z[lo:hi]).max()))
        state.z[lo:hi] = res.r
        iters[j] = res.iterations
        shifts[j] = res.s_total
    return change, iters, shifts


def update_x_hat(state, printed_form=False):
    """Exact minimizer of the auxiliary block (stationary point of its
    decoupled quadratic). ``printed_form`` switches to the reciprocal-shaped
    variant kept for comparison only; it is not used by the decoder."""
    mu, x = state.mu, state.x
    if printed_form:
        with np.errstate(divide="ignore", invalid="ignore"):
            xh_new = -(mu * (x * x + 1.0)) / (
                4.0 * ((state.w_dual - mu * x) * x - (state.eta_dual + mu * x))
            )
    else:
        xh_new = (mu * (x * x + x) - state.w_dual * x + state.eta_dual) / (
            mu * (x * x + 1.0)
        )
    change = float(np.abs(xh_new - state.x_hat).max())
    state.x_hat = xh_new
    return change


def update_duals(state, code, c=1.0):
    """Gradient-ascent dual step followed by the penalty growth mu <- c*mu."""
    mu = state.mu
    state.y_dual += mu * (state.x[code.col_idx] - state.z)
    state.w_dual += mu * state.x * (state.x_hat - 1.0)
    state.eta_dual += mu * (state.x - state.x_hat)
    state.mu = c * mu


def feasibility_residual(state, code):
    return max(
        float(np.abs(state.x[code.col_idx] - state.z).max()),
        float(np.abs(state.x * (state.x_hat - 1.0)).max()),
        float(np.abs(state.x - state.x_hat).max()),
    )


def augmented_objective(state, code, llr):
    """Value of the penalized objective at the current state."""
    mu = state.mu
    cons = state.x[code.col_idx] - state.z + state.y_dual / mu
    per_var = (state.x * (state.x_hat - 1.0) + state.w_dual / mu) ** 2 + (
        state.x - state.x_hat + state.eta_dual / mu
    ) ** 2
    return float(llr @ state.x + 0.5 * mu * (cons @ cons + per_var.sum()))


def hard_decision(x):
    """Threshold at 0.5; exact ties resolve to bit 0."""
    return (np.asarray(x) > 0.5).astype(np.uint8)


def _net_pack_for(code, net):
    if net is None:
        return None
    if isinstance(net, cppnet.CppNetWeights):
        missing = [d for d in set(int(x) for x in code.check_degrees) if d not in net]
        if missing:
            raise ConfigError(f"net lacks subnetworks for check degrees {sorted(missing)}")
        return cppnet.pack(net)
    return net


def decode(code, llr, cfg=None, net=None, _prep=None, hist=None, collector=None):
    """Decode one frame; returns a DecodeOutcome.

    ``hist`` (int64 array) accumulates the per-call projection iteration
    histogram; ``collector`` gathers training samples. Both are optional and
    shared across calls by the benchmark harness.
    """
    cfg = cfg or PddConfig()
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (code.n_vars,):
        raise ConfigError(f"LLR length {llr.shape} does not match code length {code.n_vars}")
    if not np.all(np.isfinite(llr)):
        raise NumericError("non-finite channel LLRs")
    if cfg.projector == "ncpp":
        if net is None:
            raise ConfigError("projector 'ncpp' needs a weights file")
        pack = _net_pack_for(code, net)
    else:
        pack = None

    prep = _prep if _prep is not None else prepare(code)
    out = _backend.kernels().pdd_decode_frame(
        prep,
        llr,
        cfg.mu0,
        cfg.c,
        cfg.tol_inner,
        cfg.tol_feas,
        cfg.epsilon_proj,
        cfg.max_inner,
        cfg.max_outer,
        cfg.proj_max_iters,
        pack=pack,
        hist=hist,
        collector=collector,
    )
    bits, converged, outer, inner_total, calls, iter_sum, iter_max, muls, adds, ok = out
    if not ok:
        raise NumericError(
            "numeric failure during decoding (non-finite values or projection cap hit)"
        )
    if converged:
        assert syndrome_ok(code, bits)
    return DecodeOutcome(
        bits=bits,
        converged=converged,
        outer_iters=outer,
        inner_iters_total=inner_total,
        proj=ProjStats(calls=calls, iter_sum=iter_sum, iter_max=iter_max, muls=muls, adds=adds),
    )
