"""Euclidean projection onto the check polytope (even-parity hull).

A point in the unit box can violate at most one parity facet: the assistant
hyperplane theta^T r <= p built from the signs of v - 0.5. The iterative
projection shifts v along theta by the running coefficient eta until the
violation falls below epsilon; the neural variant warm-starts the shift from
the CPP-net prediction. ``project_oracle`` is an independent bisection on the
same facet, used by the tests as ground truth.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend, cppnet
from .errors import ConfigError, ProjectionError

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_ITERS = 10_000
ORACLE_TOL = 1e-10


def box_project(v):
    """Componentwise clamp to [0, 1]."""
    return np.clip(np.asarray(v, dtype=np.float64), 0.0, 1.0)


@dataclass(frozen=True)
class CutHyperplane:
    theta: np.ndarray  # entries in {-1, +1}
    p: int


@dataclass(frozen=True)
class ProjectionResult:
    r: np.ndarray
    iterations: int  # loop passes; 0 when the input already satisfies the cut
    used_net: bool
    s_total: float


def build_cut(v):
    """Assistant hyperplane for ``v``: theta_i = sgn(v_i - 0.5) with sgn(0) = +1,
    one sign flipped at the entry nearest 0.5 (lowest index on ties) when the
    positive count is even, and p = |{theta_i = +1}| - 1."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a vector of length >= 2")
    theta = np.where(v >= 0.5, 1, -1).astype(np.int8)
    npos = int((theta > 0).sum())
    if npos % 2 == 0:
        i = int(np.argmin(np.abs(v - 0.5)))
        theta[i] = -theta[i]
        npos += 1 if theta[i] > 0 else -1
    return CutHyperplane(theta=theta, p=npos - 1)


def _check_input(v, epsilon):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a vector of length >= 2")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return v


def project_icpp(v, epsilon=DEFAULT_EPSILON, max_iters=DEFAULT_MAX_ITERS):
    """Iterative check-polytope projection (zero warm start)."""
    v = _check_input(v, epsilon)
    r, iters, s_tot, used, conv = _backend.kernels().project_single(
        v, epsilon, max_iters, None
    )
    if not conv:
        raise ProjectionError(f"projection did not converge within {max_iters} iterations")
    return ProjectionResult(r=r, iterations=iters, used_net=used, s_total=s_tot)


def project_ncpp(v, epsilon, net, max_iters=DEFAULT_MAX_ITERS):
    """Projection warm-started from the net's shift estimate.

    The membership short-circuit never evaluates the net; a missing
    subnetwork for this degree is a configuration error.
    """
    v = _check_input(v, epsilon)
    if isinstance(net, cppnet.CppNetWeights):
        if v.size not in net:
            raise ConfigError(f"no subnetwork for check degree {v.size}")
        pack = cppnet.pack(net)
    else:
        pack = net
        d = v.size
        if d >= pack.slot_for_degree.size or pack.slot_for_degree[d] < 0:
            raise ConfigError(f"no subnetwork for check degree {d}")
    r, iters, s_tot, used, conv = _backend.kernels().project_single(
        v, epsilon, max_iters, pack
    )
    if not conv:
        raise ProjectionError(f"projection did not converge within {max_iters} iterations")
    return ProjectionResult(r=r, iterations=iters, used_net=used, s_total=s_tot)


def project_oracle(v, tol=ORACLE_TOL):
    """Exact projection via monotone bisection on the facet violation.

    g(s) = theta^T clamp(v - s*theta) - p is piecewise linear and
    non-increasing for s >= 0; the root is the KKT multiplier of the single
    active cut. Independent of the iterative path, and run at a tolerance
    well below the decoder's epsilon.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=np.float64)
    cut = build_cut(v)
    theta = cut.theta.astype(np.float64)
    p = float(cut.p)

    def g(s):
        return float(theta @ np.clip(v - s * theta, 0.0, 1.0) - p)

    if g(0.0) <= 0.0:
        return np.clip(v, 0.0, 1.0)
    hi = 1.0
    for _ in range(200):
        if g(hi) <= 0.0:
            break
        hi *= 2.0
    lo = 0.0
    mid = hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            break
        if gm > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-18 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            break
    return np.clip(v - mid * theta, 0.0, 1.0)
