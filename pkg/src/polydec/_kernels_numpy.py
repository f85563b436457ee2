"""Pure-numpy kernel backend (vectorized fallback path).

Same contracts as _kernels_numba; selected via POLYDEC_BACKEND=numpy. Checks
of equal degree are batched so the projection loop runs over whole groups
with an active-row mask.
"""

import numpy as np

_TANH_PROD_CLIP = 1.0 - 1e-12


def _sin_act(x):
    return np.where(
        x < -1.0, 0.0, np.where(x > 1.0, 1.0, 0.5 * (np.sin(0.5 * np.pi * x) + 1.0))
    )


def _cut_batch(v):
    """Assistant hyperplanes for a batch of rows: returns (theta, p)."""
    theta = np.where(v >= 0.5, 1.0, -1.0)
    npos = (theta > 0).sum(axis=1)
    even = np.nonzero(npos % 2 == 0)[0]
    if even.size:
        flip = np.argmin(np.abs(v[even] - 0.5), axis=1)  # first index on ties
        theta[even, flip] = -theta[even, flip]
        npos[even] += np.where(theta[even, flip] > 0, 1, -1)
    return theta, (npos - 1).astype(np.float64)


def _net_batch(pack, slot, v):
    d = v.shape[1]
    h = (d + 1) // 2
    hid = _sin_act(v @ pack.wa[slot, :h, :d].T + pack.ba[slot, :h])
    return _sin_act(hid @ pack.wb[slot, :h] + pack.bb[slot])


def project_batch(v, eps, cap, pack=None, slot=-1):
    """Project each row of ``v`` onto the even-parity polytope of its length.

    Returns (r, iters, s_total, used_net, converged); ``v`` is not modified.
    ``iters`` counts loop passes only (0 on the membership short-circuit).
    """
    v = np.asarray(v, dtype=np.float64)
    n, d = v.shape
    if pack is not None and slot < 0:
        slot = int(pack.slot_for_degree[d]) if d < pack.slot_for_degree.size else -1
    theta, p = _cut_batch(v)
    u = np.clip(v, 0.0, 1.0)
    eta0 = ((theta * u).sum(axis=1) - p) / d

    r = u
    iters = np.zeros(n, dtype=np.int64)
    s_tot = np.zeros(n)
    conv = np.ones(n, dtype=bool)
    active = eta0 >= eps  # signed membership test
    used_net = np.zeros(n, dtype=bool)
    if not active.any():
        return r, iters, s_tot, used_net, conv

    eta_k = np.zeros(n)
    if pack is not None:
        rows = np.nonzero(active)[0]
        eta_k[rows] = _net_batch(pack, slot, v[rows])
        used_net[rows] = True
    work = v.copy()
    while active.any():
        rows = np.nonzero(active)[0]
        work[rows] -= eta_k[rows, None] * theta[rows]
        s_tot[rows] += eta_k[rows]
        u_rows = np.clip(work[rows], 0.0, 1.0)
        iters[rows] += 1
        eta_rows = ((theta[rows] * u_rows).sum(axis=1) - p[rows]) / d
        done = np.abs(eta_rows) < eps
        r[rows[done]] = u_rows[done]
        active[rows[done]] = False
        eta_k[rows[~done]] = eta_rows[~done]
        hit_cap = rows[~done][iters[rows[~done]] >= cap]
        if hit_cap.size:
            r[hit_cap] = np.clip(work[hit_cap], 0.0, 1.0)
            conv[hit_cap] = False
            active[hit_cap] = False
    return r, iters, s_tot, used_net, conv


def project_single(v, eps, cap, pack=None):
    v = np.asarray(v, dtype=np.float64).reshape(1, -1)
    slot = -1
    if pack is not None:
        d = v.shape[1]
        slot = int(pack.slot_for_degree[d]) if d < pack.slot_for_degree.size else -1
    r, k, s, used, conv = project_batch(v, eps, cap, pack, slot)
    return r[0], int(k[0]), float(s[0]), bool(used[0]), bool(conv[0])


class _Stats:
    __slots__ = ("calls", "iter_sum", "iter_max", "muls", "adds")

    def __init__(self):
        self.calls = 0
        self.iter_sum = 0
        self.iter_max = 0
        self.muls = 0
        self.adds = 0


def _z_sweep(prep, x, y_dual, z, inv_mu, eps, cap, pack, stats, hist, collector):
    """One block update of all per-check projection variables.

    Returns (max |z change|, all projections converged). Iteration counts are
    reported with the membership short-circuit counted as a single evaluation.
    """
    dz = 0.0
    ok = True
    for g in prep.groups:
        d = g.degree
        slot = -1
        if pack is not None:
            slot = int(pack.slot_for_degree[d]) if d < pack.slot_for_degree.size else -1
        vin = x[g.var_ix] + y_dual[g.edge_ix] * inv_mu
        r, k, s, used, conv = project_batch(vin, eps, cap, pack, slot)
        ok = ok and bool(conv.all())
        old = z[g.edge_ix]
        if old.size:
            dz = max(dz, float(np.abs(r - old).max()))
        z[g.edge_ix.ravel()] = r.ravel()

        kp = np.maximum(k, 1)
        stats.calls += kp.size
        stats.iter_sum += int(kp.sum())
        stats.iter_max = max(stats.iter_max, int(kp.max()))
        stats.muls += int(3 * d * kp.sum())
        stats.adds += int(2 * d * kp.sum())
        if pack is not None and used.any():
            n_used = int(used.sum())
            stats.muls += n_used * int(pack.muls[slot])
            stats.adds += n_used * int(pack.adds[slot])
        if hist is not None:
            np.add.at(hist, np.minimum(kp, hist.size - 1), 1)
        if collector is not None:
            collector.add_batch(d, vin, s, kp)
    return dz, ok


def pdd_decode_frame(
    prep,
    llr,
    mu0,
    growth,
    tol_inner,
    tol_feas,
    eps,
    max_inner,
    max_outer,
    cap,
    pack=None,
    hist=None,
    collector=None,
):
    """Full penalty-dual-decomposition decode of one frame.

    Returns (bits, converged, outer_iters, inner_total, calls, iter_sum,
    iter_max, muls, adds, ok).
    """
    n, nnz = prep.n_vars, int(prep.row_ptr[-1])
    x = np.full(n, 0.5)
    x_hat = np.full(n, 0.5)
    z = np.zeros(nnz)
    y_dual = np.zeros(nnz)
    w_dual = np.zeros(n)
    eta_dual = np.zeros(n)
    mu = float(mu0)
    stats = _Stats()
    ok = True
    outer = 0
    inner_total = 0
    bits = np.zeros(n, dtype=np.uint8)

    for _ in range(max_outer):
        outer += 1
        for _ in range(max_inner):
            inner_total += 1
            # coupling term folding the per-check duals back onto variables
            alpha = 0.5 * mu * np.bincount(
                prep.col_idx, weights=y_dual / mu - z, minlength=n
            )
            a = 0.5 * mu * (prep.var_deg + (x_hat - 1.0) ** 2 + 1.0)
            b = llr + 2.0 * alpha + w_dual * (x_hat - 1.0) + eta_dual - mu * x_hat
            x_new = np.clip(-b / (2.0 * a), 0.0, 1.0)
            dx = float(np.abs(x_new - x).max())
            x = x_new

            dz, conv = _z_sweep(
                prep, x, y_dual, z, 1.0 / mu, eps, cap, pack, stats, hist, collector
            )
            ok = ok and conv

            xh_new = (mu * (x * x + x) - w_dual * x + eta_dual) / (mu * (x * x + 1.0))
            dxh = float(np.abs(xh_new - x_hat).max())
            x_hat = xh_new

            change = max(dx, dz, dxh)
            if not np.isfinite(change):
                ok = False
                break
            if change < tol_inner:
                break
        if not ok:
            break

        bits = (x > 0.5).astype(np.uint8)
        parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
        if not np.any(parity % 2):
            return bits, True, outer, inner_total, stats.calls, stats.iter_sum, stats.iter_max, stats.muls, stats.adds, ok

        res = max(
            float(np.abs(x[prep.col_idx] - z).max()),
            float(np.abs(x * (x_hat - 1.0)).max()),
            float(np.abs(x - x_hat).max()),
        )
        if res < tol_feas:
            break

        y_dual += mu * (x[prep.col_idx] - z)
        w_dual += mu * x * (x_hat - 1.0)
        eta_dual += mu * (x - x_hat)
        mu *= growth

    bits = (np.nan_to_num(x, nan=0.0) > 0.5).astype(np.uint8)
    parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
    converged = not np.any(parity % 2)
    return bits, bool(converged), outer, inner_total, stats.calls, stats.iter_sum, stats.iter_max, stats.muls, stats.adds, ok


def bp_decode_frame(prep, llr, max_iters, clip, early_exit=True):
    """Flooding sum-product decode. Returns (bits, converged, iters)."""
    n = prep.n_vars
    tot = np.asarray(llr, dtype=np.float64)
    bits = (tot < 0).astype(np.uint8)
    if max_iters == 0:
        parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
        return bits, not np.any(parity % 2), 0

    nnz = int(prep.row_ptr[-1])
    m_v2c = np.clip(llr[prep.col_idx], -clip, clip)
    m_c2v = np.zeros(nnz)
    iters = 0
    for _ in range(max_iters):
        iters += 1
        t = np.tanh(0.5 * m_v2c)
        for g in prep.groups:
            tg = t[g.edge_ix]
            left = np.ones_like(tg)
            right = np.ones_like(tg)
            np.cumprod(tg[:, :-1], axis=1, out=left[:, 1:])
            np.cumprod(tg[:, :0:-1], axis=1, out=right[:, -2::-1])
            prod = np.clip(left * right, -_TANH_PROD_CLIP, _TANH_PROD_CLIP)
            m_c2v[g.edge_ix.ravel()] = (2.0 * np.arctanh(prod)).ravel()
        tot = llr + np.bincount(prep.col_idx, weights=m_c2v, minlength=n)
        bits = (tot < 0).astype(np.uint8)
        parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
        if early_exit and not np.any(parity % 2):
            return bits, True, iters
        m_v2c = np.clip(tot[prep.col_idx] - m_c2v, -clip, clip)
    parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
    return bits, not np.any(parity % 2), iters


def admm_decode_frame(
    prep,
    llr,
    mu,
    alpha,
    max_iters,
    tol,
    eps,
    cap,
    pack=None,
    hist=None,
    collector=None,
):
    """ADMM decode with a concave distance-from-half penalty of weight alpha.

    Returns (bits, converged, iters, calls, iter_sum, iter_max, muls, adds, ok).
    """
    n, nnz = prep.n_vars, int(prep.row_ptr[-1])
    z = np.full(nnz, 0.5)
    u = np.zeros(nnz)
    stats = _Stats()
    ok = True
    denom = mu * prep.var_deg - 2.0 * alpha
    bits = np.zeros(n, dtype=np.uint8)
    iters = 0
    for _ in range(max_iters):
        iters += 1
        t = np.bincount(prep.col_idx, weights=z - u, minlength=n)
        x = np.clip((mu * t - llr - alpha) / denom, 0.0, 1.0)

        dz = 0.0
        for g in prep.groups:
            d = g.degree
            slot = -1
            if pack is not None:
                slot = int(pack.slot_for_degree[d]) if d < pack.slot_for_degree.size else -1
            vin = x[g.var_ix] + u[g.edge_ix]
            r, k, s, used, conv = project_batch(vin, eps, cap, pack, slot)
            ok = ok and bool(conv.all())
            z[g.edge_ix.ravel()] = r.ravel()
            kp = np.maximum(k, 1)
            stats.calls += kp.size
            stats.iter_sum += int(kp.sum())
            stats.iter_max = max(stats.iter_max, int(kp.max()))
            stats.muls += int(3 * d * kp.sum())
            stats.adds += int(2 * d * kp.sum())
            if pack is not None and used.any():
                stats.muls += int(used.sum()) * int(pack.muls[slot])
                stats.adds += int(used.sum()) * int(pack.adds[slot])
            if hist is not None:
                np.add.at(hist, np.minimum(kp, hist.size - 1), 1)
            if collector is not None:
                collector.add_batch(d, vin, s, kp)

        resid = x[prep.col_idx] - z
        u += resid
        bits = (x > 0.5).astype(np.uint8)
        parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
        if not np.any(parity % 2):
            return bits, True, iters, stats.calls, stats.iter_sum, stats.iter_max, stats.muls, stats.adds, ok
        if not np.all(np.isfinite(x)):
            ok = False
            break
        if float(np.abs(resid).max()) < tol:
            break
    parity = np.add.reduceat(bits[prep.col_idx].astype(np.int64), prep.row_ptr[:-1])
    return bits, not np.any(parity % 2), iters, stats.calls, stats.iter_sum, stats.iter_max, stats.muls, stats.adds, ok
