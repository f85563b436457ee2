"""Numba kernel backend: scalar @njit loops, one frame per call.

Python-level wrappers expose the same API as _kernels_numpy; the jitted
functions below do the work. All kernels are nogil so frames can decode on
worker threads.
"""

import math

import numpy as np
from numba import njit

_TANH_PROD_CLIP = 1.0 - 1e-12

_EMPTY_HIST = np.zeros(0, dtype=np.int64)
_EMPTY_BUF = np.zeros((0, 1))
_NO_NET = (
    np.zeros((0, 1, 1)),
    np.zeros((0, 1)),
    np.zeros((0, 1)),
    np.zeros(0),
    np.full(1, -1, dtype=np.int64),
    np.zeros(0, dtype=np.int64),
    np.zeros(0, dtype=np.int64),
)


@njit(cache=True, nogil=True)
def _net_forward(wa, ba, wb, bb, slot, v, d):
    h = (d + 1) // 2
    out = 0.0
    for m in range(h):
        acc = 0.0
        for j in range(d):
            w = wa[slot, m, j]
            if w != 0.0:
                acc += w * v[j]
        acc += ba[slot, m]
        if acc < -1.0:
            ym = 0.0
        elif acc > 1.0:
            ym = 1.0
        else:
            ym = 0.5 * (math.sin(0.5 * math.pi * acc) + 1.0)
        w = wb[slot, m]
        if w != 0.0:
            out += w * ym
    out += bb[slot]
    if out < -1.0:
        return 0.0
    if out > 1.0:
        return 1.0
    return 0.5 * (math.sin(0.5 * math.pi * out) + 1.0)


@njit(cache=True, nogil=True)
def _project_inplace(w, theta, eps, cap, use_net, slot, nwa, nba, nwb, nbb):
    """Project ``w`` (overwritten with the result) onto the even-parity
    polytope of its length. Returns (loop_iters, s_total, used_net, converged).
    """
    d = w.shape[0]
    npos = 0
    for i in range(d):
        if w[i] >= 0.5:  # sign of zero resolves to +1
            theta[i] = 1.0
            npos += 1
        else:
            theta[i] = -1.0
    if npos % 2 == 0:
        best = abs(w[0] - 0.5)
        ib = 0
        for i in range(1, d):
            mi = abs(w[i] - 0.5)
            if mi < best:
                best = mi
                ib = i
        if theta[ib] > 0.0:
            theta[ib] = -1.0
            npos -= 1
        else:
            theta[ib] = 1.0
            npos += 1
    p = float(npos - 1)

    acc = 0.0
    for i in range(d):
        ui = w[i]
        if ui < 0.0:
            ui = 0.0
        elif ui > 1.0:
            ui = 1.0
        acc += theta[i] * ui
    eta = (acc - p) / d
    if eta < eps:
        for i in range(d):
            if w[i] < 0.0:
                w[i] = 0.0
            elif w[i] > 1.0:
                w[i] = 1.0
        return 0, 0.0, False, True

    used = False
    eta_k = 0.0
    if use_net and slot >= 0:
        eta_k = _net_forward(nwa, nba, nwb, nbb, slot, w, d)
        used = True
    s_tot = 0.0
    k = 0
    conv = True
    while True:
        for i in range(d):
            w[i] -= eta_k * theta[i]
        s_tot += eta_k
        k += 1
        acc = 0.0
        for i in range(d):
            ui = w[i]
            if ui < 0.0:
                ui = 0.0
            elif ui > 1.0:
                ui = 1.0
            acc += theta[i] * ui
        eta_k = (acc - p) / d
        if abs(eta_k) < eps:
            break
        if k >= cap:
            conv = False
            break
    for i in range(d):
        if w[i] < 0.0:
            w[i] = 0.0
        elif w[i] > 1.0:
            w[i] = 1.0
    return k, s_tot, used, conv


@njit(cache=True, nogil=True)
def _project_rows(v, eps, cap, use_net, slot, nwa, nba, nwb, nbb, iters, s_tot, used, conv):
    n, d = v.shape
    theta = np.empty(d)
    for r in range(n):
        k, s, u, c = _project_inplace(v[r], theta, eps, cap, use_net, slot, nwa, nba, nwb, nbb)
        iters[r] = k
        s_tot[r] = s
        used[r] = u
        conv[r] = c


@njit(cache=True, nogil=True)
def _syndrome_bits(row_ptr, col_idx, bits):
    m = row_ptr.shape[0] - 1
    for j in range(m):
        par = 0
        for t in range(row_ptr[j], row_ptr[j + 1]):
            par += bits[col_idx[t]]
        if par % 2 == 1:
            return False
    return True


@njit(cache=True, nogil=True)
def _pdd_decode(
    row_ptr,
    col_idx,
    var_deg,
    llr,
    mu0,
    growth,
    tol_inner,
    tol_feas,
    eps,
    max_inner,
    max_outer,
    cap,
    use_net,
    nwa,
    nba,
    nwb,
    nbb,
    nslot,
    nmuls,
    nadds,
    hist,
    min_k,
    sample_buf,
    sample_start,
    bits_out,
):
    n = llr.shape[0]
    m = row_ptr.shape[0] - 1
    nnz = col_idx.shape[0]

    x = np.full(n, 0.5)
    x_hat = np.full(n, 0.5)
    z = np.zeros(nnz)
    y = np.zeros(nnz)
    w_dual = np.zeros(n)
    eta_dual = np.zeros(n)
    alpha = np.zeros(n)

    dmax = 0
    for j in range(m):
        dj = row_ptr[j + 1] - row_ptr[j]
        if dj > dmax:
            dmax = dj
    vbuf = np.empty(dmax)
    theta = np.empty(dmax)
    vorig = np.empty(dmax)

    mu = mu0
    calls = 0
    iter_sum = 0
    iter_max = 0
    muls = 0
    adds = 0
    nsamp = sample_start
    ok = True
    outer = 0
    inner_total = 0
    rec_hist = hist.shape[0] > 1
    collecting = sample_buf.shape[0] > 0

    for _om in range(max_outer):
        outer += 1
        inv_mu = 1.0 / mu
        half_mu = 0.5 * mu
        for _ik in range(max_inner):
            inner_total += 1
            for i in range(n):
                alpha[i] = 0.0
            for e in range(nnz):
                alpha[col_idx[e]] += y[e] * inv_mu - z[e]

            dx = 0.0
            for i in range(n):
                ai = half_mu * (var_deg[i] + (x_hat[i] - 1.0) ** 2 + 1.0)
                bi = (
                    llr[i]
                    + mu * alpha[i]
                    + w_dual[i] * (x_hat[i] - 1.0)
                    + eta_dual[i]
                    - mu * x_hat[i]
                )
                xi = -bi / (2.0 * ai)
                if xi < 0.0:
                    xi = 0.0
                elif xi > 1.0:
                    xi = 1.0
                ch = abs(xi - x[i])
                if ch > dx:
                    dx = ch
                x[i] = xi

            dz = 0.0
            for j in range(m):
                s0 = row_ptr[j]
                d = row_ptr[j + 1] - s0
                for t in range(d):
                    vbuf[t] = x[col_idx[s0 + t]] + y[s0 + t] * inv_mu
                slot = -1
                if use_net and d < nslot.shape[0]:
                    slot = nslot[d]
                if collecting:
                    for t in range(d):
                        vorig[t] = vbuf[t]
                k, s_tot, used, conv = _project_inplace(
                    vbuf[:d], theta[:d], eps, cap, use_net, slot, nwa, nba, nwb, nbb
                )
                if not conv:
                    ok = False
                kp = k if k >= 1 else 1
                calls += 1
                iter_sum += kp
                if kp > iter_max:
                    iter_max = kp
                muls += 3 * d * kp
                adds += 2 * d * kp
                if used:
                    muls += nmuls[slot]
                    adds += nadds[slot]
                if rec_hist:
                    hb = kp if kp < hist.shape[0] - 1 else hist.shape[0] - 1
                    hist[hb] += 1
                if collecting and kp >= min_k and nsamp < sample_buf.shape[0]:
                    sample_buf[nsamp, 0] = d
                    for t in range(d):
                        sample_buf[nsamp, 1 + t] = vorig[t]
                    sample_buf[nsamp, sample_buf.shape[1] - 2] = s_tot
                    sample_buf[nsamp, sample_buf.shape[1] - 1] = kp
                    nsamp += 1
                for t in range(d):
                    ch = abs(vbuf[t] - z[s0 + t])
                    if ch > dz:
                        dz = ch
                    z[s0 + t] = vbuf[t]

            dxh = 0.0
            for i in range(n):
                xi = x[i]
                nh = (mu * (xi * xi + xi) - w_dual[i] * xi + eta_dual[i]) / (
                    mu * (xi * xi + 1.0)
                )
                ch = abs(nh - x_hat[i])
                if ch > dxh:
                    dxh = ch
                x_hat[i] = nh

            change = dx
            if dz > change:
                change = dz
            if dxh > change:
                change = dxh
            if math.isnan(change) or math.isinf(change):
                ok = False
                break
            if change < tol_inner:
                break
        if not ok:
            break

        sat = True
        for j in range(m):
            par = 0
            for t in range(row_ptr[j], row_ptr[j + 1]):
                if x[col_idx[t]] > 0.5:
                    par += 1
            if par % 2 == 1:
                sat = False
                break
        if sat:
            break

        res = 0.0
        for e in range(nnz):
            ch = abs(x[col_idx[e]] - z[e])
            if ch > res:
                res = ch
        for i in range(n):
            ch = abs(x[i] * (x_hat[i] - 1.0))
            if ch > res:
                res = ch
            ch = abs(x[i] - x_hat[i])
            if ch > res:
                res = ch
        if res < tol_feas:
            break

        for e in range(nnz):
            y[e] += mu * (x[col_idx[e]] - z[e])
        for i in range(n):
            w_dual[i] += mu * x[i] * (x_hat[i] - 1.0)
            eta_dual[i] += mu * (x[i] - x_hat[i])
        mu *= growth

    for i in range(n):
        bits_out[i] = 1 if x[i] > 0.5 else 0
    converged = _syndrome_bits(row_ptr, col_idx, bits_out)
    return converged, outer, inner_total, calls, iter_sum, iter_max, muls, adds, nsamp, ok


@njit(cache=True, nogil=True)
def _bp_decode(row_ptr, col_idx, llr, max_iters, clip, early_exit, bits_out):
    n = llr.shape[0]
    m = row_ptr.shape[0] - 1
    nnz = col_idx.shape[0]

    for i in range(n):
        bits_out[i] = 1 if llr[i] < 0.0 else 0
    if max_iters == 0:
        return _syndrome_bits(row_ptr, col_idx, bits_out), 0

    dmax = 0
    for j in range(m):
        dj = row_ptr[j + 1] - row_ptr[j]
        if dj > dmax:
            dmax = dj
    pre = np.empty(dmax)
    tv = np.empty(dmax)

    m_v2c = np.empty(nnz)
    m_c2v = np.zeros(nnz)
    tot = np.empty(n)
    for e in range(nnz):
        v = llr[col_idx[e]]
        if v > clip:
            v = clip
        elif v < -clip:
            v = -clip
        m_v2c[e] = v

    iters = 0
    for _it in range(max_iters):
        iters += 1
        for j in range(m):
            s0 = row_ptr[j]
            d = row_ptr[j + 1] - s0
            prod = 1.0
            for t in range(d):
                tv[t] = math.tanh(0.5 * m_v2c[s0 + t])
                pre[t] = prod
                prod *= tv[t]
            suf = 1.0
            for t in range(d - 1, -1, -1):
                ext = pre[t] * suf
                suf *= tv[t]
                if ext > _TANH_PROD_CLIP:
                    ext = _TANH_PROD_CLIP
                elif ext < -_TANH_PROD_CLIP:
                    ext = -_TANH_PROD_CLIP
                m_c2v[s0 + t] = 2.0 * math.atanh(ext)
        for i in range(n):
            tot[i] = llr[i]
        for e in range(nnz):
            tot[col_idx[e]] += m_c2v[e]
        for i in range(n):
            bits_out[i] = 1 if tot[i] < 0.0 else 0
        if early_exit and _syndrome_bits(row_ptr, col_idx, bits_out):
            return True, iters
        for e in range(nnz):
            v = tot[col_idx[e]] - m_c2v[e]
            if v > clip:
                v = clip
            elif v < -clip:
                v = -clip
            m_v2c[e] = v
    return _syndrome_bits(row_ptr, col_idx, bits_out), iters


@njit(cache=True, nogil=True)
def _admm_decode(
    row_ptr,
    col_idx,
    var_deg,
    llr,
    mu,
    alpha_pen,
    max_iters,
    tol,
    eps,
    cap,
    use_net,
    nwa,
    nba,
    nwb,
    nbb,
    nslot,
    nmuls,
    nadds,
    hist,
    min_k,
    sample_buf,
    sample_start,
    bits_out,
):
    n = llr.shape[0]
    m = row_ptr.shape[0] - 1
    nnz = col_idx.shape[0]

    x = np.full(n, 0.5)
    z = np.full(nnz, 0.5)
    u = np.zeros(nnz)
    acc = np.zeros(n)

    dmax = 0
    for j in range(m):
        dj = row_ptr[j + 1] - row_ptr[j]
        if dj > dmax:
            dmax = dj
    vbuf = np.empty(dmax)
    theta = np.empty(dmax)
    vorig = np.empty(dmax)

    calls = 0
    iter_sum = 0
    iter_max = 0
    muls = 0
    adds = 0
    nsamp = sample_start
    ok = True
    iters = 0
    rec_hist = hist.shape[0] > 1
    collecting = sample_buf.shape[0] > 0

    for _it in range(max_iters):
        iters += 1
        for i in range(n):
            acc[i] = 0.0
        for e in range(nnz):
            acc[col_idx[e]] += z[e] - u[e]
        finite = True
        for i in range(n):
            xi = (mu * acc[i] - llr[i] - alpha_pen) / (mu * var_deg[i] - 2.0 * alpha_pen)
            if xi < 0.0:
                xi = 0.0
            elif xi > 1.0:
                xi = 1.0
            if math.isnan(xi):
                finite = False
            x[i] = xi
        if not finite:
            ok = False
            break

        for j in range(m):
            s0 = row_ptr[j]
            d = row_ptr[j + 1] - s0
            for t in range(d):
                vbuf[t] = x[col_idx[s0 + t]] + u[s0 + t]
            slot = -1
            if use_net and d < nslot.shape[0]:
                slot = nslot[d]
            if collecting:
                for t in range(d):
                    vorig[t] = vbuf[t]
            k, s_tot, used, conv = _project_inplace(
                vbuf[:d], theta[:d], eps, cap, use_net, slot, nwa, nba, nwb, nbb
            )
            if not conv:
                ok = False
            kp = k if k >= 1 else 1
            calls += 1
            iter_sum += kp
            if kp > iter_max:
                iter_max = kp
            muls += 3 * d * kp
            adds += 2 * d * kp
            if used:
                muls += nmuls[slot]
                adds += nadds[slot]
            if rec_hist:
                hb = kp if kp < hist.shape[0] - 1 else hist.shape[0] - 1
                hist[hb] += 1
            if collecting and kp >= min_k and nsamp < sample_buf.shape[0]:
                sample_buf[nsamp, 0] = d
                for t in range(d):
                    sample_buf[nsamp, 1 + t] = vorig[t]
                sample_buf[nsamp, sample_buf.shape[1] - 2] = s_tot
                sample_buf[nsamp, sample_buf.shape[1] - 1] = kp
                nsamp += 1
            for t in range(d):
                z[s0 + t] = vbuf[t]

        res = 0.0
        for e in range(nnz):
            r = x[col_idx[e]] - z[e]
            u[e] += r
            if abs(r) > res:
                res = abs(r)
        for i in range(n):
            bits_out[i] = 1 if x[i] > 0.5 else 0
        if _syndrome_bits(row_ptr, col_idx, bits_out):
            return True, iters, calls, iter_sum, iter_max, muls, adds, nsamp, ok
        if res < tol:
            break

    for i in range(n):
        bits_out[i] = 1 if x[i] > 0.5 else 0
    converged = _syndrome_bits(row_ptr, col_idx, bits_out)
    return converged, iters, calls, iter_sum, iter_max, muls, adds, nsamp, ok


# ---------------------------------------------------------------------------
# wrappers presenting the same API as _kernels_numpy


def _net_args(pack):
    if pack is None:
        return (False,) + _NO_NET
    return (
        True,
        pack.wa,
        pack.ba,
        pack.wb,
        pack.bb,
        pack.slot_for_degree,
        pack.muls,
        pack.adds,
    )


def project_single(v, eps, cap, pack=None):
    w = np.array(v, dtype=np.float64)
    d = w.shape[0]
    use_net, nwa, nba, nwb, nbb, nslot, _, _ = _net_args(pack)
    slot = int(nslot[d]) if use_net and d < nslot.shape[0] else -1
    theta = np.empty(d)
    k, s, used, conv = _project_inplace(w, theta, eps, cap, use_net, slot, nwa, nba, nwb, nbb)
    return w, int(k), float(s), bool(used), bool(conv)


def project_batch(v, eps, cap, pack=None, slot=-1):
    v = np.array(v, dtype=np.float64)
    n, d = v.shape
    use_net, nwa, nba, nwb, nbb, nslot, _, _ = _net_args(pack)
    if use_net and slot < 0:
        slot = int(nslot[d]) if d < nslot.shape[0] else -1
    iters = np.zeros(n, dtype=np.int64)
    s_tot = np.zeros(n)
    used = np.zeros(n, dtype=np.bool_)
    conv = np.zeros(n, dtype=np.bool_)
    _project_rows(v, eps, cap, use_net, slot, nwa, nba, nwb, nbb, iters, s_tot, used, conv)
    return v, iters, s_tot, used, conv


def _sink_args(sink):
    if sink is None:
        return 0, _EMPTY_BUF, 0
    return sink.min_k, sink.buf, sink.count


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
    bits = np.zeros(prep.n_vars, dtype=np.uint8)
    min_k, buf, start = _sink_args(collector)
    h = hist if hist is not None else _EMPTY_HIST
    out = _pdd_decode(
        prep.row_ptr,
        prep.col_idx,
        prep.var_deg,
        np.ascontiguousarray(llr, dtype=np.float64),
        float(mu0),
        float(growth),
        float(tol_inner),
        float(tol_feas),
        float(eps),
        int(max_inner),
        int(max_outer),
        int(cap),
        *_net_args(pack),
        h,
        int(min_k),
        buf,
        int(start),
        bits,
    )
    converged, outer, inner_total, calls, iter_sum, iter_max, muls, adds, nsamp, ok = out
    if collector is not None:
        collector.count = int(nsamp)
    return bits, bool(converged), int(outer), int(inner_total), int(calls), int(iter_sum), int(iter_max), int(muls), int(adds), bool(ok)


def bp_decode_frame(prep, llr, max_iters, clip, early_exit=True):
    bits = np.zeros(prep.n_vars, dtype=np.uint8)
    conv, iters = _bp_decode(
        prep.row_ptr,
        prep.col_idx,
        np.ascontiguousarray(llr, dtype=np.float64),
        int(max_iters),
        float(clip),
        bool(early_exit),
        bits,
    )
    return bits, bool(conv), int(iters)


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
    bits = np.zeros(prep.n_vars, dtype=np.uint8)
    min_k, buf, start = _sink_args(collector)
    h = hist if hist is not None else _EMPTY_HIST
    out = _admm_decode(
        prep.row_ptr,
        prep.col_idx,
        prep.var_deg,
        np.ascontiguousarray(llr, dtype=np.float64),
        float(mu),
        float(alpha),
        int(max_iters),
        float(tol),
        float(eps),
        int(cap),
        *_net_args(pack),
        h,
        int(min_k),
        buf,
        int(start),
        bits,
    )
    converged, iters, calls, iter_sum, iter_max, muls, adds, nsamp, ok = out
    if collector is not None:
        collector.count = int(nsamp)
    return bits, bool(converged), int(iters), int(calls), int(iter_sum), int(iter_max), int(muls), int(adds), bool(ok)
