"""Monte-Carlo harness: BLER sweeps, projection iteration statistics,
operation counting, training-sample collection and histogram dumps.

Frames are seeded individually (seed, snr-point, frame-index), simulated in
fixed-size chunks, and aggregated with integer counters only, so a sweep is
reproducible byte-for-byte regardless of thread count. Histogram and sample
collection runs are forced serial because they mutate shared buffers.
"""

import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._prep import prepare
from ._sink import SampleSink
from .baselines import AdmmL2Config, BpConfig
from .channel import ChannelParams, frame_rng, llr, transmit
from .cppnet import ProjectionSample, sample_filename, write_samples
from .errors import ConfigError, NumericError
from .pdd import PddConfig, _net_pack_for

DECODERS = ("pdd", "admm-l2", "bp")
HIST_SIZE = 1024


@dataclass
class SweepSpec:
    snrs_db: tuple
    decoder: str = "pdd"
    min_block_errors: int = 100
    max_frames: int = 1_000_000
    seed: int = 0
    chunk_size: int = 256
    pdd_cfg: PddConfig = field(default_factory=PddConfig)
    bp_cfg: BpConfig = field(default_factory=BpConfig)
    admm_cfg: AdmmL2Config = field(default_factory=AdmmL2Config)

    def __post_init__(self):
        if not self.snrs_db:
            raise ConfigError("need at least one SNR point")
        if self.min_block_errors < 1:
            raise ConfigError("min_block_errors must be >= 1")
        if self.decoder not in DECODERS:
            raise ConfigError(f"decoder must be one of {DECODERS}")


@dataclass
class SnrRow:
    ebn0_db: float
    frames: int
    block_errors: int
    bler: float
    mean_proj_iters: float
    worst_proj_iters: int
    mean_muls: float
    mean_adds: float
    mean_outer_iters: float
    starved: bool


@dataclass
class SimReport:
    decoder: str
    seed: int
    rows: list
    elapsed_s: float = 0.0


CSV_HEADER = (
    "ebn0_db,frames,block_errors,bler,mean_proj_iters,worst_proj_iters,"
    "mean_muls,mean_adds,mean_outer_iters,starved"
)


def report_to_csv(report):
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    repr(float(r.ebn0_db)),
                    str(r.frames),
                    str(r.block_errors),
                    repr(float(r.bler)),
                    repr(float(r.mean_proj_iters)),
                    str(r.worst_proj_iters),
                    repr(float(r.mean_muls)),
                    repr(float(r.mean_adds)),
                    repr(float(r.mean_outer_iters)),
                    str(int(r.starved)),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def thread_count():
    env = os.environ.get("POLYDEC_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"POLYDEC_THREADS={env!r} is not an integer") from None
        if n < 1:
            raise ConfigError("POLYDEC_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _frame_runner(code, prep, spec, net, hist, collector):
    """Per-frame closure returning integer stat tuples:
    (error, outer, inner, calls, iter_sum, iter_max, muls, adds)."""
    kern = _backend.kernels()
    decoder = spec.decoder
    if decoder == "pdd":
        cfg = spec.pdd_cfg
        if cfg.projector == "ncpp":
            if net is None:
                raise ConfigError("projector 'ncpp' needs a weights file")
            pack = _net_pack_for(code, net)
        else:
            pack = None

        def run(llr_vec):
            out = kern.pdd_decode_frame(
                prep,
                llr_vec,
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
            bits, _conv, outer, inner, calls, isum, imax, muls, adds, ok = out
            if not ok:
                raise NumericError("numeric failure during decoding")
            return int(bits.any()), outer, inner, calls, isum, imax, muls, adds

    elif decoder == "admm-l2":
        cfg = spec.admm_cfg
        if int(code.var_degrees.min()) * cfg.mu <= 2.0 * cfg.alpha:
            raise ConfigError("x-subproblem not convex: need mu*min_var_degree > 2*alpha")
        pack = _net_pack_for(code, net)

        def run(llr_vec):
            out = kern.admm_decode_frame(
                prep,
                llr_vec,
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
            bits, _conv, iters, calls, isum, imax, muls, adds, ok = out
            if not ok:
                raise NumericError("numeric failure during decoding")
            return int(bits.any()), iters, iters, calls, isum, imax, muls, adds

    else:
        cfg = spec.bp_cfg

        def run(llr_vec):
            bits, _conv, iters = kern.bp_decode_frame(
                prep, llr_vec, cfg.max_iters, cfg.llr_clip, cfg.early_exit_on_syndrome
            )
            return int(bits.any()), iters, iters, 0, 0, 0, 0, 0

    return run


def run_sweep(code, spec, net=None, hist=None, collector=None):
    """Simulate every SNR point of ``spec`` until min_block_errors or
    max_frames; all-zero codeword transmitted. Deterministic given the seed."""
    prep = prepare(code)
    run = _frame_runner(code, prep, spec, net, hist, collector)
    threads = thread_count()
    if hist is not None or collector is not None:
        threads = 1  # shared accumulation buffers

    t0 = time.monotonic()
    rows = []
    zero = np.zeros(code.n_vars, dtype=np.uint8)
    for point_idx, snr in enumerate(spec.snrs_db):
        params = ChannelParams(ebn0_db=snr, rate=code.rate, seed=spec.seed)

        def frame(frame_idx):
            rng = frame_rng(spec.seed, point_idx, frame_idx)
            y = transmit(zero, params, rng)
            return run(llr(y, params.sigma2))

        errors = 0
        frames = 0
        outer_sum = 0
        calls = 0
        iter_sum = 0
        iter_max = 0
        muls = 0
        adds = 0
        with ThreadPoolExecutor(max_workers=threads) as pool:
            while frames < spec.max_frames and errors < spec.min_block_errors:
                n_chunk = min(spec.chunk_size, spec.max_frames - frames)
                results = list(pool.map(frame, range(frames, frames + n_chunk)))
                for err, outer, _inner, c, isum, imax, m, a in results:
                    errors += err
                    outer_sum += outer
                    calls += c
                    iter_sum += isum
                    iter_max = max(iter_max, imax)
                    muls += m
                    adds += a
                frames += n_chunk
        rows.append(
            SnrRow(
                ebn0_db=snr,
                frames=frames,
                block_errors=errors,
                bler=errors / frames,
                mean_proj_iters=iter_sum / calls if calls else 0.0,
                worst_proj_iters=iter_max,
                mean_muls=muls / calls if calls else 0.0,
                mean_adds=adds / calls if calls else 0.0,
                mean_outer_iters=outer_sum / frames,
                starved=errors < spec.min_block_errors,
            )
        )
    return SimReport(
        decoder=spec.decoder, seed=spec.seed, rows=rows, elapsed_s=time.monotonic() - t0
    )


# ---------------------------------------------------------------------------
# operation counting


def iteration_cost(degree):
    """(muls, adds) charged per projection loop iteration at this degree:
    shifting v costs d muls + d adds, the violation coefficient 2d muls + d adds."""
    return 3 * degree, 2 * degree


def ops_per_call(mean_iters, degree, net_cost=None):
    """Average (muls, adds) of one projection call from its mean iteration
    count, plus one net forward when warm-started."""
    muls = mean_iters * 3 * degree
    adds = mean_iters * 2 * degree
    if net_cost is not None:
        muls += net_cost[0]
        adds += net_cost[1]
    return muls, adds


# ---------------------------------------------------------------------------
# training-sample collection and iteration histograms


def collect_samples(
    code,
    out_dir,
    snr_db=5.0,
    train_target=100_000,
    val_target=10_000,
    k_min=2,
    seed=0,
    max_frames=200_000,
    pdd_cfg=None,
    chunk_size=64,
):
    """Run the decoder at a sample-collection SNR and dump per-degree CSVs of
    projection inputs, converged shift estimates and iteration counts.

    Writes ``samples_d<d>.csv`` (training) and ``samples_d<d>.val.csv``
    (validation) per distinct check degree; returns {degree: (train, val)}.
    Short projections (fewer than ``k_min`` iterations) carry no shift
    information and are skipped.
    """
    if k_min < 2:
        raise ConfigError("k_min must be >= 2: one-iteration samples are excluded")
    cfg = pdd_cfg or PddConfig()
    if cfg.projector != "icpp":
        raise ConfigError("sample collection runs the plain iterative projector")
    degrees = sorted(set(int(d) for d in code.check_degrees))
    per_degree = train_target + val_target
    sink = SampleSink(
        max_degree=int(code.check_degrees.max()),
        capacity=per_degree * len(degrees) + 4096,
        min_k=k_min,
    )
    spec = SweepSpec(
        snrs_db=(snr_db,),
        decoder="pdd",
        min_block_errors=2**62,  # run on frame budget / fill targets instead
        max_frames=chunk_size,
        seed=seed,
        chunk_size=chunk_size,
        pdd_cfg=cfg,
    )
    prep = prepare(code)
    run = _frame_runner(code, prep, spec, None, None, sink)
    params = ChannelParams(ebn0_db=snr_db, rate=code.rate, seed=seed)
    zero = np.zeros(code.n_vars, dtype=np.uint8)

    def filled():
        if sink.count == 0:
            return False
        got = sink.rows()[:, 0].astype(np.int64)
        return all(int((got == d).sum()) >= per_degree for d in degrees)

    frames = 0
    while frames < max_frames and not filled() and not sink.full:
        rng = frame_rng(seed, 0, frames)
        y = transmit(zero, params, rng)
        run(llr(y, params.sigma2))
        frames += 1

    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    rows = sink.rows()
    for d in degrees:
        mine = rows[rows[:, 0].astype(np.int64) == d]
        samples = [
            ProjectionSample(
                degree=d,
                features=row[1 : 1 + d].copy(),
                label=float(row[-2]),
                k_iters=int(row[-1]),
            )
            for row in mine[:per_degree]
        ]
        if len(samples) < per_degree:
            print(
                f"warning: degree {d}: collected {len(samples)} of {per_degree} "
                f"samples within {frames} frames; writing partial files",
                file=sys.stderr,
            )
        train = samples[:train_target]
        val = samples[train_target : train_target + val_target]
        train_path = os.path.join(out_dir, sample_filename(d))
        val_path = os.path.join(out_dir, sample_filename(d).replace(".csv", ".val.csv"))
        with open(train_path, "w", encoding="ascii") as fh:
            write_samples(train, fh, d)
        with open(val_path, "w", encoding="ascii") as fh:
            write_samples(val, fh, d)
        paths[d] = (train_path, val_path)
    return paths


def iteration_histogram(code, snr_db, frames, seed=0, decoder="pdd", net=None, pdd_cfg=None, admm_cfg=None):
    """Projection iteration counts over a fixed number of frames.

    Returns an int64 array indexed by the iteration count (the last bucket
    clamps the tail); a call that short-circuits counts as one evaluation."""
    hist = np.zeros(HIST_SIZE, dtype=np.int64)
    spec = SweepSpec(
        snrs_db=(snr_db,),
        decoder=decoder,
        min_block_errors=2**62,
        max_frames=frames,
        seed=seed,
        pdd_cfg=pdd_cfg or PddConfig(),
        admm_cfg=admm_cfg or AdmmL2Config(),
    )
    if decoder == "bp":
        raise ConfigError("the BP decoder performs no polytope projections")
    run_sweep(code, spec, net=net, hist=hist)
    return hist


def histogram_to_csv(hist):
    total = int(hist.sum())
    lines = ["k_iters,count,frequency"]
    for k in np.nonzero(hist)[0]:
        lines.append(f"{int(k)},{int(hist[k])},{repr(int(hist[k]) / total)}")
    return "\n".join(lines) + "\n"
