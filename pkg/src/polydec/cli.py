"""Command-line interface.

Subcommands: simulate (BLER sweep), collect-samples (training data dump),
proj-bench (projection micro-benchmark), hist (iteration histogram).
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

import argparse
import sys
import time

import numpy as np

from . import _backend, bench
from .baselines import AdmmL2Config, BpConfig
from .code_model import AlistError, load_alist
from .cppnet import WeightFormatError, load_weights_file, pack
from .errors import ConfigError, NumericError
from .pdd import PddConfig
from .projection import project_oracle


def _snr_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}") from None


def _add_common(p):
    p.add_argument("--code", required=True, help="alist file of the parity-check matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")


def _add_decoder_opts(p):
    p.add_argument("--decoder", choices=bench.DECODERS, default="pdd")
    p.add_argument("--projector", choices=("icpp", "ncpp"), default="icpp")
    p.add_argument("--weights", default=None, help="cppnet-v1 weight file (for ncpp)")
    p.add_argument("--mu0", type=float, default=None, help="initial penalty")
    p.add_argument("--c", type=float, default=None, help="penalty growth factor")
    p.add_argument("--epsilon", type=float, default=None, help="projection threshold")
    p.add_argument("--inner-iters", type=int, default=None)
    p.add_argument("--outer-iters", type=int, default=None)
    p.add_argument("--admm-mu", type=float, default=None)
    p.add_argument("--admm-alpha", type=float, default=None)
    p.add_argument("--admm-iters", type=int, default=None)
    p.add_argument("--bp-iters", type=int, default=None)


def _configs(args):
    pdd_kw = {"projector": args.projector}
    if args.mu0 is not None:
        pdd_kw["mu0"] = args.mu0
    if args.c is not None:
        pdd_kw["c"] = args.c
    if args.epsilon is not None:
        pdd_kw["epsilon_proj"] = args.epsilon
    if args.inner_iters is not None:
        pdd_kw["max_inner"] = args.inner_iters
    if args.outer_iters is not None:
        pdd_kw["max_outer"] = args.outer_iters
    admm_kw = {}
    if args.admm_mu is not None:
        admm_kw["mu"] = args.admm_mu
    if args.admm_alpha is not None:
        admm_kw["alpha"] = args.admm_alpha
    if args.admm_iters is not None:
        admm_kw["max_iters"] = args.admm_iters
    if args.epsilon is not None:
        admm_kw["epsilon_proj"] = args.epsilon
    bp_kw = {}
    if args.bp_iters is not None:
        bp_kw["max_iters"] = args.bp_iters
    return PddConfig(**pdd_kw), AdmmL2Config(**admm_kw), BpConfig(**bp_kw)


def _load_net(args):
    if getattr(args, "projector", "icpp") != "ncpp":
        return None
    if not args.weights:
        raise ConfigError("--projector ncpp needs --weights")
    return load_weights_file(args.weights)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args):
    code = load_alist(args.code)
    pdd_cfg, admm_cfg, bp_cfg = _configs(args)
    spec = bench.SweepSpec(
        snrs_db=args.snr,
        decoder=args.decoder,
        min_block_errors=args.min_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        pdd_cfg=pdd_cfg,
        admm_cfg=admm_cfg,
        bp_cfg=bp_cfg,
    )
    report = bench.run_sweep(code, spec, net=_load_net(args))
    _emit(bench.report_to_csv(report), args.out)
    print(
        f"# {args.decoder} on {args.code}: {sum(r.frames for r in report.rows)} frames "
        f"in {report.elapsed_s:.1f}s [{_backend.BACKEND_NAME} backend]",
        file=sys.stderr,
    )
    if any(r.starved for r in report.rows):
        print("# warning: error-starved rows present (flagged in CSV)", file=sys.stderr)
    return 0


def cmd_collect_samples(args):
    if not args.out:
        raise ConfigError("collect-samples writes per-degree files: --out DIR is required")
    code = load_alist(args.code)
    pdd_cfg, _, _ = _configs(args)
    paths = bench.collect_samples(
        code,
        args.out,
        snr_db=args.snr[0] if args.snr else 5.0,
        train_target=args.train,
        val_target=args.val,
        k_min=args.k_min,
        seed=args.seed,
        max_frames=args.max_frames,
        pdd_cfg=pdd_cfg,
    )
    for d, (train, val) in sorted(paths.items()):
        print(f"degree {d}: {train} {val}", file=sys.stderr)
    return 0


def cmd_hist(args):
    code = load_alist(args.code)
    pdd_cfg, admm_cfg, _ = _configs(args)
    hist = bench.iteration_histogram(
        code,
        snr_db=args.snr[0],
        frames=args.frames,
        seed=args.seed,
        decoder=args.decoder,
        net=_load_net(args),
        pdd_cfg=pdd_cfg,
        admm_cfg=admm_cfg,
    )
    _emit(bench.histogram_to_csv(hist), args.out)
    return 0


def cmd_proj_bench(args):
    rng = np.random.default_rng(args.seed)
    kern = _backend.kernels()
    net_pack = None
    if args.weights:
        net_pack = pack(load_weights_file(args.weights))
    lines = ["degree,count,mean_iters,max_iters,max_gap_vs_oracle,calls_per_s"]
    for d in args.degrees:
        v = rng.uniform(-1.0, 2.0, size=(args.count, d))
        t0 = time.perf_counter()
        r, iters, _s, _u, conv = kern.project_batch(v, args.epsilon, 10_000, net_pack)
        dt = time.perf_counter() - t0
        if not conv.all():
            raise NumericError(f"projection cap hit at degree {d}")
        kp = np.maximum(iters, 1)
        n_check = min(args.count, args.oracle_checks)
        gap = 0.0
        for i in range(n_check):
            gap = max(gap, float(np.abs(r[i] - project_oracle(v[i])).max()))
        lines.append(
            f"{d},{args.count},{repr(float(kp.mean()))},{int(kp.max())},"
            f"{repr(gap)},{repr(float(args.count / dt))}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    print(f"# backend: {_backend.BACKEND_NAME}", file=sys.stderr)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="polydec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte-Carlo BLER sweep")
    _add_common(p)
    _add_decoder_opts(p)
    p.add_argument("--snr", type=_snr_list, required=True, help="comma list of Eb/N0 in dB")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("collect-samples", help="dump projection training samples")
    _add_common(p)
    _add_decoder_opts(p)
    p.add_argument("--snr", type=_snr_list, default=(5.0,))
    p.add_argument("--train", type=int, default=100_000)
    p.add_argument("--val", type=int, default=10_000)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--max-frames", type=int, default=200_000)
    p.set_defaults(func=cmd_collect_samples)
    # --out is a directory here

    p = sub.add_parser("hist", help="projection iteration histogram")
    _add_common(p)
    _add_decoder_opts(p)
    p.add_argument("--snr", type=_snr_list, required=True)
    p.add_argument("--frames", type=int, default=2000)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("proj-bench", help="projection micro-benchmark")
    p.add_argument("--degrees", type=lambda t: tuple(int(x) for x in t.split(",")), default=(6,))
    p.add_argument("--count", type=int, default=20_000)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-checks", type=int, default=200)
    p.add_argument("--weights", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_proj_bench)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, AlistError, WeightFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
