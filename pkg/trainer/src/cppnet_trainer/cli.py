"""Training pipeline entry point.

Reads per-degree sample dumps, trains the full-precision net, quantizes the
weights to signed powers of two, finetunes the biases with weights frozen,
exports a cppnet-v1 file and a JSON training report."""

import argparse
import json
import os
import sys

import numpy as np

from .quantize import finetune_biases, quantize_net
from .replay import mean_iterations
from .samples import read_sample_file
from .training import TrainConfig, evaluate_loss, train
from .weights_io import write_file, write_forward_fixture


def train_degree(train_set, val_set, cfg, log=print):
    """Full pipeline for one degree; returns (quantized net, report dict)."""
    net, history = train(train_set, cfg, log=log)
    report = {
        "degree": train_set.degree,
        "train_samples": len(train_set),
        "val_samples": len(val_set),
        "final_train_loss": history[-1],
        "val_loss_full_precision": evaluate_loss(net, val_set, cfg.kappa),
    }
    qnet = quantize_net(net, cap=cfg.exponent_cap, zero_threshold=cfg.zero_threshold)
    report["val_loss_quantized"] = evaluate_loss(
        _as_float(qnet), val_set, cfg.kappa
    )
    tuned, _ = finetune_biases(qnet, train_set, cfg)
    report["val_loss_finetuned"] = evaluate_loss(_as_float(tuned), val_set, cfg.kappa)
    if report["val_loss_finetuned"] > report["val_loss_quantized"] + cfg.finetune_budget:
        log(
            f"warning: finetuning regressed validation loss "
            f"({report['val_loss_quantized']:.6f} -> {report['val_loss_finetuned']:.6f})"
        )
    icpp_mean, icpp_worst = mean_iterations(val_set)
    ncpp_mean, ncpp_worst = mean_iterations(val_set, net=tuned)
    report["replay"] = {
        "icpp_mean_iters": icpp_mean,
        "icpp_worst_iters": icpp_worst,
        "ncpp_mean_iters": ncpp_mean,
        "ncpp_worst_iters": ncpp_worst,
        "ratio": ncpp_mean / icpp_mean,
    }
    return tuned, report


def _as_float(qnet):
    from .model import Net

    return Net(qnet.wa.astype(float), qnet.ba, qnet.wb.astype(float), qnet.bb)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="cppnet-train", description=__doc__)
    ap.add_argument("--samples", required=True, help="directory with samples_d<d>.csv dumps")
    ap.add_argument("--degrees", default=None, help="comma list; default: every dump found")
    ap.add_argument("--out", required=True, help="cppnet-v1 output path")
    ap.add_argument("--report", default=None, help="JSON training report path")
    ap.add_argument("--forward-fixture", default=None,
                    help="write (input, prediction) rows for contract tests")
    ap.add_argument("--epochs", type=int, default=None)
    ap.add_argument("--batch", type=int, default=None)
    ap.add_argument("--lr", type=float, default=None)
    ap.add_argument("--kappa", type=float, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    kw = {"seed": args.seed}
    if args.epochs is not None:
        kw["epochs"] = args.epochs
    if args.batch is not None:
        kw["batch_size"] = args.batch
    if args.lr is not None:
        kw["learning_rate"] = args.lr
    if args.kappa is not None:
        kw["kappa"] = args.kappa
    cfg = TrainConfig(**kw)

    if args.degrees:
        degrees = [int(t) for t in args.degrees.split(",")]
    else:
        degrees = sorted(
            int(f[len("samples_d") : -len(".csv")])
            for f in os.listdir(args.samples)
            if f.startswith("samples_d") and f.endswith(".csv") and ".val." not in f
        )
    if not degrees:
        print("no sample dumps found", file=sys.stderr)
        return 2

    nets = {}
    reports = {}
    for d in degrees:
        train_path = os.path.join(args.samples, f"samples_d{d}.csv")
        val_path = os.path.join(args.samples, f"samples_d{d}.val.csv")
        train_set = read_sample_file(train_path)
        val_set = read_sample_file(val_path) if os.path.exists(val_path) else train_set
        print(f"degree {d}: {len(train_set)} train / {len(val_set)} val samples")
        net, report = train_degree(train_set, val_set, cfg)
        nets[d] = net
        reports[str(d)] = report
        print(
            f"degree {d}: replay ratio {report['replay']['ratio']:.3f} "
            f"(ncpp {report['replay']['ncpp_mean_iters']:.2f} / "
            f"icpp {report['replay']['icpp_mean_iters']:.2f})"
        )
        if args.forward_fixture:
            write_forward_fixture(net, val_set.features[:1000], args.forward_fixture)

    write_file(nets, args.out)
    print(f"wrote {args.out}")
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
        print(f"wrote {args.report}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
