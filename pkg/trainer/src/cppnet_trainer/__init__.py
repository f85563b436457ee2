"""Offline trainer for the check-polytope projection warm-start net: ingest
sample dumps, train with the asymmetric shift loss, quantize weights to signed
powers of two, finetune biases, export cppnet-v1 weight files."""

from .model import Net, forward, init_net, predict, sin_act
from .quantize import finetune_biases, quantize_net, quantize_weight
from .replay import mean_iterations, replay_iterations
from .samples import SampleSet, read_sample_file
from .training import Adam, TrainConfig, evaluate_loss, train
from .weights_io import parse, quantized_forward, render, write_file, write_forward_fixture

__all__ = [
    "Adam",
    "Net",
    "SampleSet",
    "TrainConfig",
    "evaluate_loss",
    "finetune_biases",
    "forward",
    "init_net",
    "mean_iterations",
    "parse",
    "predict",
    "quantize_net",
    "quantize_weight",
    "quantized_forward",
    "read_sample_file",
    "render",
    "replay_iterations",
    "sin_act",
    "train",
    "write_file",
    "write_forward_fixture",
]
