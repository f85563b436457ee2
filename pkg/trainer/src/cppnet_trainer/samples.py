"""Reader for the projection sample dumps produced by the decoder harness.

File contract: CSV `samples_d<d>.csv` with header `v1,...,v<d>,s_hat,k_iters`;
rows with fewer than two projection iterations must not appear.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampleSet:
    degree: int
    features: np.ndarray  # (n, degree)
    labels: np.ndarray  # (n,)
    k_iters: np.ndarray  # (n,) int

    def __len__(self):
        return self.labels.size


def read_sample_file(path):
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 4 or header[-2:] != ["s_hat", "k_iters"]:
            raise ValueError(f"{path}: unrecognized sample header")
        degree = len(header) - 2
        if header[:degree] != [f"v{i+1}" for i in range(degree)]:
            raise ValueError(f"{path}: unrecognized sample header")
        body = fh.read().strip()
    if not body:
        rows = np.zeros((0, degree + 2))
    else:
        rows = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    if rows.size == 0:
        return SampleSet(degree, np.zeros((0, degree)), np.zeros(0), np.zeros(0, dtype=int))
    if rows.shape[1] != degree + 2:
        raise ValueError(f"{path}: expected {degree + 2} columns, got {rows.shape[1]}")
    k = rows[:, -1].astype(int)
    if np.any(k < 2):
        raise ValueError(f"{path}: contains k_iters < 2 rows")
    return SampleSet(degree, rows[:, :degree].copy(), rows[:, degree].copy(), k)
