"""Flattened code structure handed to the decode kernels.

Edges (nonzeros of the parity-check matrix) are numbered row-major: edge e
belongs to check j iff row_ptr[j] <= e < row_ptr[j+1] and touches variable
col_idx[e]. ``groups`` batches checks of equal degree for the vectorized
numpy path.
"""

from typing import NamedTuple

import numpy as np


class DegreeGroup(NamedTuple):
    degree: int
    check_ids: np.ndarray  # int64 (n,)
    var_ix: np.ndarray  # int64 (n, degree): variable index per slot
    edge_ix: np.ndarray  # int64 (n, degree): edge id per slot


class Prep(NamedTuple):
    n_vars: int
    n_checks: int
    row_ptr: np.ndarray  # int64 (n_checks+1,)
    col_idx: np.ndarray  # int64 (nnz,)
    col_ptr: np.ndarray  # int64 (n_vars+1,)
    col_edge: np.ndarray  # int64 (nnz,) edge ids grouped by variable
    var_deg: np.ndarray  # float64 (n_vars,)
    check_deg: np.ndarray  # int64 (n_checks,)
    max_degree: int
    groups: tuple


def prepare(code):
    row_ptr = code.row_ptr.astype(np.int64)
    col_idx = code.col_idx.astype(np.int64)
    deg = code.check_degrees.astype(np.int64)
    groups = []
    for d in sorted(set(int(x) for x in deg)):
        ids = np.nonzero(deg == d)[0].astype(np.int64)
        edge_ix = np.stack([np.arange(row_ptr[j], row_ptr[j + 1]) for j in ids])
        groups.append(
            DegreeGroup(
                degree=d,
                check_ids=ids,
                var_ix=col_idx[edge_ix],
                edge_ix=edge_ix,
            )
        )
    return Prep(
        n_vars=code.n_vars,
        n_checks=code.n_checks,
        row_ptr=row_ptr,
        col_idx=col_idx,
        col_ptr=code.col_ptr.astype(np.int64),
        col_edge=code.col_edge.astype(np.int64),
        var_deg=code.var_degrees.astype(np.float64),
        check_deg=deg,
        max_degree=int(deg.max()),
        groups=tuple(groups),
    )
