#!/usr/bin/env python3
"""Generate the (96, 48) regular (3,6) LDPC fixture code.

Progressive-edge-growth construction: each variable node connects its three
edges to checks that are farthest in the current Tanner graph (ties: lowest
fill, then a seeded shuffle order), restricted to checks with fill < 6 so the
result is exactly (3,6)-regular. Deterministic; run from the repo root:

    python3 scripts/make_fixture_code.py > tests/fixtures/c1_96_48.alist
"""

import sys
from collections import deque

import numpy as np

N, M, DV, DC = 96, 48, 3, 6


def bfs_check_depths(start_var, var_checks, check_vars):
    depth = {}
    q = deque()
    for c in var_checks[start_var]:
        depth[c] = 0
        q.append(c)
    while q:
        c = q.popleft()
        for v in check_vars[c]:
            for c2 in var_checks[v]:
                if c2 not in depth:
                    depth[c2] = depth[c] + 1
                    q.append(c2)
    return depth


def main():
    rng = np.random.default_rng(96_33_964)
    var_checks = [[] for _ in range(N)]
    check_vars = [[] for _ in range(M)]
    fill = np.zeros(M, dtype=int)
    for v in range(N):
        for _ in range(DV):
            depth = bfs_check_depths(v, var_checks, check_vars)
            allowed = [c for c in range(M) if fill[c] < DC and c not in var_checks[v]]
            far = [c for c in allowed if c not in depth]
            if not far:
                dmax = max(depth[c] for c in allowed)
                far = [c for c in allowed if depth.get(c, -1) == dmax]
            fmin = min(fill[c] for c in far)
            cands = [c for c in far if fill[c] == fmin]
            c = int(cands[rng.integers(len(cands))])
            var_checks[v].append(c)
            check_vars[c].append(v)
            fill[c] += 1
    assert all(len(r) == DC for r in check_vars)
    assert all(len(c) == DV for c in var_checks)

    lines = [f"{N} {M}", f"{DV} {DC}"]
    lines.append(" ".join(["3"] * N))
    lines.append(" ".join(["6"] * M))
    for v in range(N):
        lines.append(" ".join(str(c + 1) for c in sorted(var_checks[v])))
    for c in range(M):
        lines.append(" ".join(str(v + 1) for v in sorted(check_vars[c])))
    sys.stdout.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
