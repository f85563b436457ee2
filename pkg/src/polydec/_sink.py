"""Fixed-capacity buffer for projection samples gathered while decoding.

Rows are ``[degree, v padded to max_degree, s_hat, k_iters]``; both kernel
backends fill the same layout.
"""

import numpy as np


class SampleSink:
    def __init__(self, max_degree, capacity, min_k=2):
        self.min_k = int(min_k)
        self.buf = np.zeros((int(capacity), int(max_degree) + 3))
        self.count = 0

    @property
    def full(self):
        return self.count >= self.buf.shape[0]

    def add_batch(self, degree, vin, s_tot, k_iters):
        """Keep rows whose iteration count reaches min_k, until capacity."""
        sel = np.nonzero(k_iters >= self.min_k)[0]
        room = self.buf.shape[0] - self.count
        take = sel[: max(room, 0)]
        if take.size:
            rows = slice(self.count, self.count + take.size)
            self.buf[rows, 0] = degree
            self.buf[rows, 1 : 1 + degree] = vin[take]
            self.buf[rows, -2] = s_tot[take]
            self.buf[rows, -1] = k_iters[take]
            self.count += take.size

    def rows(self):
        return self.buf[: self.count]
