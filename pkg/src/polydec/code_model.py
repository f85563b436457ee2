"""Binary linear code represented by its parity-check matrix.

Checks are stored row-wise as sorted variable-index lists (the selection of
the variables participating in each parity equation), flattened into CSR-style
``row_ptr`` / ``col_idx`` arrays for the kernels.
"""

from dataclasses import dataclass, field

import numpy as np


class AlistError(ValueError):
    """Malformed alist input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CodeModel:
    """Immutable parity-check structure of a binary linear code."""

    n_vars: int
    n_checks: int
    row_ptr: np.ndarray  # int32, shape (n_checks+1,)
    col_idx: np.ndarray  # int32, shape (nnz,), sorted within each row
    check_degrees: np.ndarray  # int32, shape (n_checks,)
    var_degrees: np.ndarray  # int32, shape (n_vars,)
    rate: float
    # edges grouped by variable: col_ptr[i]:col_ptr[i+1] indexes into edge ids
    col_ptr: np.ndarray = field(repr=False, default=None)
    col_edge: np.ndarray = field(repr=False, default=None)

    @property
    def check_rows(self):
        """List of per-check variable-index arrays (views into col_idx)."""
        return [
            self.col_idx[self.row_ptr[j] : self.row_ptr[j + 1]]
            for j in range(self.n_checks)
        ]

    @property
    def nnz(self):
        return int(self.row_ptr[-1])

    def dense(self):
        """Dense 0/1 matrix, for small-code reference checks."""
        h = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        for j, row in enumerate(self.check_rows):
            h[j, row] = 1
        return h

    @classmethod
    def from_check_rows(cls, n_vars, rows):
        """Build from per-check variable index lists; validates the invariants."""
        n_checks = len(rows)
        row_ptr = np.zeros(n_checks + 1, dtype=np.int32)
        cols = []
        for j, row in enumerate(rows):
            idx = np.asarray(sorted(int(i) for i in row), dtype=np.int32)
            if idx.size < 2:
                raise ValueError(f"check {j} has degree {idx.size} (< 2)")
            if idx.size and (idx[0] < 0 or idx[-1] >= n_vars):
                raise ValueError(f"check {j} has variable index out of [0, {n_vars})")
            if np.any(np.diff(idx) == 0):
                raise ValueError(f"check {j} lists a variable twice")
            cols.append(idx)
            row_ptr[j + 1] = row_ptr[j] + idx.size
        col_idx = (
            np.concatenate(cols) if cols else np.zeros(0, dtype=np.int32)
        ).astype(np.int32)
        check_degrees = np.diff(row_ptr).astype(np.int32)
        var_degrees = np.bincount(col_idx, minlength=n_vars).astype(np.int32)
        # edge ids sorted by variable, then by check (stable)
        order = np.argsort(col_idx, kind="stable").astype(np.int32)
        col_ptr = np.zeros(n_vars + 1, dtype=np.int32)
        np.cumsum(var_degrees, out=col_ptr[1:])
        return cls(
            n_vars=n_vars,
            n_checks=n_checks,
            row_ptr=row_ptr,
            col_idx=col_idx,
            check_degrees=check_degrees,
            var_degrees=var_degrees,
            rate=(n_vars - n_checks) / n_vars,
            col_ptr=col_ptr,
            col_edge=order,
        )


def _int_fields(line_text, lineno):
    try:
        return [int(t) for t in line_text.split()]
    except ValueError:
        raise AlistError(f"non-integer token in {line_text!r}", lineno) from None


def parse_alist(text):
    """Parse standard alist text into a CodeModel.

    Layout: ``N M`` / max column and row degrees / N column degrees /
    M row degrees / N column index lines / M row index lines. Indices are
    1-based; zeros are padding and are skipped (irregular codes pad each
    line to the max degree).
    """
    raw = text.splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if len(lines) < 4:
        raise AlistError("truncated alist: fewer than 4 header lines", len(raw))

    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise AlistError("unexpected end of file", len(raw))
        lineno, txt = lines[pos]
        pos += 1
        return lineno, _int_fields(txt, lineno)

    lineno, head = take()
    if len(head) != 2:
        raise AlistError("expected 'N M'", lineno)
    n_vars, n_checks = head
    if n_vars <= 0 or n_checks <= 0:
        raise AlistError("dimension mismatch: N and M must be positive", lineno)

    lineno, maxes = take()
    if len(maxes) != 2:
        raise AlistError("expected max column and row degrees", lineno)
    max_col, max_row = maxes

    lineno, col_degs = take()
    if len(col_degs) != n_vars:
        raise AlistError(
            f"dimension mismatch: {len(col_degs)} column degrees, expected {n_vars}",
            lineno,
        )
    lineno, row_degs = take()
    if len(row_degs) != n_checks:
        raise AlistError(
            f"dimension mismatch: {len(row_degs)} row degrees, expected {n_checks}",
            lineno,
        )
    if col_degs and max(col_degs) != max_col:
        raise AlistError(f"declared max column degree {max_col} does not match", lineno)
    if row_degs and max(row_degs) != max_row:
        raise AlistError(f"declared max row degree {max_row} does not match", lineno)

    def section(count, degs, limit, what):
        entries = []
        for k in range(count):
            lineno, vals = take()
            kept = [v for v in vals if v != 0]
            if any(v < 0 for v in vals):
                raise AlistError(f"negative index in {what} {k}", lineno)
            if len(kept) != degs[k]:
                raise AlistError(
                    f"{what} {k} lists {len(kept)} entries, degree says {degs[k]}",
                    lineno,
                )
            if any(v > limit for v in kept):
                raise AlistError(f"out-of-range index in {what} {k}", lineno)
            entries.append((lineno, sorted(v - 1 for v in kept)))
        return entries

    col_sections = section(n_vars, col_degs, n_checks, "column")
    row_sections = section(n_checks, row_degs, n_vars, "row")

    if pos != len(lines):
        raise AlistError(
            "row/column inconsistency: trailing data after the last row section",
            lines[pos][0],
        )

    from_cols = {(r, c) for c, (_, rows) in enumerate(col_sections) for r in rows}
    from_rows = {(r, c) for r, (_, cols) in enumerate(row_sections) for c in cols}
    if from_cols != from_rows:
        bad = (from_cols ^ from_rows).pop()
        raise AlistError(
            f"row/column inconsistency at matrix entry (row {bad[0]+1}, col {bad[1]+1})",
            row_sections[bad[0]][0] if bad[0] < len(row_sections) else None,
        )

    for j, (lineno, cols) in enumerate(row_sections):
        if len(set(cols)) != len(cols):
            raise AlistError(f"row {j} lists a variable twice", lineno)
        if len(cols) < 2:
            raise AlistError(
                f"check {j} has degree {len(cols)}; degree-1 checks are rejected",
                lineno,
            )

    return CodeModel.from_check_rows(n_vars, [cols for _, cols in row_sections])


def serialize_alist(code):
    """Render a CodeModel back to alist text (1-based, zero-padded sections)."""
    cols = [[] for _ in range(code.n_vars)]
    for j, row in enumerate(code.check_rows):
        for i in row:
            cols[int(i)].append(j)
    max_col = int(code.var_degrees.max()) if code.n_vars else 0
    max_row = int(code.check_degrees.max()) if code.n_checks else 0

    def fmt(idx_list, width):
        padded = [i + 1 for i in idx_list] + [0] * (width - len(idx_list))
        return " ".join(str(v) for v in padded)

    out = [
        f"{code.n_vars} {code.n_checks}",
        f"{max_col} {max_row}",
        " ".join(str(int(d)) for d in code.var_degrees),
        " ".join(str(int(d)) for d in code.check_degrees),
    ]
    out += [fmt(c, max_col) for c in cols]
    out += [fmt(list(map(int, r)), max_row) for r in code.check_rows]
    return "\n".join(out) + "\n"


def load_alist(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_alist(fh.read())


def syndrome_ok(code, bits):
    """True iff every check has even parity over its selected bits."""
    bits = np.asarray(bits)
    if bits.shape != (code.n_vars,):
        raise ValueError(f"expected {code.n_vars} bits, got shape {bits.shape}")
    acc = np.add.reduceat(bits[code.col_idx].astype(np.int64), code.row_ptr[:-1])
    return bool(np.all(acc % 2 == 0))
