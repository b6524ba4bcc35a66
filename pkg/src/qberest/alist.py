"""alist reader/writer for parity-check matrices.

Layout (whitespace-separated integers, 1-based positions):

    line 1: n m
    line 2: max_column_degree max_row_degree
    line 3: n column degrees
    line 4: m row degrees
    next n lines: rows adjacent to each column
    next m lines: columns adjacent to each row

Zero entries in adjacency lines are padding and are ignored on read; this
writer emits unpadded lines. Errors carry the offending 1-based line number.
"""

from __future__ import annotations

import numpy as np

from .exceptions import AlistParseError
from .ldpc import ParityCheckMatrix


def save_alist(matrix: ParityCheckMatrix, path) -> None:
    n = matrix.n
    m = matrix.m
    row_deg = matrix.row_degrees()
    col_deg = matrix.column_degrees()
    # Column adjacency from the row-major storage.
    order = np.argsort(matrix.col_index, kind="stable")
    row_of = np.repeat(np.arange(m, dtype=np.int64), row_deg)
    col_rows = row_of[order]
    col_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(col_deg, out=col_ptr[1:])
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%d %d\n" % (n, m))
        fh.write("%d %d\n" % (col_deg.max(), row_deg.max()))
        fh.write(" ".join(str(int(d)) for d in col_deg) + "\n")
        fh.write(" ".join(str(int(d)) for d in row_deg) + "\n")
        for c in range(n):
            ids = col_rows[col_ptr[c] : col_ptr[c + 1]] + 1
            fh.write(" ".join(str(int(r)) for r in ids) + "\n")
        for r in range(m):
            ids = matrix.row(r) + 1
            fh.write(" ".join(str(int(c)) for c in ids) + "\n")


def _int_fields(line, line_no):
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise AlistParseError("non-integer token", line_no)


def load_alist(path) -> ParityCheckMatrix:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    # Trailing blank lines are tolerated; blank lines elsewhere are not.
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise AlistParseError("empty file", 1)

    def need(idx):
        if idx >= len(lines):
            raise AlistParseError("unexpected end of file", len(lines) + 1)
        return lines[idx]

    header = _int_fields(need(0), 1)
    if len(header) != 2:
        raise AlistParseError("header must be 'n m'", 1)
    n, m = header
    if n <= 0 or m <= 0:
        raise AlistParseError("n and m must be positive", 1)
    if m >= n:
        raise AlistParseError("m must be smaller than n", 1)
    maxdeg = _int_fields(need(1), 2)
    if len(maxdeg) != 2:
        raise AlistParseError("expected max column and row degrees", 2)
    max_col, max_row = maxdeg
    col_deg = _int_fields(need(2), 3)
    if len(col_deg) != n:
        raise AlistParseError("expected %d column degrees" % n, 3)
    row_deg = _int_fields(need(3), 4)
    if len(row_deg) != m:
        raise AlistParseError("expected %d row degrees" % m, 4)
    if col_deg and max(col_deg) != max_col:
        raise AlistParseError("max column degree disagrees with line 2", 3)
    if row_deg and max(row_deg) != max_row:
        raise AlistParseError("max row degree disagrees with line 2", 4)

    def adjacency(start, count, degrees, limit, what):
        out = []
        for i in range(count):
            line_no = start + i + 1
            entries = [x for x in _int_fields(need(start + i), line_no) if x != 0]
            if len(entries) != degrees[i]:
                raise AlistParseError(
                    "%s %d lists %d entries, degree says %d"
                    % (what, i + 1, len(entries), degrees[i]),
                    line_no,
                )
            for x in entries:
                if not 1 <= x <= limit:
                    raise AlistParseError(
                        "position %d out of range [1, %d]" % (x, limit), line_no
                    )
            out.append(sorted(x - 1 for x in entries))
        return out

    cols = adjacency(4, n, col_deg, m, "column")
    rows = adjacency(4 + n, m, row_deg, n, "row")
    if len(lines) > 4 + n + m:
        raise AlistParseError("trailing data", 4 + n + m + 1)

    try:
        matrix = ParityCheckMatrix(n, rows)
    except ValueError as exc:
        raise AlistParseError(str(exc), 4 + n + 1)

    # Cross-check the column view against the row view.
    rebuilt = [[] for _ in range(n)]
    for r, row in enumerate(rows):
        for c in row:
            rebuilt[c].append(r)
    for c in range(n):
        if rebuilt[c] != cols[c]:
            raise AlistParseError(
                "column %d adjacency disagrees with row lines" % (c + 1), 4 + c + 1
            )
    return matrix
