"""Sparse GF(2) parity-check matrices, syndromes, and rate pools.

A matrix is stored as the concatenation of its per-row sorted column
positions (CSR without values; every stored entry is a one). Bit blocks are
plain numpy uint8 arrays of zeros and ones throughout the package.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .exceptions import ConstructionError


def as_bit_block(values, length=None) -> np.ndarray:
    """Coerce to a uint8 0/1 array, optionally checking its length."""
    block = np.asarray(values, dtype=np.uint8)
    if block.ndim != 1:
        raise ValueError("bit block must be one-dimensional")
    if block.size and block.max() > 1:
        raise ValueError("bit block entries must be 0 or 1")
    if length is not None and block.size != length:
        raise ValueError("bit block has length %d, expected %d" % (block.size, length))
    return block


class ParityCheckMatrix:
    """m x n binary parity-check matrix, rows as sorted position sets.

    Parameters
    ----------
    n : int
        Number of columns (extended key length the code applies to).
    rows : sequence of sequences of int
        Unity positions per row, 0-based. Each row must be non-empty with
        distinct positions in [0, n); rows are stored sorted ascending.
    """

    __slots__ = ("n", "col_index", "row_ptr")

    def __init__(self, n, rows):
        arrays = [np.asarray(r, dtype=np.int64) for r in rows]
        lengths = np.array([a.size for a in arrays], dtype=np.int64)
        col_index = (
            np.concatenate(arrays) if arrays else np.empty(0, dtype=np.int64)
        )
        row_ptr = np.zeros(len(arrays) + 1, dtype=np.int64)
        np.cumsum(lengths, out=row_ptr[1:])
        self._init_from_csr(int(n), col_index, row_ptr, sort_rows=True)

    @classmethod
    def from_csr(cls, n, col_index, row_ptr, *, sort_rows=False):
        self = object.__new__(cls)
        self._init_from_csr(int(n), col_index, row_ptr, sort_rows=sort_rows)
        return self

    def _init_from_csr(self, n, col_index, row_ptr, *, sort_rows):
        col_index = np.ascontiguousarray(col_index, dtype=np.int64)
        row_ptr = np.ascontiguousarray(row_ptr, dtype=np.int64)
        m = row_ptr.size - 1
        if n <= 0:
            raise ValueError("n must be positive")
        if m < 1:
            raise ValueError("matrix needs at least one row")
        if m >= n:
            raise ValueError("m must be smaller than n (got m=%d, n=%d)" % (m, n))
        if row_ptr[0] != 0 or row_ptr[-1] != col_index.size:
            raise ValueError("row pointer does not span the position array")
        degrees = np.diff(row_ptr)
        if degrees.min(initial=1) < 1:
            raise ValueError("rows must be non-empty")
        if col_index.size:
            if col_index.min() < 0 or col_index.max() >= n:
                raise ValueError("column positions out of range [0, n)")
        if sort_rows and m > 0:
            row_of = np.repeat(np.arange(m, dtype=np.int64), degrees)
            order = np.lexsort((col_index, row_of))
            col_index = col_index[order]
        # Strictly increasing inside each row <=> sorted and duplicate-free.
        inner = np.ones(col_index.size, dtype=bool)
        inner[row_ptr[:-1]] = False
        if col_index.size > 1 and not np.all(
            np.diff(col_index)[inner[1:]] > 0
        ):
            raise ValueError("duplicate position within a row")
        self.n = n
        self.col_index = col_index
        self.row_ptr = row_ptr

    @property
    def m(self) -> int:
        return self.row_ptr.size - 1

    @property
    def edge_count(self) -> int:
        return int(self.col_index.size)

    def row(self, i) -> np.ndarray:
        return self.col_index[self.row_ptr[i] : self.row_ptr[i + 1]]

    def rows(self):
        return [self.row(i) for i in range(self.m)]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def column_degrees(self) -> np.ndarray:
        return np.bincount(self.col_index, minlength=self.n)

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_index, other.col_index)
        )

    __hash__ = None

    def __repr__(self):
        return "ParityCheckMatrix(m=%d, n=%d, edges=%d)" % (
            self.m,
            self.n,
            self.edge_count,
        )


def syndrome(matrix: ParityCheckMatrix, block) -> np.ndarray:
    """Syndrome H*k over GF(2): bit i is the XOR of the block over row i."""
    bits = as_bit_block(block, matrix.n)
    # reduceat is safe here: rows are non-empty, so segment starts strictly
    # increase and every segment reduces at least one element.
    return np.bitwise_xor.reduceat(bits[matrix.col_index], matrix.row_ptr[:-1])


def relative_syndrome(syndrome_a, syndrome_b) -> np.ndarray:
    """XOR of two parties' syndromes of the same code."""
    a = as_bit_block(syndrome_a)
    b = as_bit_block(syndrome_b)
    if a.size != b.size:
        raise ValueError("syndrome lengths differ (%d vs %d)" % (a.size, b.size))
    return a ^ b


@dataclass(frozen=True)
class PoolEntry:
    rate: float
    matrix: ParityCheckMatrix


class CodePool:
    """Codes of one frame length at ascending rates (at most nine)."""

    def __init__(self, n: int, entries):
        entries = list(entries)
        if not 1 <= len(entries) <= 9:
            raise ValueError("pool must hold between one and nine codes")
        rates = [e.rate for e in entries]
        if sorted(set(rates)) != rates:
            raise ValueError("pool rates must be distinct and ascending")
        for e in entries:
            if not 0.0 < e.rate < 1.0:
                raise ValueError("rate %r outside (0, 1)" % (e.rate,))
            if e.matrix.n != n:
                raise ValueError("pool entry frame length mismatch")
            expect_m = round(n * (1.0 - e.rate))
            if e.matrix.m != expect_m:
                raise ValueError(
                    "rate %g expects m=%d, matrix has m=%d"
                    % (e.rate, expect_m, e.matrix.m)
                )
        self.n = int(n)
        self.entries = entries

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


MANIFEST_NAME = "pool.json"


def save_pool(pool: CodePool, out_dir, *, girths=None, seed=None) -> str:
    """Write alist files plus a pool.json manifest; returns the manifest path.

    `girths` maps rate -> measured girth (None when it exceeds the scan cap).
    """
    from .alist import save_alist

    os.makedirs(out_dir, exist_ok=True)
    codes = []
    for entry in pool.entries:
        fname = "rate_%.4g.alist" % entry.rate
        save_alist(entry.matrix, os.path.join(out_dir, fname))
        record = {"rate": entry.rate, "m": entry.matrix.m, "file": fname}
        if girths is not None:
            record["girth"] = girths.get(entry.rate)
        codes.append(record)
    manifest = {"n": pool.n, "codes": codes}
    if seed is not None:
        manifest["seed"] = int(seed)
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def load_pool(pool_dir) -> CodePool:
    """Load a pool written by save_pool (or an equivalent manifest)."""
    from .alist import load_alist

    path = os.path.join(pool_dir, MANIFEST_NAME)
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    try:
        n = int(manifest["n"])
        codes = manifest["codes"]
    except (KeyError, TypeError) as exc:
        raise ConstructionError("malformed pool manifest %s: %s" % (path, exc))
    entries = []
    for rec in codes:
        matrix = load_alist(os.path.join(pool_dir, rec["file"]))
        entries.append(PoolEntry(rate=float(rec["rate"]), matrix=matrix))
    entries.sort(key=lambda e: e.rate)
    return CodePool(n, entries)
