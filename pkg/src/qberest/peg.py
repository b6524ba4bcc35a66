"""Progressive edge growth construction of parity-check matrices.

Columns are processed in ascending target degree. Each edge connects the
column to the check node maximizing local tree depth under BFS expansion of
the current graph (unreached checks are infinitely deep), tie-broken by
lowest current check degree and then lowest check index. The seed only
permutes which physical column receives which target degree; edge growth
itself is deterministic.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ConstructionError
from .ldpc import ParityCheckMatrix
from .rng import derive_seed, fisher_yates_permutation


def round_degree_counts(n: int, distribution) -> list[tuple[int, int]]:
    """Integer column counts per degree via largest-remainder rounding.

    `distribution` is a sequence of (degree, fraction) pairs; fractions must
    sum to 1 within 1e-9. Returns (degree, count) pairs sorted by degree with
    counts summing to exactly n. Deterministic and input-order independent:
    leftovers go to the largest fractional remainders, ties to the smaller
    degree.
    """
    pairs = sorted((int(d), float(f)) for d, f in distribution)
    if not pairs:
        raise ValueError("empty degree distribution")
    degrees = [d for d, _ in pairs]
    if len(set(degrees)) != len(degrees):
        raise ValueError("repeated degree in distribution")
    if any(d < 1 for d in degrees):
        raise ValueError("degrees must be >= 1")
    if any(f < 0 for _, f in pairs):
        raise ValueError("fractions must be non-negative")
    total = sum(f for _, f in pairs)
    if abs(total - 1.0) > 1e-9:
        raise ValueError("fractions sum to %r, expected 1" % total)
    quotas = [(d, f * n) for d, f in pairs]
    counts = {d: math.floor(q) for d, q in quotas}
    leftover = n - sum(counts.values())
    by_remainder = sorted(quotas, key=lambda dq: (-(dq[1] - math.floor(dq[1])), dq[0]))
    for d, _ in by_remainder[:leftover]:
        counts[d] += 1
    return [(d, counts[d]) for d in degrees]


def construct_peg(n: int, m: int, distribution, seed: int) -> ParityCheckMatrix:
    """Build an m x n PEG matrix with the rounded column-degree profile.

    Raises ConstructionError when the rounded profile is infeasible: fewer
    edges than rows (some row would stay empty) or a degree above m (some row
    would repeat a position).
    """
    if n <= 0 or m <= 0 or m >= n:
        raise ConstructionError("need 0 < m < n, got m=%d n=%d" % (m, n))
    counts = round_degree_counts(n, distribution)
    edge_total = sum(d * c for d, c in counts)
    if edge_total < m:
        raise ConstructionError(
            "distribution yields %d edges for %d rows; some row would be empty"
            % (edge_total, m)
        )
    if max(d for d, c in counts if c > 0) > m:
        raise ConstructionError("column degree above m cannot avoid repeats")

    # Ascending-degree processing order; the seed shuffles the assignment of
    # degrees onto physical column indices.
    deg_seq = np.repeat(
        np.array([d for d, _ in counts], dtype=np.int64),
        np.array([c for _, c in counts], dtype=np.int64),
    )
    column_of = fisher_yates_permutation(n, derive_seed(seed, "peg-columns"))

    var_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg_seq, out=var_ptr[1:])
    var_adj = np.full(edge_total, -1, dtype=np.int64)

    from . import _kernels

    cap = max(8, 2 * math.ceil(edge_total / m) + 4)
    while True:
        check_adj = np.full((m, cap), -1, dtype=np.int64)
        check_deg = np.zeros(m, dtype=np.int64)
        var_adj.fill(-1)
        status = _kernels.peg_fill(m, deg_seq, var_ptr, var_adj, check_adj, check_deg)
        if status == 0:
            break
        cap *= 2

    if check_deg.min() < 1:
        raise ConstructionError("construction left an empty row")

    checks = var_adj
    cols = column_of[np.repeat(np.arange(n, dtype=np.int64), deg_seq)]
    order = np.lexsort((cols, checks))
    col_index = cols[order]
    row_ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(checks, minlength=m), out=row_ptr[1:])
    return ParityCheckMatrix.from_csr(n, col_index, row_ptr)


def measure_girth(matrix: ParityCheckMatrix, cap: int = 8):
    """Length of the shortest cycle in the Tanner graph if <= cap, else None."""
    if cap < 4:
        raise ValueError("cap below the bipartite minimum of 4")
    order = np.argsort(matrix.col_index, kind="stable")
    row_of = np.repeat(np.arange(matrix.m, dtype=np.int64), matrix.row_degrees())
    col_adj = row_of[order]
    col_ptr = np.zeros(matrix.n + 1, dtype=np.int64)
    np.cumsum(matrix.column_degrees(), out=col_ptr[1:])

    from . import _kernels

    found = _kernels.girth_search(
        matrix.n, col_ptr, col_adj, matrix.row_ptr, matrix.col_index, cap
    )
    return int(found) if found else None
