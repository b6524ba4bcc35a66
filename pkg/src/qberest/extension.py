"""Rate-adaptive key extension: position layouts, entropy, code selection.

An extended frame of length n splits into key, shortened and punctured
position sets drawn from a seeded deterministic shuffle (rng.SHUFFLE_ID), so
two parties sharing the seed derive identical layouts. Shortened bits take a
fixed agreed value (zero by default); punctured bits are filled per party
from independent local randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ldpc import CodePool, ParityCheckMatrix, as_bit_block
from .rng import fisher_yates_permutation


@dataclass(frozen=True)
class ExtensionLayout:
    """Disjoint position sets covering range(frame_len), each sorted."""

    frame_len: int
    shortened: np.ndarray
    punctured: np.ndarray
    key_positions: np.ndarray
    seed: int

    def __post_init__(self):
        total = self.shortened.size + self.punctured.size + self.key_positions.size
        if total != self.frame_len:
            raise ValueError("position sets do not cover the frame")
        merged = np.concatenate((self.shortened, self.punctured, self.key_positions))
        if np.unique(merged).size != self.frame_len:
            raise ValueError("position sets overlap or leave gaps")


def plan_extension(n: int, n_s: int, n_p: int, seed: int) -> ExtensionLayout:
    """Draw the layout for n_s shortened and n_p punctured positions.

    The first n_s entries of the seeded permutation are shortened, the next
    n_p punctured, the rest carry key bits. Each set is returned sorted.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n_s < 0 or n_p < 0 or n_s + n_p >= n:
        raise ValueError("need n_s, n_p >= 0 with n_s + n_p < n")
    perm = fisher_yates_permutation(n, seed)
    return ExtensionLayout(
        frame_len=n,
        shortened=np.sort(perm[:n_s]),
        punctured=np.sort(perm[n_s : n_s + n_p]),
        key_positions=np.sort(perm[n_s + n_p :]),
        seed=int(seed),
    )


def extend_key(block, layout: ExtensionLayout, *, puncture_rng=None,
               shortened_value: int = 0) -> np.ndarray:
    """Assemble the extended frame for one party.

    `puncture_rng` supplies this party's private puncture bits (anything with
    a numpy-style ``integers`` method); it is required when the layout
    punctures. The shortened value must match between parties.
    """
    if shortened_value not in (0, 1):
        raise ValueError("shortened_value must be 0 or 1")
    bits = as_bit_block(block, layout.key_positions.size)
    out = np.empty(layout.frame_len, dtype=np.uint8)
    out[layout.key_positions] = bits
    out[layout.shortened] = shortened_value
    if layout.punctured.size:
        if puncture_rng is None:
            raise ValueError("puncture_rng required when the layout punctures")
        out[layout.punctured] = puncture_rng.integers(
            0, 2, size=layout.punctured.size, dtype=np.uint8
        )
    return out


def binary_entropy(q: float) -> float:
    """Shannon entropy of a bit flipping with probability q, in bits."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q outside [0, 1]")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def efficiency(m: int, n: int, n_s: int, n_p: int, n_add: int, q: float) -> float:
    """Reconciliation efficiency f of one block at error rate q.

    Disclosed parity bits (m - n_p plus any n_add extras) relative to the
    Shannon limit for the n - n_s - n_p key bits actually protected.
    """
    for name, v in (("m", m), ("n", n), ("n_s", n_s), ("n_p", n_p), ("n_add", n_add)):
        if v < 0:
            raise ValueError("%s must be non-negative" % name)
    key_len = n - n_s - n_p
    if key_len <= 0:
        raise ValueError("no key positions left (n - n_s - n_p <= 0)")
    if not 0.0 < q < 1.0:
        raise ValueError("q must be inside (0, 1) for a finite Shannon limit")
    return (m - n_p + n_add) / (key_len * binary_entropy(q))


@dataclass(frozen=True)
class CodeSelection:
    """Chosen code and extension split for one block."""

    rate: float
    matrix: ParityCheckMatrix
    n_s: int
    n_p: int
    predicted_efficiency: float


def select_code(pool: CodePool, q_prev: float, n_d: int) -> CodeSelection:
    """Pick the (rate, n_p) pair whose predicted efficiency is closest to 1.

    Scans every pool entry and every puncture count n_p in [0, n_d], with
    n_s = n_d - n_p, scoring f = (m - n_p) / ((n - n_d) * h(q_prev)). Ties
    prefer the smaller m (higher rate), then the smaller n_p.
    """
    if not 0.0 < q_prev < 0.5:
        raise ValueError("q_prev must be inside (0, 0.5)")
    n = pool.n
    if not 0 <= n_d < n:
        raise ValueError("need 0 <= n_d < n")
    denom = (n - n_d) * binary_entropy(q_prev)
    n_p_grid = np.arange(n_d + 1, dtype=np.float64)
    best = None
    best_key = None
    for entry in pool:
        f = (entry.matrix.m - n_p_grid) / denom
        err = np.abs(f - 1.0)
        i = int(np.argmin(err))  # first minimum: smallest n_p
        key = (float(err[i]), entry.matrix.m, i)
        if best_key is None or key < best_key:
            best_key = key
            best = CodeSelection(
                rate=entry.rate,
                matrix=entry.matrix,
                n_s=n_d - i,
                n_p=i,
                predicted_efficiency=float(f[i]),
            )
    return best
