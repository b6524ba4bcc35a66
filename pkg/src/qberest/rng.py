"""Deterministic randomness used for position layouts and seed derivation.

Both parties of a reconciliation session must arrive at identical shortened
and punctured position sets from a shared seed, so the shuffle here is pinned
down exactly rather than delegated to a library RNG whose stream may change:

* ``splitmix64(seed, counter)`` is a counter-based 64-bit generator: the
  output for counter ``i`` is the SplitMix64 finalizer applied to
  ``seed + (i + 1) * 0x9E3779B97F4A7C15`` (all arithmetic mod 2**64).
* ``fisher_yates_permutation`` performs the classic descending-index
  Fisher-Yates shuffle of ``range(n)``, drawing bounded values by rejection
  sampling from the counter stream (counter starts at 0, advances by one per
  draw, including rejected draws).

The combination is versioned as ``SHUFFLE_ID`` so independent implementations
can check interoperability. A pure-Python reimplementation lives in the test
suite as the reference oracle; the production path is compiled.
"""

from __future__ import annotations

import hashlib

import numpy as np

SHUFFLE_ID = "fy-sm64-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    # SplitMix64 output function (Steele, Lea, Flood 2014).
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def splitmix64(seed: int, counter: int) -> int:
    """Value of the counter-based generator at position `counter` (>= 0)."""
    if counter < 0:
        raise ValueError("counter must be non-negative")
    state = (int(seed) + (counter + 1) * _GOLDEN) & _MASK64
    return _finalize(state)


def derive_seed(*parts) -> int:
    """Fold integers and string labels into one 64-bit stream seed.

    Used to give every consumer of randomness (trace, per-block keys, layout,
    per-party puncture streams) its own independent, reproducible seed.
    Strings are hashed through BLAKE2b-64 first, so labels of any length mix
    in deterministically.
    """
    state = 0
    for part in parts:
        if isinstance(part, str):
            value = int.from_bytes(
                hashlib.blake2b(part.encode("utf-8"), digest_size=8).digest(), "big"
            )
        elif isinstance(part, (int, np.integer)):
            value = int(part) & _MASK64
        else:
            raise TypeError("seed parts must be int or str, got %r" % type(part))
        state = _finalize((state + _GOLDEN) ^ value)
    return state


def fisher_yates_permutation(n: int, seed: int) -> np.ndarray:
    """Deterministic permutation of range(n) (shuffle id ``SHUFFLE_ID``)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.empty(0, dtype=np.int64)
    from . import _kernels

    return _kernels.fisher_yates(np.int64(n), np.uint64(int(seed) & _MASK64))
