"""Binary symmetric channel key pairs and per-block QBER traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import TraceExhausted

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class KeyPair:
    key_a: np.ndarray
    key_b: np.ndarray
    qber_applied: float
    realized_error_fraction: float


def generate_key_pair(n_bits: int, qber: float, seed: int) -> KeyPair:
    """Uniform key for party A; party B sees it through a BSC(qber)."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    if not 0.0 <= qber <= 0.5:
        raise ValueError("qber outside [0, 0.5]")
    rng = np.random.default_rng(int(seed) & _MASK64)
    key_a = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    errors = (rng.random(n_bits) < qber).astype(np.uint8)
    return KeyPair(
        key_a=key_a,
        key_b=key_a ^ errors,
        qber_applied=float(qber),
        realized_error_fraction=float(errors.mean()),
    )


@dataclass(frozen=True)
class QberTraceModel:
    """Per-block true QBER source: constant, bounded walk, or CSV replay."""

    kind: str
    q0: float = 0.03
    sigma_step: float = 0.0
    clip_low: float = 0.02
    clip_high: float = 0.05
    seed: int = 0
    replay: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "walk", "replay"):
            raise ValueError("unknown trace kind %r" % (self.kind,))
        if self.kind == "constant":
            if not 0.0 < self.q0 < 0.5:
                raise ValueError("q0 outside (0, 0.5)")
        elif self.kind == "walk":
            if not 0.0 < self.clip_low < self.clip_high < 0.5:
                raise ValueError("need 0 < clip_low < clip_high < 0.5")
            if not self.clip_low <= self.q0 <= self.clip_high:
                raise ValueError("q0 outside the clip bounds")
            if self.sigma_step < 0.0:
                raise ValueError("sigma_step must be non-negative")
        else:
            if not self.replay:
                raise ValueError("replay trace needs values")
            for v in self.replay:
                if not 0.0 < v < 0.5:
                    raise ValueError("replay value %r outside (0, 0.5)" % (v,))


def constant_trace(q0: float) -> QberTraceModel:
    return QberTraceModel(kind="constant", q0=q0)


def random_walk_trace(
    q0: float, sigma_step: float, clip_low: float, clip_high: float, seed: int = 0
) -> QberTraceModel:
    return QberTraceModel(
        kind="walk",
        q0=q0,
        sigma_step=sigma_step,
        clip_low=clip_low,
        clip_high=clip_high,
        seed=seed,
    )


def replay_trace_from_csv(path) -> QberTraceModel:
    """Load a `block_index,qber` CSV; block indices must run 0..K-1."""
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["block_index", "qber"]:
            raise ValueError("expected header 'block_index,qber' in %s" % path)
        for i, row in enumerate(reader):
            if len(row) != 2:
                raise ValueError("row %d malformed in %s" % (i + 2, path))
            if int(row[0]) != i:
                raise ValueError("block_index must run 0..K-1 in order")
            values.append(float(row[1]))
    return QberTraceModel(kind="replay", replay=tuple(values))


def with_seed(model: QberTraceModel, seed: int) -> QberTraceModel:
    return replace(model, seed=int(seed))


def trace_values(model: QberTraceModel, num_blocks: int) -> np.ndarray:
    """Materialize the true QBER for blocks 0..num_blocks-1."""
    if num_blocks < 0:
        raise ValueError("num_blocks must be non-negative")
    if model.kind == "constant":
        return np.full(num_blocks, model.q0, dtype=np.float64)
    if model.kind == "replay":
        if num_blocks > len(model.replay):
            raise TraceExhausted(
                "trace holds %d blocks, %d requested"
                % (len(model.replay), num_blocks)
            )
        return np.asarray(model.replay[:num_blocks], dtype=np.float64)
    # Bounded walk: a reflected random walk equals the free walk folded into
    # the band by the triangle-wave map, which vectorizes.
    if num_blocks == 0:
        return np.empty(0, dtype=np.float64)
    rng = np.random.default_rng(int(model.seed) & _MASK64)
    steps = rng.normal(0.0, model.sigma_step, size=num_blocks - 1)
    free = model.q0 + np.cumsum(steps)
    width = model.clip_high - model.clip_low
    phase = np.mod(free - model.clip_low, 2.0 * width)
    folded = model.clip_low + np.where(phase > width, 2.0 * width - phase, phase)
    return np.concatenate(([model.q0], folded))


def next_trace_qber(model: QberTraceModel, block_index: int) -> float:
    """True QBER of one block. Sequential use should prefer trace_values."""
    if block_index < 0:
        raise ValueError("block_index must be non-negative")
    return float(trace_values(model, block_index + 1)[-1])
