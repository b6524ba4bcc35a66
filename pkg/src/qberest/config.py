"""Flat key=value simulation configs.

Recognized keys (one `key = value` per line, `#` starts a comment):

    pool_dir            directory with pool.json + alist files
    n                   extended frame length (must match the pool)
    n_d                 extension budget n_s + n_p per block
    blocks              number of blocks to simulate
    seed                master seed; every stream derives from it
    q_init              q_prev for the first block
    trace.kind          constant | walk | replay
    trace.q0            start/constant value (constant, walk)
    trace.sigma_step    walk step standard deviation (walk)
    trace.clip_low      walk reflection bounds (walk; default 0.02)
    trace.clip_high     (walk; default 0.05)
    trace.file          CSV with header block_index,qber (replay)
    prior.alpha_low     window prior; give all four keys or none
    prior.alpha_high
    prior.q_min
    prior.q_max
    hist.bin_width      optional, histogram bin width (default 0.0005)

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .estimator import QberWindowPrior
from .simulate import QberTraceModel, constant_trace, random_walk_trace, replay_trace_from_csv

_KNOWN = {
    "pool_dir", "n", "n_d", "blocks", "seed", "q_init",
    "trace.kind", "trace.q0", "trace.sigma_step", "trace.clip_low",
    "trace.clip_high", "trace.file",
    "prior.alpha_low", "prior.alpha_high", "prior.q_min", "prior.q_max",
    "hist.bin_width",
}
_PRIOR_KEYS = ("prior.alpha_low", "prior.alpha_high", "prior.q_min", "prior.q_max")


@dataclass
class SimulationConfig:
    pool_dir: str
    n: int
    n_d: int
    blocks: int
    seed: int
    q_init: float
    trace: QberTraceModel
    prior: QberWindowPrior | None
    hist_bin_width: float = 5e-4


def parse_config_text(text: str, base_dir: str = ".") -> SimulationConfig:
    pairs = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("config line %d: expected key = value" % line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN:
            raise ValueError("config line %d: unknown key %r" % (line_no, key))
        if key in pairs:
            raise ValueError("config line %d: duplicate key %r" % (line_no, key))
        pairs[key] = value

    def take(key, convert, default=None, required=True):
        if key not in pairs:
            if required and default is None:
                raise ValueError("config is missing required key %r" % key)
            return default
        try:
            return convert(pairs[key])
        except ValueError as exc:
            raise ValueError("config key %r: %s" % (key, exc))

    kind = take("trace.kind", str)
    if kind == "constant":
        trace = constant_trace(take("trace.q0", float))
    elif kind == "walk":
        trace = random_walk_trace(
            q0=take("trace.q0", float, default=0.03, required=False),
            sigma_step=take("trace.sigma_step", float),
            clip_low=take("trace.clip_low", float, default=0.02, required=False),
            clip_high=take("trace.clip_high", float, default=0.05, required=False),
        )
    elif kind == "replay":
        trace_file = take("trace.file", str)
        trace = replay_trace_from_csv(os.path.join(base_dir, trace_file))
    else:
        raise ValueError("trace.kind must be constant, walk, or replay")

    present = [k for k in _PRIOR_KEYS if k in pairs]
    if not present:
        prior = None
    elif len(present) == len(_PRIOR_KEYS):
        prior = QberWindowPrior(
            alpha_low=take("prior.alpha_low", float),
            alpha_high=take("prior.alpha_high", float),
            q_min=take("prior.q_min", float),
            q_max=take("prior.q_max", float),
        )
    else:
        raise ValueError("give all four prior.* keys or none")

    return SimulationConfig(
        pool_dir=os.path.join(base_dir, take("pool_dir", str)),
        n=take("n", int),
        n_d=take("n_d", int),
        blocks=take("blocks", int),
        seed=take("seed", int),
        q_init=take("q_init", float),
        trace=trace,
        prior=prior,
        hist_bin_width=take("hist.bin_width", float, default=5e-4, required=False),
    )


def load_config(path) -> SimulationConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)))
