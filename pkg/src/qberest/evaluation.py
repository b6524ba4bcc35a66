"""Block-by-block evaluation of the three QBER estimators.

For every simulated block: pick a code from the pool using the previous
block's realized error rate, draw the extension layout, extend both keys,
exchange syndromes, and estimate the current QBER three ways (previous
block, syndrome likelihood, their mean). Aggregates are population statistics
of q_true - q_estimate: bias is the mean, accuracy the root mean square.

Everything derives from the config seed, so a run is reproducible
byte-for-byte; parallel execution computes identical records because each
block is a pure function of (config, block_index, trace, q_prev).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SimulationConfig
from .estimator import effective_degrees, estimate_qber_syndrome
from .exceptions import EstimationError
from .extension import extend_key, plan_extension, select_code
from .ldpc import CodePool, load_pool, relative_syndrome, syndrome
from .rng import derive_seed
from .simulate import generate_key_pair, trace_values, with_seed

_SELECT_CLAMP = 1e-6


@dataclass
class BlockRecord:
    block_index: int
    n: int
    n_s: int
    n_p: int
    rate: float
    q_true: float
    q_prev: float
    q_synd: float
    q_mix: float
    m_eff: int
    converged: bool


@dataclass
class ApproachStats:
    bias: float
    accuracy: float
    blocks_used: int


@dataclass
class EvaluationReport:
    prev: ApproachStats
    synd: ApproachStats
    mix: ApproachStats

    def rows(self):
        return [("prev", self.prev), ("synd", self.synd), ("mix", self.mix)]


def _evaluate_block(
    pool: CodePool, config: SimulationConfig, index: int, q_channel: float,
    q_prev: float,
) -> BlockRecord:
    n = config.n
    pair = generate_key_pair(
        n - config.n_d, q_channel, derive_seed(config.seed, "keys", index)
    )
    q_sel = min(max(q_prev, _SELECT_CLAMP), 0.5 - _SELECT_CLAMP)
    sel = select_code(pool, q_sel, config.n_d)
    layout = plan_extension(
        n, sel.n_s, sel.n_p, derive_seed(config.seed, "layout", index)
    )
    rng_a = np.random.default_rng(derive_seed(config.seed, "puncture-a", index))
    rng_b = np.random.default_rng(derive_seed(config.seed, "puncture-b", index))
    ext_a = extend_key(pair.key_a, layout, puncture_rng=rng_a)
    ext_b = extend_key(pair.key_b, layout, puncture_rng=rng_b)
    delta = relative_syndrome(syndrome(sel.matrix, ext_a), syndrome(sel.matrix, ext_b))
    profile = effective_degrees(sel.matrix, layout)
    try:
        est = estimate_qber_syndrome(delta, profile, config.prior)
        q_synd = est.qber
        m_eff = est.m_eff
        converged = est.converged
    except EstimationError:
        q_synd = math.nan
        m_eff = profile.m_eff
        converged = False
    return BlockRecord(
        block_index=index,
        n=n,
        n_s=sel.n_s,
        n_p=sel.n_p,
        rate=sel.rate,
        q_true=pair.realized_error_fraction,
        q_prev=q_prev,
        q_synd=q_synd,
        q_mix=0.5 * (q_prev + q_synd),
        m_eff=m_eff,
        converged=converged,
    )


_WORKER_POOLS: dict = {}


def _worker_chunk(args):
    pool_dir, config, start, trace_chunk, q_prev_chunk = args
    pool = _WORKER_POOLS.get(pool_dir)
    if pool is None:
        pool = load_pool(pool_dir)
        _WORKER_POOLS[pool_dir] = pool
    return [
        _evaluate_block(pool, config, start + j, trace_chunk[j], q_prev_chunk[j])
        for j in range(len(trace_chunk))
    ]


def run_evaluation(
    config: SimulationConfig, *, pool: CodePool | None = None, workers: int | None = None
):
    """Simulate config.blocks blocks; returns (records, report)."""
    if pool is None:
        pool = load_pool(config.pool_dir)
    if pool.n != config.n:
        raise ValueError(
            "config n=%d but pool holds frames of n=%d" % (config.n, pool.n)
        )
    if not 0.0 < config.q_init < 0.5:
        raise ValueError("q_init outside (0, 0.5)")
    if config.blocks < 1:
        raise ValueError("blocks must be >= 1")
    trace = trace_values(
        with_seed(config.trace, derive_seed(config.seed, "trace")), config.blocks
    )

    records: list[BlockRecord]
    if workers is None or workers <= 1:
        records = []
        q_prev = config.q_init
        for i in range(config.blocks):
            record = _evaluate_block(pool, config, i, trace[i], q_prev)
            records.append(record)
            q_prev = record.q_true
    else:
        # The q_prev chain depends on realized fractions only, so a cheap
        # sequential pass fixes it and blocks then evaluate independently.
        q_prev_arr = np.empty(config.blocks, dtype=np.float64)
        q_prev_arr[0] = config.q_init
        for i in range(config.blocks - 1):
            pair = generate_key_pair(
                config.n - config.n_d, trace[i], derive_seed(config.seed, "keys", i)
            )
            q_prev_arr[i + 1] = pair.realized_error_fraction
        chunk = max(1, math.ceil(config.blocks / (workers * 4)))
        tasks = [
            (
                config.pool_dir,
                config,
                start,
                list(trace[start : start + chunk]),
                list(q_prev_arr[start : start + chunk]),
            )
            for start in range(0, config.blocks, chunk)
        ]
        records = []
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(_worker_chunk, tasks):
                records.extend(part)
    return records, compute_report(records)


def compute_report(records) -> EvaluationReport:
    """Aggregate bias/accuracy per approach.

    The previous-block estimator has no failure mode and uses every block;
    the syndrome and mixed estimators use converged blocks only.
    """
    q_true = np.array([r.q_true for r in records], dtype=np.float64)
    ok = np.array([r.converged for r in records], dtype=bool)

    def stats(estimates, mask):
        err = q_true[mask] - estimates[mask]
        used = int(mask.sum())
        if used == 0:
            return ApproachStats(bias=math.nan, accuracy=math.nan, blocks_used=0)
        return ApproachStats(
            bias=float(err.mean()),
            accuracy=float(np.sqrt(np.mean(err * err))),
            blocks_used=used,
        )

    all_mask = np.ones(len(records), dtype=bool)
    prev = np.array([r.q_prev for r in records], dtype=np.float64)
    synd = np.array([r.q_synd for r in records], dtype=np.float64)
    mix = np.array([r.q_mix for r in records], dtype=np.float64)
    return EvaluationReport(
        prev=stats(prev, all_mask), synd=stats(synd, ok), mix=stats(mix, ok)
    )


def _fmt(x: float) -> str:
    return "%.17g" % x


_BLOCK_HEADER = [
    "block_index", "n", "n_s", "n_p", "rate", "q_true", "q_prev", "q_synd",
    "q_mix", "m_eff", "converged",
]


def write_blocks_csv(records, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_BLOCK_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.block_index, r.n, r.n_s, r.n_p, _fmt(r.rate), _fmt(r.q_true),
                    _fmt(r.q_prev), _fmt(r.q_synd), _fmt(r.q_mix), r.m_eff,
                    int(r.converged),
                ]
            )


def read_blocks_csv(path) -> list:
    records = []
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _BLOCK_HEADER:
            raise ValueError("unexpected blocks.csv header in %s" % path)
        for row in reader:
            records.append(
                BlockRecord(
                    block_index=int(row[0]),
                    n=int(row[1]),
                    n_s=int(row[2]),
                    n_p=int(row[3]),
                    rate=float(row[4]),
                    q_true=float(row[5]),
                    q_prev=float(row[6]),
                    q_synd=float(row[7]),
                    q_mix=float(row[8]),
                    m_eff=int(row[9]),
                    converged=bool(int(row[10])),
                )
            )
    return records


def write_report_csv(report: EvaluationReport, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_report_csv(report))


def format_report_csv(report: EvaluationReport) -> str:
    lines = ["approach,bias,accuracy,blocks_used"]
    for name, stats in report.rows():
        lines.append(
            "%s,%s,%s,%d" % (name, _fmt(stats.bias), _fmt(stats.accuracy),
                             stats.blocks_used)
        )
    return "\n".join(lines) + "\n"


_APPROACH_FIELD = {"prev": "q_prev", "synd": "q_synd", "mix": "q_mix"}


def error_histogram(records, approach: str, bin_width: float = 5e-4):
    """Density histogram of q_true - q_<approach> with stable bin edges.

    Edges sit on integer multiples of bin_width, so identical data always
    lands in identical bins. Densities integrate to one.
    """
    if approach not in _APPROACH_FIELD:
        raise ValueError("approach must be one of prev, synd, mix")
    if bin_width <= 0.0:
        raise ValueError("bin_width must be positive")
    field = _APPROACH_FIELD[approach]
    errors = [
        r.q_true - getattr(r, field)
        for r in records
        if approach == "prev" or r.converged
    ]
    if not errors:
        raise ValueError("no usable blocks to histogram")
    arr = np.asarray(errors, dtype=np.float64)
    idx = np.floor(arr / bin_width).astype(np.int64)
    lo = int(idx.min())
    counts = np.bincount(idx - lo)
    total = arr.size
    rows = []
    for k, count in enumerate(counts):
        left = (lo + k) * bin_width
        right = (lo + k + 1) * bin_width
        rows.append((left, right, count / (total * bin_width)))
    return rows


def write_histogram_csv(rows, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("bin_left,bin_right,density\n")
        for left, right, density in rows:
            fh.write("%s,%s,%s\n" % (_fmt(left), _fmt(right), _fmt(density)))


def write_outputs(records, report: EvaluationReport, out_dir,
                  bin_width: float = 5e-4) -> None:
    """Write blocks.csv, report.csv and the three histogram CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    write_blocks_csv(records, os.path.join(out_dir, "blocks.csv"))
    write_report_csv(report, os.path.join(out_dir, "report.csv"))
    for approach in ("prev", "synd", "mix"):
        rows = error_histogram(records, approach, bin_width)
        write_histogram_csv(rows, os.path.join(out_dir, "hist_%s.csv" % approach))
