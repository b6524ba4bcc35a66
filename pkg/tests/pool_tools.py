"""Shared pool cache and default experiment configuration for the tests.

PEG construction at n=40000 takes minutes, so the pools used by the
acceptance experiment live in an on-disk cache under tests/_poolcache
(gitignored). A cold cache is rebuilt through the gen-codes CLI, in
parallel across frame lengths; warm runs just load the alist files.
The cache contents are exactly what the CLI writes, so deleting the
directory and rerunning pytest reproduces it bit for bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from qberest import QberWindowPrior, random_walk_trace
from qberest.config import SimulationConfig

CACHE_DIR = Path(__file__).resolve().parent / "_poolcache"

FRAME_LENGTHS = (4000, 10000, 20000, 40000)
CODE_SEED = 7
RATEGRID_SEED = 11
SIM_SEED = 20260819

# Calibrated pool profiles. The low-rate entry is shared; the high-rate
# entry gets denser columns as the frame grows, which keeps its row-degree
# resolution margin roughly constant while the row count scales with n.
SPARSE_DIST = ((3, 0.4), (5, 0.4), (7, 0.2))
ENGINE_DIST = {
    4000: ((6, 1.0),),
    10000: ((6, 1.0),),
    20000: ((6, 0.5), (7, 0.5)),
    40000: ((7, 1.0),),
}

# Per-block drift of the true error rate; grows with frame length because
# longer frames take longer to accumulate, so more drift passes between
# consecutive blocks.
SIGMA_STEP = {4000: 0.0030, 10000: 0.0032, 20000: 0.0035, 40000: 0.0037}

RATEGRID_RATES = tuple(0.55 + 0.05 * i for i in range(8))


def frame_pool_dir(n: int) -> Path:
    return CACHE_DIR / ("n%d" % n)


def rategrid_dir() -> Path:
    return CACHE_DIR / "n4000_rategrid"


def _pool_ready(path: Path) -> bool:
    # save_pool writes the manifest last, so its presence means a full build.
    return (path / "pool.json").is_file()


def _write_dist(path: Path, dist) -> str:
    with open(path, "w", encoding="ascii") as fh:
        for degree, fraction in dist:
            fh.write("%d %s\n" % (degree, repr(fraction)))
    return str(path)


def build_frame_pool(n: int) -> None:
    from qberest.cli import main

    CACHE_DIR.mkdir(exist_ok=True)
    sparse = _write_dist(CACHE_DIR / ("sparse_%d.dist" % n), SPARSE_DIST)
    engine = _write_dist(CACHE_DIR / ("engine_%d.dist" % n), ENGINE_DIST[n])
    rc = main(
        [
            "gen-codes", "--n", str(n), "--rates", "0.65,0.85",
            "--dist", sparse, "--dist", engine,
            "--seed", str(CODE_SEED), "--out", str(frame_pool_dir(n)),
        ]
    )
    if rc != 0:
        raise RuntimeError("gen-codes failed for n=%d" % n)


def build_rategrid_pool() -> None:
    from qberest.cli import main

    CACHE_DIR.mkdir(exist_ok=True)
    shared = _write_dist(CACHE_DIR / "sparse_rategrid.dist", SPARSE_DIST)
    rc = main(
        [
            "gen-codes", "--n", "4000",
            "--rates", ",".join("%.2f" % r for r in RATEGRID_RATES),
            "--dist", shared,
            "--seed", str(RATEGRID_SEED), "--out", str(rategrid_dir()),
        ]
    )
    if rc != 0:
        raise RuntimeError("gen-codes failed for the rate grid pool")


def ensure_pools() -> None:
    missing = [n for n in FRAME_LENGTHS if not _pool_ready(frame_pool_dir(n))]
    if missing:
        # One process per frame length; the n=40000 build dominates the wall
        # time either way, so more workers than lengths buy nothing.
        workers = min(len(missing), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            list(ex.map(build_frame_pool, missing))
    if not _pool_ready(rategrid_dir()):
        build_rategrid_pool()


def default_config(n: int) -> SimulationConfig:
    """The shipped estimator-comparison experiment at frame length n."""
    return SimulationConfig(
        pool_dir=str(frame_pool_dir(n)),
        n=n,
        n_d=n // 20,
        blocks=1000,
        seed=SIM_SEED,
        q_init=0.03,
        trace=random_walk_trace(0.03, SIGMA_STEP[n], 0.02, 0.05),
        prior=QberWindowPrior(500.0, 500.0, 0.01, 0.08),
    )
