import time

import pytest

import pool_tools


@pytest.fixture(scope="session")
def pool_cache():
    """Directory of cached code pools; builds any missing ones (slow once)."""
    pool_tools.ensure_pools()
    return pool_tools.CACHE_DIR


@pytest.fixture(scope="session")
def table_runs(pool_cache):
    """The four default comparison runs plus their simulation wall time.

    Pool construction is a one-time artifact build and is excluded from the
    timed section; loading the pools from disk and simulating is included.
    """
    from qberest.evaluation import run_evaluation

    runs = {}
    t0 = time.monotonic()
    for n in pool_tools.FRAME_LENGTHS:
        runs[n] = run_evaluation(pool_tools.default_config(n))
    elapsed = time.monotonic() - t0
    return runs, elapsed


@pytest.fixture()
def tiny_pool(tmp_path):
    """Small two-rate pool on disk for CLI and harness tests."""
    from qberest import CodePool, PoolEntry, construct_peg, save_pool
    from qberest.rng import derive_seed

    n = 512
    entries = [
        PoolEntry(0.5, construct_peg(n, 256, [(3, 1.0)], derive_seed(5, "code", 0))),
        PoolEntry(0.75, construct_peg(n, 128, [(3, 1.0)], derive_seed(5, "code", 1))),
    ]
    out = tmp_path / "tinypool"
    save_pool(CodePool(n, entries), out, seed=5)
    return out
