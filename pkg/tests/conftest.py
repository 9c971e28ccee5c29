import math
import time

import numpy as np
import pytest
from hypothesis import settings

from tbw_autoland.aircraft import AeroModel
from tbw_autoland.rl import QTable
from tbw_autoland.training import LearningSchedule, train
from tbw_autoland.trim import solve_trim

# first calls pay for numba compilation, so examples carry no deadline
settings.register_profile("tbw", deadline=None)
settings.load_profile("tbw")

# seed set for the full-length training runs
TRAINING_SEEDS = (0, 1, 2)


@pytest.fixture(scope="session")
def nominal():
    return AeroModel.nominal()


@pytest.fixture(scope="session")
def trim160(nominal):
    return solve_trim(nominal, V=160.0, h=100.0)


@pytest.fixture(scope="session")
def glide_trim(nominal):
    return solve_trim(nominal, V=160.0, h=100.0, gamma=-math.radians(3.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _cached_training(cache, method, seed, episodes):
    """Train once per (method, seed, episodes) and keep the result in the pytest cache."""
    key = f"tbw_autoland/{method}_{seed}_{episodes}"
    folder = cache.mkdir(key.replace("/", "_"))
    table_path = folder / "table.qt"
    returns_path = folder / "returns.npy"
    if table_path.exists() and returns_path.exists():
        try:
            return QTable.load(table_path), np.load(returns_path), float((folder / "seconds").read_text())
        except (OSError, ValueError, KeyError):
            pass
    start = time.perf_counter()
    result = train(method, LearningSchedule(), seed=seed, episodes=episodes)
    seconds = time.perf_counter() - start
    result.table.save(table_path)
    np.save(returns_path, result.returns)
    (folder / "seconds").write_text(repr(seconds))
    return result.table, result.returns, seconds


@pytest.fixture(scope="session")
def full_training(request):
    """``{(method, seed): (table, returns, training seconds)}`` at full length.

    Cached between sessions; delete ``.pytest_cache`` to retrain from scratch.
    """
    cache = request.config.cache
    out = {}
    for method in ("fql", "ql"):
        for seed in TRAINING_SEEDS:
            out[method, seed] = _cached_training(cache, method, seed, LearningSchedule().episodes)
    return out


@pytest.fixture(scope="session")
def small_tables():
    """Short training runs, enough to exercise the landing harness end to end."""
    sched = LearningSchedule()
    return {m: train(m, sched, seed=3, episodes=40).table for m in ("fql", "ql")}


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict line, then fail the test if it did not hold."""
    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        request.config.stash.setdefault(_VERDICTS, []).append((number, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
