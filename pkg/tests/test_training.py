import numpy as np
import pytest

from tbw_autoland import training
from tbw_autoland.errors import LearningDiverged
from tbw_autoland.rl import QTable, StateGrid
from tbw_autoland.training import LearningSchedule, TrainingResult, train


def test_schedule_decay_and_floor():
    s = LearningSchedule()
    assert s.epsilon(0) == 0.1 and s.alpha(0) == 0.02
    assert s.epsilon(10_000) == pytest.approx(0.07)
    assert s.epsilon(10 ** 9) == 0.04 and s.alpha(10 ** 9) == 0.002
    assert s.steps_per_episode == 500


@pytest.mark.parametrize("kw", [
    {"epsilon_floor": 0.01}, {"alpha_start": 0.0}, {"gamma": 1.0}, {"episodes": -1},
    {"decay_per": "minute"},
])
def test_schedule_validation(kw):
    with pytest.raises(ValueError):
        LearningSchedule(**kw)


@pytest.mark.parametrize("method", ["fql", "ql"])
def test_zero_episodes_gives_zero_table(method):
    r = train(method, episodes=0)
    assert not np.any(r.table.values) and len(r.returns) == 0


@pytest.mark.parametrize("method", ["fql", "ql"])
def test_same_seed_same_table(method):
    a = train(method, seed=5, episodes=100)
    b = train(method, seed=5, episodes=100)
    assert np.array_equal(a.table.values, b.table.values)
    assert np.array_equal(a.returns, b.returns)


def test_different_seed_different_table():
    a = train("ql", seed=1, episodes=20)
    b = train("ql", seed=2, episodes=20)
    assert not np.array_equal(a.table.values, b.table.values)


def test_per_step_decay_runs():
    r = train("fql", LearningSchedule(decay_per="step"), seed=0, episodes=5)
    assert np.all(np.isfinite(r.table.values))


def test_resume_does_not_touch_input():
    first = train("fql", seed=0, episodes=10)
    frozen = first.table.values.copy()
    more = train("fql", seed=1, episodes=10, table=first.table)
    assert np.array_equal(first.table.values, frozen)
    assert not np.array_equal(more.table.values, frozen)


def test_resume_rejects_other_grid():
    with pytest.raises(ValueError):
        train("fql", episodes=1, table=QTable(), grid=StateGrid(sigma_theta=0.001))


def test_unknown_method():
    with pytest.raises(ValueError):
        train("sarsa", episodes=1)


def test_tripwire_aborts_with_context(monkeypatch):
    monkeypatch.setattr(training, "Q_TRIPWIRE", 1.0)
    with pytest.raises(LearningDiverged) as err:
        train("ql", seed=0, episodes=3)
    assert err.value.episode == 0 and err.value.step is not None


def test_progress_callback():
    seen = []
    r = train("ql", seed=0, episodes=4, progress=lambda ep, ret: seen.append((ep, ret)))
    assert [ep for ep, _ in seen] == [0, 1, 2, 3]
    assert [ret for _, ret in seen] == list(r.returns)


def test_moving_average():
    r = TrainingResult(QTable(), np.array([1.0, 3.0, 5.0, 7.0]), "ql", 0, LearningSchedule())
    np.testing.assert_allclose(r.moving_average(2), [1.0, 2.0, 4.0, 6.0])


def test_returns_bounded_by_reward_ceiling():
    r = train("fql", seed=0, episodes=20)
    assert np.all(r.returns <= 2400.0 * LearningSchedule().steps_per_episode)
