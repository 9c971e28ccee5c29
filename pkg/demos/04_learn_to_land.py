"""Train fuzzy and tabular Q-learning attitude controllers and land with them.

Full-length training takes about a minute per learner. Pass a smaller
episode count to try it quickly::

    python3 demos/04_learn_to_land.py 2000
"""

import sys

from tbw_autoland.scenarios import SCENARIOS, ScenarioConfig, compare, evaluate
from tbw_autoland.training import LearningSchedule, train


def main(episodes):
    tables = {}
    for method in ("fql", "ql"):
        result = train(method, LearningSchedule(), seed=0, episodes=episodes)
        tail = result.returns[-min(1000, len(result.returns)):]
        print(f"{method}: {episodes} episodes, final returns mean {tail.mean():.4g}, std {tail.std():.4g}")
        tables[method] = result.table

    runs = [evaluate(ScenarioConfig(kind=k, controller=c), tables.get(c), keep_history=False)
            for k in SCENARIOS for c in ("fql", "ql", "di")]
    print()
    print(compare(runs)["text"])


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else LearningSchedule().episodes)
