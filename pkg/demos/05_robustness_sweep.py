"""Sweep aerodynamic coefficient scale and approach speed for one controller.

Run with ``python3 demos/05_robustness_sweep.py [episodes]``; the fuzzy
learner is trained first, then flown over the 9 x 9 grid on all cores.
"""

import os
import sys

import numpy as np

from tbw_autoland.scenarios import robustness_sweep, sweep_surface
from tbw_autoland.training import LearningSchedule, train


def main(episodes):
    table = train("fql", LearningSchedule(), seed=0, episodes=episodes).table
    runs = robustness_sweep("fql", table, workers=os.cpu_count() or 1)
    scales, speeds, te = sweep_surface(runs)
    print("TE_theta (deg); rows are coefficient scale, columns initial speed (m/s)")
    print("      " + "".join(f"{v:7.0f}" for v in speeds))
    for s, row in zip(scales, te):
        print(f"{s:6.2f}" + "".join(f"{x:7.3f}" for x in row))
    bad = sum(r.diverged for r in runs)
    print(f"\n{len(runs)} landings, {bad} diverged, worst TE_theta {np.nanmax(te):.3f} deg")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else LearningSchedule().episodes)
