"""Plan the glideslope and flare, then fly it with dynamic inversion.

Run with ``python3 demos/03_guidance_and_inversion.py``.
"""

import math

import numpy as np

from tbw_autoland.guidance import desired_state, plan_landing
from tbw_autoland.scenarios import SCENARIOS, ScenarioConfig, evaluate


def main():
    g = plan_landing()
    print("Landing geometry")
    for key in ("V_TD", "V_f", "R", "h_f", "s_f", "s_td"):
        print(f"  {key:<5} {getattr(g, key):10.2f}")

    print("\nReference path")
    for x in np.linspace(g.x_start, g.x_td, 7):
        ref = desired_state(x, g)
        print(f"  x {x:9.1f} m   h {ref.h:7.2f} m   theta {math.degrees(ref.theta):6.3f} deg")

    print("\nDynamic inversion in each scenario")
    for kind in SCENARIOS:
        r = evaluate(ScenarioConfig(kind=kind, controller="di"), keep_history=False)
        print(f"  {kind:<18} TE_theta {r.TE_theta:6.3f} deg  TE_h {r.TE_h:6.3f} m  CE {r.CE:6.3f} deg"
              f"  {r.reason}")


if __name__ == "__main__":
    main()
