"""Generate Dryden gusts at landing altitude and compare them with the model.

Run with ``python3 demos/02_turbulence.py``.
"""

import numpy as np

from tbw_autoland.atmosphere import dryden_scales, generate_gusts


def main():
    params = dryden_scales(100.0, 7.7, 160.0)
    print("Light turbulence (7.7 m/s wind at 20 ft) seen at 100 m and 160 m/s")
    print(f"  length scales  Lu={params.L_u:.1f}  Lv={params.L_v:.1f}  Lw={params.L_w:.1f} m")

    dt = 0.01
    gusts = generate_gusts(params, 200_000, dt, np.random.default_rng(0))
    print(f"\n{'axis':>5} {'model sigma':>12} {'sample std':>11} {'lag-1 s corr':>13}")
    lag = int(1.0 / dt)
    for k, (axis, sigma) in enumerate(zip("uvw", (params.sigma_u, params.sigma_v, params.sigma_w))):
        x = gusts[:, k]
        corr = np.corrcoef(x[:-lag], x[lag:])[0, 1]
        print(f"{axis:>5} {sigma:12.3f} {x.std():11.3f} {corr:13.3f}")
    print("\nThe sample spread matches the model, and gusts stay correlated over about a second.")


if __name__ == "__main__":
    main()
