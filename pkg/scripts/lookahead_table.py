"""Lookahead time per satellite altitude and ring radius, next to the lookback sets.

    python3 scripts/lookahead_table.py --cloud-altitude-km 8
"""

import argparse

import numpy as np

from fsoahead.geometry import lookahead_tau
from fsoahead.orbits import EARTH, orbital_speed
from fsoahead.predictor import TAU_SETS


def lookahead_grid(altitudes_km, radii_m, h_c):
    """tau[i, j] in seconds for altitude i and radius j."""
    out = np.empty((len(altitudes_km), len(radii_m)))
    for i, h_s in enumerate(altitudes_km):
        v = orbital_speed(EARTH.earth_radius + h_s)
        for j, rad in enumerate(radii_m):
            out[i, j] = lookahead_tau(h_s, h_c, rad / 1000.0, v)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cloud-altitude-km", type=float, default=8.0)
    ap.add_argument("--altitudes-km", type=float, nargs="+", default=[400, 800, 1200, 1600, 2000])
    args = ap.parse_args(argv)
    radii = sorted(TAU_SETS)
    tau = lookahead_grid(args.altitudes_km, radii, args.cloud_altitude_km)
    print("altitude_km," + ",".join(f"{r} m" for r in radii))
    for h, row in zip(args.altitudes_km, tau):
        print(f"{h:g}," + ",".join(f"{x:.1f}" for x in row))
    print("lookback set," + ",".join(f"{min(TAU_SETS[r])}-{max(TAU_SETS[r])}" for r in radii))


if __name__ == "__main__":
    main()
