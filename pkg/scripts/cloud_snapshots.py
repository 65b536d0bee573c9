"""Evolve the default cloud field and write greyscale PGM snapshots plus a thickness histogram.

    python3 scripts/cloud_snapshots.py --steps 300 --every 100 --out cloud_frames
"""

import argparse
from pathlib import Path

import numpy as np

from fsoahead.cloudfield import cloud_init, cloud_step, thickness_histogram
from fsoahead.harness import ScenarioConfig
from fsoahead.harness.config import apply_overrides


def write_pgm(path, thickness, vmax):
    """8-bit binary PGM, north up, east to the right."""
    img = np.clip(thickness / vmax, 0.0, 1.0)
    pixels = (255 * img.T[::-1]).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5 {pixels.shape[1]} {pixels.shape[0]} 255\n".encode())
        fh.write(pixels.tobytes())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=300)
    ap.add_argument("--every", type=int, default=100)
    ap.add_argument("--out", default="cloud_frames")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a cloud.* key")
    args = ap.parse_args(argv)
    config = apply_overrides(ScenarioConfig(), dict(item.split("=", 1) for item in args.set))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = cloud_init(config.cloud)
    vmax = 4 * config.cloud.target_mean_thickness
    for step in range(args.steps + 1):
        if step:
            cloud_step(grid)
        if step % args.every == 0:
            write_pgm(out / f"cloud_{step:06d}.pgm", grid.thickness, vmax)
    density, edges = thickness_histogram(grid, bins=40)
    with open(out / "histogram.csv", "w") as fh:
        fh.write("bin_low_km,bin_high_km,density\n")
        for lo, hi, d in zip(edges[:-1], edges[1:], density):
            fh.write(f"{lo:.5f},{hi:.5f},{d:.6f}\n")
    print(f"cover fraction {np.mean(grid.thickness > 0):.3f}; frames and histogram.csv in {out}")


if __name__ == "__main__":
    main()
