"""Accuracy of the best and worst layouts under several wind speeds (shortened runs).

    python3 scripts/wind_sensitivity.py --winds 0.2 0.5 1.0 --start 6000 --samples 3000
"""

import argparse

from fsoahead.harness import ScenarioConfig, run_many
from fsoahead.harness.config import apply_overrides

LAYOUTS = ((16, 250), (8, 250), (16, 1000), (8, 1000))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--winds", type=float, nargs="+", default=[0.2, 0.5, 1.0], help="px/step along each axis")
    ap.add_argument("--start", type=int, default=6000, help="evaluation start, s")
    ap.add_argument("--samples", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print("wind_px_per_step," + ",".join(f"{n}@{r}" for n, r in LAYOUTS))
    for w in args.winds:
        configs = [
            apply_overrides(
                ScenarioConfig(),
                {
                    "name": f"w{w}_b{n}_r{r}",
                    "beacons.count": n,
                    "beacons.radius_m": r,
                    "cloud.wind_px_per_step": f"[{w}, {w}]",
                    "cloud.seed": args.seed,
                    "constellation.seed": args.seed,
                    "training.seed": args.seed,
                    "eval.start_s": args.start,
                    "eval.samples": args.samples,
                    "eval.stop_when_complete": "true",
                    "run.duration_s": args.start + 4 * args.samples,
                },
            )
            for n, r in LAYOUTS
        ]
        results = run_many(configs)
        print(f"{w:g}," + ",".join(f"{r.report.a_pred:.4f}" for r in results), flush=True)


if __name__ == "__main__":
    main()
