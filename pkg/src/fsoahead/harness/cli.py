"""Command-line entry point: ``fsoahead {run,sweep,cloud-demo,models}``.

Exit status is 0 on success, 1 for configuration or usage errors and 2 for
faults raised while a scenario is running.
"""

import argparse
import logging
import math
from pathlib import Path
import sys

import numpy as np

from .. import __version__
from ..channel import (
    BandCoefficients,
    DielectricParams,
    VisibilityParams,
    fso_observed_attenuation,
    itu_cloud_attenuation,
    itu_specific_attenuation,
    kim_attenuation_coefficient,
    slant_attenuation,
)
from ..cloudfield import cloud_init, cloud_step, write_raster
from ..geometry import lookahead_tau
from ..orbits import EARTH, orbital_speed
from . import config as cfgmod
from .config import ConfigError, ScenarioConfig
from .simulation import format_table, run_scenario, sweep

EXIT_OK, EXIT_CONFIG, EXIT_FAULT = 0, 1, 2

SCENARIO_SUFFIXES = (".txt", ".scn", ".cfg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _overrides(args, run_duration=True):
    values = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        values[key.strip()] = value.strip()
    if getattr(args, "out", None):
        values["run.output_dir"] = args.out
    if run_duration and getattr(args, "duration", None) is not None:
        values["run.duration_s"] = args.duration
    return values


def _prepare(config, args, run_duration=True):
    config = cfgmod.apply_overrides(config, _overrides(args, run_duration))
    if args.seed is not None:
        config = cfgmod.with_seed(config, args.seed)
    return config.validate()


def _summary(report):
    return (
        f"{report.scenario}: A_pred = {report.a_pred:.4f} over {report.n_samples} samples "
        f"({report.beacons} beacons, {report.radius_m:g} m, {report.feature_count} features)"
    )


def cmd_run(args):
    base = cfgmod.load(args.config) if args.config else ScenarioConfig()
    config = _prepare(base, args)
    result = run_scenario(config)
    print(_summary(result.report))
    if result.out_dir is not None:
        print(f"outputs in {result.out_dir}")
    return EXIT_OK


def cmd_sweep(args):
    src = Path(args.config)
    if src.is_dir():
        files = sorted(p for p in src.iterdir() if p.suffix in SCENARIO_SUFFIXES)
    else:
        files = [src]
    if not files:
        raise ConfigError(f"no scenario files ({', '.join(SCENARIO_SUFFIXES)}) in {src}")
    configs = [_prepare(cfgmod.load(p), args) for p in files]
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names must be unique within a sweep")
    table = Path(args.out) / "table.csv" if args.out else None
    results = sweep(configs, table)
    for r in results:
        print(_summary(r.report))
    print()
    print(format_table([r.report for r in results]), end="")
    return EXIT_OK


def cmd_cloud_demo(args):
    base = cfgmod.load(args.config) if args.config else ScenarioConfig()
    config = _prepare(base, args, run_duration=False)
    grid = cloud_init(config.cloud)
    steps = args.duration if args.duration is not None else 100
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    print("step,cover,mean_thickness_km,max_thickness_km,checksum")
    for step in range(steps + 1):
        if step:
            cloud_step(grid)
        if step % args.every == 0:
            t = grid.thickness
            cloudy = t > 0
            mean = float(t[cloudy].mean()) if cloudy.any() else 0.0
            print(f"{step},{cloudy.mean():.4f},{mean:.4f},{t.max():.4f},{grid.checksum()[:16]}")
            if out is not None:
                write_raster(out / f"frame_{step:06d}.bin", grid)
    return EXIT_OK


def cmd_models(args):
    band = BandCoefficients()
    el = math.radians(args.elevation_deg)
    rows = {}
    if args.thickness_km is not None:
        rf = slant_attenuation(args.thickness_km, el, band.rf_specific_attenuation)
        fso = slant_attenuation(args.thickness_km, el, band.fso_specific_attenuation)
        rows["rf_attenuation_db"] = rf
        rows["fso_attenuation_db"] = fso
        rows["fso_observed_db"] = fso_observed_attenuation(fso, band)
    if args.frequency_ghz is not None:
        k_l = itu_specific_attenuation(DielectricParams(args.frequency_ghz, args.eps_real, args.eps_imag))
        rows["itu_specific_attenuation"] = k_l
        if args.liquid_water is not None:
            rows["itu_cloud_attenuation_db"] = itu_cloud_attenuation(args.liquid_water, k_l, el)
    if args.visibility_km is not None:
        rows["kim_attenuation_per_km"] = kim_attenuation_coefficient(
            VisibilityParams(args.visibility_km, args.wavelength_nm)
        )
    if args.sat_altitude_km is not None:
        v = orbital_speed(EARTH.earth_radius + args.sat_altitude_km)
        rows["orbital_speed_km_s"] = v
        rows["lookahead_s"] = lookahead_tau(
            args.sat_altitude_km, args.cloud_altitude_km, args.offset_m / 1000.0, v
        )
    if not rows:
        raise ConfigError("models: give at least one of --thickness-km, --frequency-ghz, --visibility-km, --sat-altitude-km")
    for k, v in rows.items():
        print(f"{k} = {float(np.asarray(v)):.6g}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="fsoahead", description="RF-beacon lookahead prediction of FSO cloud attenuation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_flags(p, config_help):
        p.add_argument("--config", help=config_help)
        p.add_argument("--seed", type=int, help="override every component seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--duration", type=int, help="simulated seconds (cloud-demo: steps)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a scenario key (repeatable)")

    p = sub.add_parser("run", help="run one scenario")
    scenario_flags(p, "scenario file (defaults apply when omitted)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run every scenario file in a directory")
    scenario_flags(p, "directory of scenario files, or a single file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cloud-demo", help="evolve the cloud field and dump raster frames")
    scenario_flags(p, "scenario file whose cloud.* keys are used")
    p.add_argument("--every", type=int, default=10, help="frame interval in steps")
    p.set_defaults(func=cmd_cloud_demo)

    p = sub.add_parser("models", help="evaluate the closed-form channel and geometry models")
    p.add_argument("--elevation-deg", type=float, default=90.0)
    p.add_argument("--thickness-km", type=float, help="cloud thickness for slant attenuation")
    p.add_argument("--frequency-ghz", type=float, help="frequency for the liquid-water coefficient")
    p.add_argument("--eps-real", type=float, default=5.0, help="real permittivity of water")
    p.add_argument("--eps-imag", type=float, default=10.0, help="imaginary permittivity of water")
    p.add_argument("--liquid-water", type=float, help="columnar liquid water, kg/m^2")
    p.add_argument("--visibility-km", type=float)
    p.add_argument("--wavelength-nm", type=float, default=1550.0)
    p.add_argument("--sat-altitude-km", type=float, help="satellite altitude for the lookahead time")
    p.add_argument("--cloud-altitude-km", type=float, default=8.0)
    p.add_argument("--offset-m", type=float, default=500.0, help="beacon distance from the station")
    p.set_defaults(func=cmd_models)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ZeroDivisionError) as exc:
        if args.command == "models":
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except (RuntimeError, FloatingPointError, OSError) as exc:
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
