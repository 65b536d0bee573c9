"""Scenario orchestration: the per-second measure / predict / learn loop.

Scenarios that share constellation, station, cloud and elevation mask are
advanced in lockstep on one cloud field, so a sweep over beacon layouts pays
for the cloud simulation once. Every scenario owns its random streams, so a
scenario gives identical output alone or inside a sweep.
"""

from dataclasses import dataclass
import logging
import math
from pathlib import Path

import numpy as np

from ..channel import fso_observed_attenuation
from ..cloudfield import cloud_init, cloud_step, thickness_at
from ..geometry import InterceptCalculator, StationFrame, build_beacon_ring
from ..orbits import EARTH, Constellation, SiteKind, generate_constellation, look_angles, site_from_latlon
from ..predictor import FsoPredictor, LinkHistory
from . import config as cfgmod
from .evaluation import AccuracyReport
from .traces import TraceWriter

log = logging.getLogger(__name__)


def world_key(config):
    return (
        config.constellation,
        config.station_lat_deg,
        config.station_lon_deg,
        config.cloud,
        config.min_elevation_deg,
    )


class World:
    """Cloud layer and constellation as seen from the FSO station."""

    def __init__(self, config):
        c = config.constellation
        elements = generate_constellation(c.n_sats, (c.altitude_min, c.altitude_max), c.seed)
        self.constellation = Constellation(elements, EARTH)
        self.station = site_from_latlon(
            0,
            SiteKind.FSO_STATION,
            math.radians(config.station_lat_deg),
            math.radians(config.station_lon_deg),
        )
        self.frame = StationFrame(self.station)
        self.cloud = cloud_init(config.cloud)
        self.min_elevation = config.min_elevation
        self.t = 0
        self.positions = None
        self.look = None
        self.visible = None

    def advance(self, t):
        """Move to second ``t``: step the cloud and propagate all satellites."""
        while self.t < t:
            cloud_step(self.cloud)
            self.t += 1
        self.positions = self.constellation.positions(float(t))
        rng, az, el = look_angles(self.frame.to_enu(self.positions))
        self.look = np.stack([rng, az, el], axis=1)
        self.visible = np.flatnonzero(el >= self.min_elevation)


@dataclass
class ScenarioResult:
    report: AccuracyReport
    predictor: FsoPredictor
    truth: np.ndarray
    predictions: np.ndarray
    out_dir: Path = None


class ScenarioRun:
    def __init__(self, config, world):
        self.config = config
        self.world = world
        ring = build_beacon_ring(world.station, config.beacon_radius_m, config.beacon_count)
        self.beacon_ids = [s.site_id for s in ring.sites]
        self.intercepts = InterceptCalculator(
            world.station, [world.station] + ring.sites, config.cloud.layer_altitude
        )
        self.layout = config.layout
        self.predictor = FsoPredictor(self.layout, config.training, config.band.fso_detector_cap)
        self.history = LinkHistory(len(world.constellation), config.beacon_count, self.layout.depth)
        self.noise_rng = np.random.default_rng([53, config.rf_noise_seed])
        self.truth = []
        self.predictions = []
        self.eval_end = None
        self.cloud_checksum = None
        self.done = False
        self.out_dir = None
        self.trace = None
        if config.output_dir is not None:
            self.out_dir = Path(config.output_dir) / config.name
            self.out_dir.mkdir(parents=True, exist_ok=True)
            (self.out_dir / "scenario.txt").write_text(cfgmod.dumps(config))
            if config.write_trace:
                self.trace = TraceWriter(
                    self.out_dir / "trace.csv", self.beacon_ids, cfgmod.to_flat(config)
                )

    @property
    def eval_complete(self):
        return len(self.truth) >= self.config.eval.n_samples

    def measure(self, idx):
        """RF (k, n_beacons) and capped FSO (k,) attenuations for satellites ``idx``."""
        band = self.config.band
        x, y, el = self.intercepts(self.world.positions[idx])
        thk = thickness_at(self.world.cloud, x, y)
        slant = thk / np.sin(el)
        fso = fso_observed_attenuation(band.fso_specific_attenuation * slant[:, 0], band)
        rf = band.rf_specific_attenuation * slant[:, 1:]
        if self.config.rf_noise_std_db > 0:
            rf = rf + self.noise_rng.normal(0.0, self.config.rf_noise_std_db, rf.shape)
        return rf, np.atleast_1d(fso)

    def step(self, t):
        cfg = self.config
        w = self.world
        if t == cfg.eval.start_time:
            self.cloud_checksum = w.cloud.checksum()
        idx = w.visible
        nb = cfg.beacon_count
        if len(idx):
            rf, fso = self.measure(idx)
        else:
            rf, fso = np.zeros((0, nb)), np.zeros(0)
        look = w.look[idx]
        self.history.record(t, idx, rf, look)
        complete, X = self.history.assemble(self.layout, idx, t)

        prediction = np.full(len(idx), np.nan)
        evaluated = np.zeros(len(idx), dtype=bool)
        if complete.any():
            # predict before the label is revealed to the learner
            prediction[complete] = self.predictor.predict(X)
            if t >= cfg.eval.start_time and not self.eval_complete:
                slots = np.flatnonzero(complete)[: cfg.eval.n_samples - len(self.truth)]
                evaluated[slots] = True
                self.truth.extend(fso[slots].tolist())
                self.predictions.extend(prediction[slots].tolist())
                if self.eval_complete:
                    self.eval_end = t
            sat_ids = w.constellation.sat_ids[idx[complete]]
            self.predictor.observe(X, fso[complete], np.full(len(sat_ids), t), sat_ids)

        if self.trace is not None:
            self.trace.write(t, w.constellation.sat_ids[idx], look, rf, fso, prediction, evaluated)
        self.predictor.train_step()

        if t >= cfg.duration - 1 or (cfg.eval.stop_when_complete and self.eval_complete):
            self.done = True

    def finish(self):
        cfg = self.config
        if self.trace is not None:
            self.trace.close()
        if not self.truth:
            raise RuntimeError(f"{cfg.name}: no evaluation samples collected before t={cfg.duration}")
        if not self.eval_complete:
            log.warning("%s: only %d of %d evaluation samples collected", cfg.name, len(self.truth), cfg.eval.n_samples)
        loss = self.predictor.last_loss
        report = AccuracyReport.from_pairs(
            cfg.name,
            self.truth,
            self.predictions,
            cfg.eval.threshold_db,
            feature_count=self.layout.feature_count,
            seed=cfg.cloud.seed,
            beacons=cfg.beacon_count,
            radius_m=cfg.beacon_radius_m,
            extra={
                "threshold_db": repr(cfg.eval.threshold_db),
                "eval_start_s": cfg.eval.start_time,
                "eval_end_s": self.eval_end,
                "train_steps": self.predictor.steps,
                "final_batch_loss": repr(loss) if loss is not None else "none",
                "cloud_checksum_at_eval_start": self.cloud_checksum,
            },
            config=cfgmod.to_flat(cfg),
        )
        if self.out_dir is not None:
            (self.out_dir / "report.txt").write_text(report.to_text())
            if cfg.write_checkpoint:
                self.predictor.save(self.out_dir / "model.bin")
        return ScenarioResult(
            report, self.predictor, np.array(self.truth), np.array(self.predictions), self.out_dir
        )


def run_group(configs):
    """Run scenarios sharing one world in lockstep; results in input order."""
    world = World(configs[0])
    runs = [ScenarioRun(c, world) for c in configs]
    horizon = max(c.duration for c in configs)
    try:
        for t in range(horizon):
            active = [r for r in runs if not r.done]
            if not active:
                break
            world.advance(t)
            for r in active:
                r.step(t)
            if t % 1000 == 0:
                log.info("t=%d active=%d visible=%d", t, len(active), len(world.visible))
    finally:
        for r in runs:
            if r.trace is not None:
                r.trace.close()
    return [r.finish() for r in runs]


def run_many(configs):
    """Run scenarios, sharing cloud/orbit computation where worlds coincide."""
    configs = [c.validate() for c in configs]
    groups = {}
    for i, c in enumerate(configs):
        groups.setdefault(world_key(c), []).append(i)
    results = [None] * len(configs)
    for members in groups.values():
        for i, res in zip(members, run_group([configs[i] for i in members])):
            results[i] = res
    return results


def run_scenario(config):
    return run_many([config])[0]


def sweep(configs, table_path=None):
    """Run several scenarios and tabulate their accuracies by (beacons, radius)."""
    if not configs:
        raise ValueError("sweep needs at least one scenario")
    results = run_many(configs)
    reports = [r.report for r in results]
    if table_path is not None:
        Path(table_path).write_text(format_table(reports))
    return results


def format_table(reports):
    """Mean A_pred grid: one row per beacon count, one column per radius."""
    radii = sorted({r.radius_m for r in reports})
    counts = sorted({r.beacons for r in reports})
    lines = ["beacons \\ radius_m," + ",".join(f"{r:g}" for r in radii)]
    for n in counts:
        cells = []
        for rad in radii:
            vals = [r.a_pred for r in reports if r.beacons == n and r.radius_m == rad]
            cells.append(f"{np.mean(vals):.4f}" if vals else "")
        lines.append(f"{n}," + ",".join(cells))
    lines.append("")
    lines.append("scenario,beacons,radius_m,seed,a_pred,samples")
    for r in reports:
        lines.append(f"{r.scenario},{r.beacons},{r.radius_m:g},{r.seed},{r.a_pred!r},{r.n_samples}")
    return "\n".join(lines) + "\n"
