"""Scenario configuration and the flat ``dotted.key = value`` scenario file format."""

from dataclasses import dataclass, field, replace
import math
from pathlib import Path

from ..channel import BandCoefficients
from ..cloudfield import CloudConfig
from ..predictor import TAU_SETS, FeatureLayout, TrainingConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ConstellationConfig:
    n_sats: int = 300
    altitude_min: float = 400.0  # km
    altitude_max: float = 2000.0  # km
    seed: int = 0


@dataclass(frozen=True)
class EvalConfig:
    threshold_db: float = 30.0
    n_samples: int = 5000
    start_time: int = 30000  # s
    stop_when_complete: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    constellation: ConstellationConfig = field(default_factory=ConstellationConfig)
    station_lat_deg: float = 36.0
    station_lon_deg: float = -97.0
    cloud: CloudConfig = field(default_factory=CloudConfig)
    beacon_radius_m: float = 250.0
    beacon_count: int = 16
    tau_set: tuple = None  # default: lookup by radius
    min_elevation_deg: float = 30.0
    band: BandCoefficients = field(default_factory=BandCoefficients)
    rf_noise_std_db: float = 0.0
    rf_noise_seed: int = 0
    training: TrainingConfig = field(default_factory=TrainingConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    duration: int = 40000  # s
    output_dir: str = None
    write_trace: bool = True
    write_checkpoint: bool = True

    @property
    def taus(self):
        if self.tau_set is not None:
            return tuple(int(t) for t in self.tau_set)
        key = int(round(self.beacon_radius_m))
        if key not in TAU_SETS:
            raise ConfigError(f"no default lookback set for radius {self.beacon_radius_m} m; set features.tau_set")
        return TAU_SETS[key]

    @property
    def layout(self):
        return FeatureLayout(self.beacon_count, self.taus)

    @property
    def min_elevation(self):
        return math.radians(self.min_elevation_deg)

    def validate(self):
        taus = self.taus
        if self.beacon_count < 1 or self.beacon_radius_m <= 0:
            raise ConfigError("beacon ring needs count >= 1 and radius > 0")
        if not 0 < self.min_elevation_deg < 90:
            raise ConfigError("minimum elevation must be in (0, 90) degrees")
        if max(taus) >= self.eval.start_time:
            raise ConfigError("largest lookback offset must precede the evaluation start")
        if self.duration <= self.eval.start_time:
            raise ConfigError("duration must extend past the evaluation start")
        if self.eval.n_samples < 1:
            raise ConfigError("evaluation needs at least one sample")
        c = self.constellation
        if c.n_sats < 1 or not (0 < c.altitude_min <= c.altitude_max):
            raise ConfigError("invalid constellation size or altitude range")
        if c.altitude_min <= self.cloud.layer_altitude:
            raise ConfigError("satellites must orbit above the cloud layer")
        reach = 1000.0 * self.cloud.layer_altitude / math.tan(self.min_elevation) + self.beacon_radius_m
        hx, hy = self.cloud.extent
        # beacons see the satellite at a slightly lower elevation than the station
        if 1.005 * reach > min(hx, hy):
            raise ConfigError(
                f"cloud raster half-extent {min(hx, hy):.0f} m does not cover intercepts out to {reach:.0f} m"
            )
        return self


def _bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text):
    body = str(text).strip().strip("[]()")
    return tuple(int(float(v)) for v in body.replace(",", " ").split())


def _opt_str(text):
    text = str(text).strip()
    return None if text.lower() in ("", "none") else text


def _opt_int_list(text):
    text = str(text).strip()
    return None if text.lower() in ("", "none", "auto") else _int_list(text)


# dotted key -> (section, attribute, parser)
KEYS = {
    "name": (None, "name", str),
    "constellation.n_sats": ("constellation", "n_sats", int),
    "constellation.altitude_min_km": ("constellation", "altitude_min", float),
    "constellation.altitude_max_km": ("constellation", "altitude_max", float),
    "constellation.seed": ("constellation", "seed", int),
    "station.lat_deg": (None, "station_lat_deg", float),
    "station.lon_deg": (None, "station_lon_deg", float),
    "cloud.nx": ("cloud", "nx", int),
    "cloud.ny": ("cloud", "ny", int),
    "cloud.pixel_size_m": ("cloud", "pixel_size", float),
    "cloud.downsample": ("cloud", "u", int),
    "cloud.wind_px_per_step": ("cloud", "wind", lambda s: tuple(float(v) for v in str(s).strip("[]()").replace(",", " ").split())),
    "cloud.persistence": ("cloud", "persistence", float),
    "cloud.threshold": ("cloud", "threshold", float),
    "cloud.blur_sigma_px": ("cloud", "blur_sigma", float),
    "cloud.blur_halfwidth_px": ("cloud", "blur_halfwidth", _opt_int_list),
    "cloud.mean_thickness_km": ("cloud", "target_mean_thickness", float),
    "cloud.altitude_km": ("cloud", "layer_altitude", float),
    "cloud.seed": ("cloud", "seed", int),
    "cloud.fine_weight": ("cloud", "fine_weight", float),
    "cloud.mask_output": ("cloud", "mask_output", _bool),
    "beacons.radius_m": (None, "beacon_radius_m", float),
    "beacons.count": (None, "beacon_count", int),
    "features.tau_set": (None, "tau_set", _opt_int_list),
    "visibility.min_elevation_deg": (None, "min_elevation_deg", float),
    "band.rf_db_per_km": ("band", "rf_specific_attenuation", float),
    "band.fso_db_per_km": ("band", "fso_specific_attenuation", float),
    "band.fso_cap_db": ("band", "fso_detector_cap", float),
    "rf_noise.std_db": (None, "rf_noise_std_db", float),
    "rf_noise.seed": (None, "rf_noise_seed", int),
    "training.batch_size": ("training", "batch_size", int),
    "training.learning_rate": ("training", "learning_rate", float),
    "training.buffer_capacity": ("training", "buffer_capacity", int),
    "training.hidden": ("training", "hidden", _int_list),
    "training.dtype": ("training", "dtype", str),
    "training.label_scale_db": ("training", "label_scale", float),
    "training.init": ("training", "init", str),
    "training.seed": ("training", "seed", int),
    "eval.threshold_db": ("eval", "threshold_db", float),
    "eval.samples": ("eval", "n_samples", int),
    "eval.start_s": ("eval", "start_time", int),
    "eval.stop_when_complete": ("eval", "stop_when_complete", _bool),
    "run.duration_s": (None, "duration", int),
    "run.output_dir": (None, "output_dir", _opt_str),
    "run.write_trace": (None, "write_trace", _bool),
    "run.write_checkpoint": (None, "write_checkpoint", _bool),
}


def _format(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_format(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def apply_overrides(config, values):
    """New config with ``{dotted_key: value}`` applied (values may be text)."""
    top = {}
    nested = {}
    for key, raw in values.items():
        if key not in KEYS:
            raise ConfigError(f"unknown scenario key {key!r}")
        section, attr, parse = KEYS[key]
        try:
            value = parse(raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        if section is None:
            top[attr] = value
        else:
            nested.setdefault(section, {})[attr] = value
    try:
        for section, attrs in nested.items():
            top[section] = replace(getattr(config, section), **attrs)
        return replace(config, **top)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def with_seed(config, seed):
    """Override every component seed from one master seed."""
    return apply_overrides(
        config,
        {
            "constellation.seed": seed,
            "cloud.seed": seed,
            "training.seed": seed,
            "rf_noise.seed": seed,
        },
    )


def to_flat(config):
    out = {}
    for key, (section, attr, _) in KEYS.items():
        holder = config if section is None else getattr(config, section)
        out[key] = _format(getattr(holder, attr))
    return out


def dumps(config):
    return "".join(f"{k} = {v}\n" for k, v in to_flat(config).items())


def loads(text, base=None):
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return apply_overrides(base or ScenarioConfig(), values)


def load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from None
    return loads(text)
