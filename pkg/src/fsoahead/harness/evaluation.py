from dataclasses import dataclass, field

import numpy as np


def confusion(truth, predictions, threshold):
    """Counts (TT, TF, FT, FF): truth above/below threshold x prediction above/below."""
    truth = np.asarray(truth, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if truth.shape != predictions.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {predictions.shape}")
    if truth.size == 0:
        raise ValueError("no samples to evaluate")
    t = truth > threshold
    p = predictions > threshold
    return int(np.sum(t & p)), int(np.sum(t & ~p)), int(np.sum(~t & p)), int(np.sum(~t & ~p))


def prediction_accuracy(truth, predictions, threshold=30.0):
    """Fraction of samples where truth and prediction sit on the same side of ``threshold``."""
    tt, _, _, ff = confusion(truth, predictions, threshold)
    return (tt + ff) / len(truth)


@dataclass
class AccuracyReport:
    scenario: str
    a_pred: float
    n_samples: int
    tt: int
    tf: int
    ft: int
    ff: int
    feature_count: int
    seed: int
    beacons: int = 0
    radius_m: float = 0.0
    extra: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, scenario, truth, predictions, threshold, **kw):
        tt, tf, ft, ff = confusion(truth, predictions, threshold)
        n = tt + tf + ft + ff
        return cls(scenario, (tt + ff) / n, n, tt, tf, ft, ff, **kw)

    def to_text(self):
        lines = [
            f"scenario = {self.scenario}",
            f"a_pred = {self.a_pred!r}",
            f"samples = {self.n_samples}",
            f"truth_above_pred_above = {self.tt}",
            f"truth_above_pred_below = {self.tf}",
            f"truth_below_pred_above = {self.ft}",
            f"truth_below_pred_below = {self.ff}",
            f"feature_count = {self.feature_count}",
            f"beacons = {self.beacons}",
            f"radius_m = {self.radius_m!r}",
            f"seed = {self.seed}",
        ]
        lines += [f"{k} = {v}" for k, v in self.extra.items()]
        lines += [f"config.{k} = {v}" for k, v in self.config.items()]
        return "\n".join(lines) + "\n"


def parse_report(text):
    """Key/value dict from a report; numeric fields converted."""
    out = {}
    for line in text.splitlines():
        if "=" not in line:
            continue
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    for k in ("a_pred", "radius_m"):
        out[k] = float(out[k])
    for k in (
        "samples",
        "truth_above_pred_above",
        "truth_above_pred_below",
        "truth_below_pred_above",
        "truth_below_pred_below",
        "feature_count",
        "beacons",
        "seed",
    ):
        out[k] = int(out[k])
    return out
