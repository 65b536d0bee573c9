"""Online FSO attenuation predictor: features -> experience buffer -> MLP."""

from dataclasses import dataclass

import numpy as np

from .buffer import ExperienceBatch, ExperienceBuffer, ExperienceSample, buffer_push, sample_batch
from .features import (
    TAU_SETS,
    FeatureLayout,
    LinkHistory,
    assemble_features,
    features_from_records,
)
from .mlp import Mlp, load_checkpoint, mlp_forward, save_checkpoint, sgd_step


@dataclass(frozen=True)
class TrainingConfig:
    batch_size: int = 500
    learning_rate: float = 1e-2
    buffer_capacity: int = 5000
    hidden: tuple = (350, 350, 350, 350, 350)
    dtype: str = "float32"
    label_scale: float = 100.0  # dB per model output unit
    init: str = "lecun"
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.batch_size > self.buffer_capacity:
            raise ValueError("batch size must be in [1, buffer capacity]")
        if self.learning_rate < 0:
            raise ValueError("learning rate must be non-negative")
        if self.label_scale <= 0:
            raise ValueError("label scale must be positive")
        if self.init not in ("lecun", "he"):
            raise ValueError(f"unknown weight init {self.init!r}")


class FsoPredictor:
    """Model plus the buffer whose running statistics standardise its inputs."""

    def __init__(self, layout, config=TrainingConfig(), cap=100.0):
        self.layout = layout
        self.config = config
        self.cap = float(cap)
        self.rng = np.random.default_rng([41, config.seed])
        sizes = (layout.feature_count, *config.hidden, 1)
        self.model = Mlp(sizes, self.rng, dtype=config.dtype, zero_output=True, init=config.init)
        self.buffer = ExperienceBuffer(config.buffer_capacity, layout.feature_count)
        self.mean = np.zeros(layout.feature_count)
        self.std = np.ones(layout.feature_count)
        self.steps = 0
        self.last_loss = None

    def normalize(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def predict_raw(self, X):
        out = self.model.forward(self.normalize(X)).astype(np.float64)
        return out * self.config.label_scale

    def predict(self, X):
        """Predicted FSO attenuation in dB, clamped to the detector range."""
        return np.clip(self.predict_raw(X), 0.0, self.cap)

    def observe(self, X, labels, times, sat_ids):
        self.buffer.push_many(X, labels, times, sat_ids)

    def train_step(self):
        """One SGD step on a random batch once the buffer is deep enough."""
        if len(self.buffer) < self.config.batch_size:
            return None
        self.mean, self.std = self.buffer.feature_stats()
        batch = self.buffer.sample(self.config.batch_size, self.rng)
        self.last_loss = self.model.sgd_step(
            self.normalize(batch.features),
            batch.labels / self.config.label_scale,
            self.config.learning_rate,
        )
        self.steps += 1
        return self.last_loss

    def save(self, path):
        save_checkpoint(
            path,
            self.model,
            {
                "beacon_count": self.layout.beacon_count,
                "tau_set": list(self.layout.tau_set),
                "feature_mean": self.mean.tolist(),
                "feature_std": self.std.tolist(),
                "train_steps": self.steps,
                "label_scale": self.config.label_scale,
            },
        )


def predict_fso(predictor, features):
    out = predictor.predict(np.atleast_2d(features))
    return float(out[0]) if np.ndim(features) == 1 else out


__all__ = [
    "TAU_SETS",
    "ExperienceBatch",
    "ExperienceBuffer",
    "ExperienceSample",
    "FeatureLayout",
    "FsoPredictor",
    "LinkHistory",
    "Mlp",
    "TrainingConfig",
    "assemble_features",
    "buffer_push",
    "features_from_records",
    "load_checkpoint",
    "mlp_forward",
    "predict_fso",
    "sample_batch",
    "save_checkpoint",
    "sgd_step",
]
