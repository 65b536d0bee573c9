from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExperienceSample:
    features: np.ndarray
    label: float  # dB, detector-capped
    time: int
    sat_id: int


@dataclass(frozen=True)
class ExperienceBatch:
    features: np.ndarray
    labels: np.ndarray
    times: np.ndarray
    sat_ids: np.ndarray

    def __len__(self):
        return len(self.labels)


class ExperienceBuffer:
    """Bounded FIFO of (features, label) experiences backed by ring arrays."""

    def __init__(self, capacity, feature_count):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.feature_count = int(feature_count)
        self._X = np.zeros((self.capacity, self.feature_count))
        self._y = np.zeros(self.capacity)
        self._t = np.zeros(self.capacity, dtype=np.int64)
        self._sat = np.zeros(self.capacity, dtype=np.int64)
        self._head = 0  # next write position
        self._size = 0
        self.pushed = 0

    def __len__(self):
        return self._size

    def push(self, sample):
        self.push_many(sample.features[None, :], [sample.label], [sample.time], [sample.sat_id])
        return self

    def push_many(self, features, labels, times, sat_ids):
        features = np.asarray(features, dtype=float).reshape(-1, self.feature_count)
        for row, label, t, sat in zip(features, labels, times, sat_ids):
            self._X[self._head] = row
            self._y[self._head] = label
            self._t[self._head] = t
            self._sat[self._head] = sat
            self._head = (self._head + 1) % self.capacity
            self._size = min(self._size + 1, self.capacity)
            self.pushed += 1

    def _order(self):
        """Storage indices from oldest to newest."""
        start = (self._head - self._size) % self.capacity
        return (start + np.arange(self._size)) % self.capacity

    def contents(self):
        idx = self._order()
        return ExperienceBatch(self._X[idx].copy(), self._y[idx].copy(), self._t[idx].copy(), self._sat[idx].copy())

    def __iter__(self):
        for i in self._order():
            yield ExperienceSample(self._X[i].copy(), float(self._y[i]), int(self._t[i]), int(self._sat[i]))

    def feature_stats(self):
        """Per-feature mean and std over the stored samples (std floored to 1 when flat)."""
        X = self._X[: self._size] if self._size < self.capacity else self._X
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std[std < 1e-9] = 1.0
        return mean, std

    def sample(self, n, rng):
        """``n`` distinct samples chosen uniformly at random."""
        if n > self._size:
            raise ValueError(f"buffer holds {self._size} samples, batch needs {n}")
        pick = rng.choice(self._size, size=n, replace=False)
        idx = self._order()[pick]
        return ExperienceBatch(self._X[idx], self._y[idx], self._t[idx], self._sat[idx])


def buffer_push(buffer, sample):
    return buffer.push(sample)


def sample_batch(buffer, n, rng):
    return buffer.sample(n, rng)
