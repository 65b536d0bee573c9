"""Feature layouts and per-satellite lookback history."""

from dataclasses import dataclass

import numpy as np

# Lookback offsets (s) per beacon-ring radius (m).
TAU_SETS = {
    250: (7, 8, 9, 10),
    500: (14, 15, 16, 17, 18, 19),
    750: (21, 22, 24, 26, 27, 28),
    1000: (28, 30, 32, 34, 36, 38),
}

POSITION_FEATURES = 5  # R, AZ, EL, dAZ, dEL


@dataclass(frozen=True)
class FeatureLayout:
    beacon_count: int
    tau_set: tuple

    def __post_init__(self):
        taus = tuple(int(t) for t in self.tau_set)
        if self.beacon_count < 1 or not taus or min(taus) < 1:
            raise ValueError("need at least one beacon and positive lookback offsets")
        if len(set(taus)) != len(taus):
            raise ValueError(f"duplicate lookback offsets in {taus}")
        object.__setattr__(self, "tau_set", taus)

    @property
    def feature_count(self):
        return self.beacon_count * len(self.tau_set) + POSITION_FEATURES

    @property
    def direction_instants(self):
        """Offsets (newer, older) used for the direction increments."""
        taus = sorted(self.tau_set)
        return (taus[0], taus[1]) if len(taus) > 1 else (taus[0], taus[0] + 1)

    @property
    def depth(self):
        """History length (s) needed to assemble a vector."""
        return max(max(self.tau_set), self.direction_instants[1]) + 1


def wrap_angle(a):
    """Map an angle difference into (-pi, pi]."""
    return np.pi - np.mod(np.pi - a, 2.0 * np.pi)


class LinkHistory:
    """Ring buffer of per-satellite RF attenuations and look angles at 1 s resolution.

    A slot counts as measured only if it was written during the second it
    is stamped with; satellites below the elevation mask leave gaps.
    """

    def __init__(self, n_sats, n_beacons, depth):
        self.depth = int(depth)
        self.rf = np.zeros((self.depth, n_sats, n_beacons))
        self.look = np.zeros((self.depth, n_sats, 3))
        self.stamp = np.full((self.depth, n_sats), -1, dtype=np.int64)

    def record(self, t, sat_index, rf, look):
        """Store measurements for satellites ``sat_index`` at second ``t``.

        ``rf`` is (k, n_beacons) dB, ``look`` is (k, 3) range/azimuth/elevation.
        Any satellite not listed has no measurement at ``t``.
        """
        slot = t % self.depth
        self.stamp[slot] = -1
        self.stamp[slot, sat_index] = t
        self.rf[slot, sat_index] = rf
        self.look[slot, sat_index] = look

    def has(self, t, sat_index):
        if t < 0:
            return np.zeros(np.shape(sat_index), dtype=bool)
        return self.stamp[t % self.depth, sat_index] == t

    def assemble(self, layout, sat_index, t):
        """Feature rows for satellites ``sat_index`` predicting second ``t``.

        Returns ``(complete, X)``: a boolean mask over ``sat_index`` and the
        (n_complete, feature_count) matrix for those rows.
        """
        sat_index = np.asarray(sat_index, dtype=int)
        newer, older = layout.direction_instants
        needed = set(layout.tau_set) | {newer, older}
        if max(needed) >= self.depth:
            raise ValueError("history too short for this layout")
        complete = np.ones(sat_index.shape, dtype=bool)
        for tau in needed:
            complete &= self.has(t - tau, sat_index)
        idx = sat_index[complete]
        rf = np.stack([self.rf[(t - tau) % self.depth, idx] for tau in layout.tau_set], axis=2)
        pos = self.look[(t - newer) % self.depth, idx]
        prev = self.look[(t - older) % self.depth, idx]
        d_az = wrap_angle(pos[:, 1] - prev[:, 1])
        d_el = pos[:, 2] - prev[:, 2]
        X = np.concatenate(
            [rf.reshape(len(idx), layout.beacon_count * len(layout.tau_set)), pos, d_az[:, None], d_el[:, None]], axis=1
        )
        return complete, X


def assemble_features(history, layout, sat_index, t):
    """Single feature vector, or ``None`` when the lookback window is incomplete.

    RF entries are ordered beacon-major then by lookback offset, followed by
    range, azimuth, elevation at ``t - min(tau)`` and the azimuth/elevation
    increments between the two most recent lookback instants.
    """
    complete, X = history.assemble(layout, [sat_index], t)
    return X[0] if complete[0] else None


def features_from_records(records, layout, sat_id, t):
    """Rebuild a feature vector from trace-style records.

    ``records`` maps ``(time, sat_id)`` to ``(rf_list, (range, az, el))``.
    Independent of ``LinkHistory``; used to audit stored samples.
    """
    newer, older = layout.direction_instants
    for tau in set(layout.tau_set) | {newer, older}:
        if (t - tau, sat_id) not in records:
            return None
    rf = [[records[(t - tau, sat_id)][0][b] for tau in layout.tau_set] for b in range(layout.beacon_count)]
    flat = [v for row in rf for v in row]
    r, az, el = records[(t - newer, sat_id)][1]
    _, az0, el0 = records[(t - older, sat_id)][1]
    d_az = float(wrap_angle(np.float64(az) - az0))
    return np.array(flat + [r, az, el, d_az, el - el0])
