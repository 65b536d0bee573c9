"""Circular-orbit LEO constellation and topocentric look angles.

Spherical, non-rotating Earth. Distances in km, angles in radians, time in s.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    mu: float = 398600.4418  # km^3/s^2
    earth_radius: float = 6371.0  # km

    def __post_init__(self):
        if self.mu <= 0 or self.earth_radius <= 0:
            raise ValueError("mu and earth_radius must be positive")


EARTH = PhysicalConstants()


@dataclass(frozen=True)
class OrbitalElements:
    sat_id: int
    altitude: float
    inclination: float
    raan: float
    phase0: float
    direction: int = 1

    def radius(self, constants=EARTH):
        return constants.earth_radius + self.altitude


@dataclass(frozen=True)
class SatelliteState:
    sat_id: int
    time: float
    position: np.ndarray
    velocity: np.ndarray


class SiteKind(Enum):
    FSO_STATION = "fso"
    RF_BEACON = "rf"


@dataclass(frozen=True)
class GroundSite:
    site_id: int
    kind: SiteKind
    position: np.ndarray


@dataclass(frozen=True)
class Topocentric:
    range: float
    azimuth: float
    elevation: float


def orbital_speed(r, constants=EARTH):
    """Circular orbital speed sqrt(mu / r) in km/s for orbit radius ``r`` km."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError(f"orbit radius must be positive, got {r}")
    v = np.sqrt(constants.mu / r)
    return float(v) if v.ndim == 0 else v


def orbital_period(r, constants=EARTH):
    return TWO_PI * r / orbital_speed(r, constants)


def _plane_basis(inclination, raan):
    # P points at the ascending node, Q is 90 deg ahead in the orbit plane.
    ci, si = np.cos(inclination), np.sin(inclination)
    co, so = np.cos(raan), np.sin(raan)
    p = np.stack([co, so, np.zeros_like(co)], axis=-1)
    q = np.stack([-so * ci, co * ci, si], axis=-1)
    return p, q


def propagate(elements, t, constants=EARTH):
    """State of one satellite ``t`` seconds after epoch."""
    if t < 0:
        raise ValueError("t must be non-negative")
    r = elements.radius(constants)
    v = orbital_speed(r, constants)
    n = elements.direction * v / r
    u = elements.phase0 + n * t
    p, q = _plane_basis(elements.inclination, elements.raan)
    pos = r * (p * math.cos(u) + q * math.sin(u))
    vel = r * n * (-p * math.sin(u) + q * math.cos(u))
    return SatelliteState(elements.sat_id, float(t), pos, vel)


class Constellation:
    """Vectorised propagator over a list of ``OrbitalElements``."""

    def __init__(self, elements, constants=EARTH):
        self.elements = list(elements)
        self.constants = constants
        self.sat_ids = np.array([e.sat_id for e in self.elements], dtype=int)
        self.altitude = np.array([e.altitude for e in self.elements], dtype=float)
        self.radius = constants.earth_radius + self.altitude
        self.speed = np.sqrt(constants.mu / self.radius)
        direction = np.array([e.direction for e in self.elements], dtype=float)
        self.rate = direction * self.speed / self.radius
        self.phase0 = np.array([e.phase0 for e in self.elements], dtype=float)
        self._p, self._q = _plane_basis(
            np.array([e.inclination for e in self.elements], dtype=float),
            np.array([e.raan for e in self.elements], dtype=float),
        )

    def __len__(self):
        return len(self.elements)

    def positions(self, t):
        """(n, 3) Earth-centred positions at time ``t``."""
        u = self.phase0 + self.rate * t
        return self.radius[:, None] * (
            self._p * np.cos(u)[:, None] + self._q * np.sin(u)[:, None]
        )


def generate_constellation(n, altitude_range=(400.0, 2000.0), seed=0):
    """Random circular-orbit constellation.

    Altitude, inclination, RAAN and initial phase are drawn uniformly; the
    along-track direction is +1 or -1 with equal probability.
    """
    lo, hi = altitude_range
    if n < 1:
        raise ValueError("constellation needs at least one satellite")
    if not (0 < lo <= hi):
        raise ValueError(f"invalid altitude range {altitude_range}")
    rng = np.random.default_rng([11, seed])
    alt = rng.uniform(lo, hi, n)
    inc = rng.uniform(0.0, math.pi, n)
    raan = rng.uniform(0.0, TWO_PI, n)
    phase = rng.uniform(0.0, TWO_PI, n)
    direction = rng.choice([-1, 1], n)
    return [
        OrbitalElements(i, float(alt[i]), float(inc[i]), float(raan[i]), float(phase[i]), int(direction[i]))
        for i in range(n)
    ]


def site_from_latlon(site_id, kind, lat, lon, constants=EARTH):
    pos = constants.earth_radius * np.array(
        [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
    )
    return GroundSite(site_id, kind, pos)


def enu_basis(position):
    """Rows are the local east, north and up unit vectors at ``position``."""
    x, y, z = position
    lon = math.atan2(y, x)
    lat = math.atan2(z, math.hypot(x, y))
    sl, cl = math.sin(lat), math.cos(lat)
    so, co = math.sin(lon), math.cos(lon)
    return np.array(
        [
            [-so, co, 0.0],
            [-sl * co, -sl * so, cl],
            [cl * co, cl * so, sl],
        ]
    )


def look_angles(enu):
    """Range, azimuth and elevation from ENU offsets of shape (..., 3)."""
    enu = np.asarray(enu, dtype=float)
    e, n, u = enu[..., 0], enu[..., 1], enu[..., 2]
    horiz = np.hypot(e, n)
    rng = np.hypot(horiz, u)
    az = np.mod(np.arctan2(e, n), TWO_PI)
    el = np.arctan2(u, horiz)
    return rng, az, el


def topocentric(sat_position, site):
    """Range/azimuth/elevation of a satellite seen from ``site``.

    Azimuth is clockwise from local north; elevation is above the local
    tangent plane.
    """
    basis = enu_basis(site.position)
    enu = basis @ (np.asarray(sat_position, dtype=float) - site.position)
    rng, az, el = look_angles(enu)
    return Topocentric(float(rng), float(az), float(el))
