"""Lookahead time, line-of-sight / cloud-layer intercepts and the beacon ring.

The cloud layer is a plane at altitude ``h_c`` above the tangent plane of the
FSO station. Intercept coordinates are metres east (x) and north (y) of the
point directly above the station.
"""

from dataclasses import dataclass, field
import math
import numbers

import numpy as np

from .orbits import EARTH, GroundSite, SiteKind, enu_basis


def lookahead_tau(h_s, h_c, x_g, v):
    """Seconds between a beacon path and the FSO path crossing the same cloud point.

    ``h_s`` and ``h_c`` are satellite and cloud altitudes (km), ``x_g`` the
    ground separation of beacon and station (km), ``v`` the satellite speed
    (km/s). Works on symbolic inputs too; validation only runs for reals.
    """
    if all(isinstance(a, numbers.Real) for a in (h_s, h_c, x_g, v)):
        if not (h_c > 0 and h_s >= h_c):
            raise ValueError(f"need h_s >= h_c > 0, got h_s={h_s}, h_c={h_c}")
        if v <= 0 or x_g < 0:
            raise ValueError("need v > 0 and x_g >= 0")
    return (h_s - h_c) * x_g / (v * h_c)


@dataclass(frozen=True)
class CloudIntercept:
    grid_x: float  # m
    grid_y: float  # m
    elevation_at_site: float  # rad


class StationFrame:
    """Local east/north/up frame at the FSO station (km)."""

    def __init__(self, station):
        self.station = station
        self.origin = np.asarray(station.position, dtype=float)
        self.basis = enu_basis(self.origin)

    def to_enu(self, points):
        return (np.asarray(points, dtype=float) - self.origin) @ self.basis.T

    def from_tangent(self, east, north, constants=EARTH):
        """Project a tangent-plane offset (km) down onto the sphere surface."""
        p = self.origin + east * self.basis[0] + north * self.basis[1]
        return p * (constants.earth_radius / np.linalg.norm(p))


@dataclass
class BeaconRing:
    center: GroundSite
    radius: float  # m
    count: int
    sites: list = field(default_factory=list)


def build_beacon_ring(center, radius, count, constants=EARTH):
    """``count`` RF beacons on a circle of ``radius`` metres around ``center``.

    The first beacon is due north, the rest follow clockwise. Beacons get
    site ids 1..count (the station keeps its own id).
    """
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    frame = StationFrame(center)
    r_km = radius / 1000.0
    sites = []
    for k in range(count):
        az = 2.0 * math.pi * k / count
        pos = frame.from_tangent(r_km * math.sin(az), r_km * math.cos(az), constants)
        sites.append(GroundSite(k + 1, SiteKind.RF_BEACON, pos))
    return BeaconRing(center, float(radius), int(count), sites)


class InterceptCalculator:
    """Vectorised intercepts of many site->satellite rays with the cloud layer."""

    def __init__(self, station, sites, h_c):
        self.frame = StationFrame(station)
        self.h_c = float(h_c)
        positions = np.array([s.position for s in sites], dtype=float).reshape(-1, 3)
        self.site_pos = positions
        self.site_enu = self.frame.to_enu(positions)
        self.site_up = positions / np.linalg.norm(positions, axis=1, keepdims=True)

    def __call__(self, sat_positions):
        """Intercepts for satellites (k, 3) against all sites.

        Returns ``(x_m, y_m, elevation)`` each of shape (k, n_sites). Raises if
        any ray starts below the horizon or the satellite is under the layer.
        """
        sat = np.asarray(sat_positions, dtype=float).reshape(-1, 3)
        los = sat[:, None, :] - self.site_pos[None, :, :]
        dist = np.linalg.norm(los, axis=2)
        elevation = np.arcsin(np.clip(np.einsum("ksj,sj->ks", los, self.site_up) / dist, -1, 1))
        sat_enu = self.frame.to_enu(sat)
        up_sat = sat_enu[:, None, 2]
        up_site = self.site_enu[None, :, 2]
        if np.any(elevation <= 0) or np.any(up_sat <= self.h_c):
            raise ValueError("line of sight does not cross the cloud layer above the site")
        s = (self.h_c - up_site) / (up_sat - up_site)
        x = self.site_enu[None, :, 0] + s * (sat_enu[:, None, 0] - self.site_enu[None, :, 0])
        y = self.site_enu[None, :, 1] + s * (sat_enu[:, None, 1] - self.site_enu[None, :, 1])
        return x * 1000.0, y * 1000.0, elevation


def los_cloud_intersection(site, sat_position, h_c, station=None):
    """Where the ray from ``site`` to the satellite pierces the cloud layer.

    ``station`` fixes the cloud-plane origin; defaults to ``site`` itself.
    """
    calc = InterceptCalculator(station if station is not None else site, [site], h_c)
    x, y, el = calc(np.asarray(sat_position, dtype=float)[None, :])
    return CloudIntercept(float(x[0, 0]), float(y[0, 0]), float(el[0, 0]))
