"""Evolving cloud-thickness raster from filtered two-scale Gaussian noise.

The latent noise raster is advected by whole-pixel wrapping, refreshed with
an autoregressive innovation, thresholded into a cloud mask, blurred and
rescaled so that the mean thickness over cloudy pixels hits a target value.

Grid axis 0 runs east (x), axis 1 north (y). The raster extent is centred
on the point of the cloud layer directly above the FSO station.
"""

from dataclasses import dataclass, field
import hashlib
import math
import struct

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class CloudConfig:
    nx: int = 600
    ny: int = 600
    pixel_size: float = 50.0  # m
    u: int = 30  # downsample coefficient
    wind: tuple = (1.0, 1.0)  # pixels/step
    persistence: float = 0.02
    threshold: float = 0.125  # on the unit-variance latent raster
    blur_sigma: float = 2.0  # pixels
    blur_halfwidth: tuple = None  # (m_k, n_k); default ceil(3 sigma)
    target_mean_thickness: float = 0.30  # km, over cloudy pixels
    layer_altitude: float = 8.0  # km
    seed: int = 0
    # amplitude of the pixel-scale component relative to the coarse one; 0.3 gives
    # km-scale blobs with ragged edges instead of pixel-scale speckle
    fine_weight: float = 0.3
    mask_output: bool = True  # zero the blurred thickness outside the mask

    def __post_init__(self):
        if self.u < 1 or self.nx % self.u or self.ny % self.u:
            raise ValueError(f"grid {self.nx}x{self.ny} is not divisible by u={self.u}")
        if not 0.0 <= self.persistence <= 1.0:
            raise ValueError("persistence must lie in [0, 1]")
        if self.target_mean_thickness <= 0:
            raise ValueError("target mean thickness must be positive")
        if self.pixel_size <= 0 or self.blur_sigma < 0:
            raise ValueError("pixel size must be positive and blur sigma non-negative")
        if self.layer_altitude <= 0:
            raise ValueError("cloud layer altitude must be positive")

    @property
    def halfwidth(self):
        if self.blur_halfwidth is not None:
            return tuple(int(h) for h in self.blur_halfwidth)
        h = int(math.ceil(3.0 * self.blur_sigma))
        return (h, h)

    @property
    def extent(self):
        """Half-widths of the raster in metres along x and y."""
        return 0.5 * self.nx * self.pixel_size, 0.5 * self.ny * self.pixel_size


def gaussian_kernel_1d(sigma, halfwidth):
    if sigma == 0 or halfwidth == 0:
        return np.ones(1)
    m = np.arange(-halfwidth, halfwidth + 1, dtype=float)
    k = np.exp(-0.5 * (m / sigma) ** 2)
    return k / k.sum()


def blur(raster, sigma, halfwidth):
    """Separable truncated-Gaussian blur with wrap-around boundaries."""
    kx = gaussian_kernel_1d(sigma, halfwidth[0])
    ky = gaussian_kernel_1d(sigma, halfwidth[1])
    out = raster
    if kx.size > 1:
        out = ndimage.correlate1d(out, kx, axis=0, mode="wrap")
    if ky.size > 1:
        out = ndimage.correlate1d(out, ky, axis=1, mode="wrap")
    return out if out is not raster else raster.copy()


def upsample_matrix(n, c):
    """(n, c) periodic linear-interpolation weights from c coarse to n fine cells."""
    u = n // c
    w = np.zeros((n, c))
    x = (np.arange(n) + 0.5) / u - 0.5
    i0 = np.floor(x).astype(int)
    f = x - i0
    rows = np.arange(n)
    np.add.at(w, (rows, i0 % c), 1.0 - f)
    np.add.at(w, (rows, (i0 + 1) % c), f)
    return w


@dataclass
class CloudGrid:
    config: CloudConfig
    noise: np.ndarray
    thickness: np.ndarray
    rng: np.random.Generator
    step_count: int = 0
    _wx: np.ndarray = field(default=None, repr=False)
    _wy: np.ndarray = field(default=None, repr=False)
    _fresh_scale: float = 1.0
    _wind_acc: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def fresh_noise(self):
        """Unit-variance fine + upsampled coarse Gaussian raster."""
        cfg = self.config
        fine = self.rng.standard_normal((cfg.nx, cfg.ny))
        if cfg.fine_weight != 1.0:
            fine *= cfg.fine_weight
        coarse = self.rng.standard_normal((cfg.nx // cfg.u, cfg.ny // cfg.u))
        fine += self._wx @ coarse @ self._wy.T
        fine *= self._fresh_scale
        return fine

    def step(self):
        return cloud_step(self)

    def cloud_mask(self):
        return self.noise > self.config.threshold

    def checksum(self):
        return hashlib.sha256(np.ascontiguousarray(self.thickness).tobytes()).hexdigest()


def _render(grid):
    cfg = grid.config
    mask = grid.noise > cfg.threshold
    if not mask.any():
        grid.thickness = np.zeros_like(grid.noise)
        return
    floor = cfg.threshold if math.isfinite(cfg.threshold) else grid.noise.min()
    excess = np.where(mask, grid.noise - floor, 0.0)
    bn = blur(excess, cfg.blur_sigma, cfg.halfwidth)
    thickness = np.where(mask, bn, 0.0) if cfg.mask_output else bn
    cloudy = thickness > 0
    if cloudy.any():
        thickness *= cfg.target_mean_thickness / thickness[cloudy].mean()
    grid.thickness = thickness


def cloud_init(config):
    """Fresh cloud state at step 0 (deterministic in ``config.seed``)."""
    rng = np.random.default_rng([23, config.seed])
    wx = upsample_matrix(config.nx, config.nx // config.u)
    wy = upsample_matrix(config.ny, config.ny // config.u)
    # expected per-pixel variance of fine + interpolated coarse noise
    var = config.fine_weight**2 + np.mean((wx**2).sum(axis=1)) * np.mean((wy**2).sum(axis=1))
    grid = CloudGrid(config, None, None, rng, 0, wx, wy, 1.0 / math.sqrt(var))
    grid.noise = grid.fresh_noise()
    _render(grid)
    return grid


def cloud_step(grid):
    """Advance the cloud state one time step in place and return it."""
    cfg = grid.config
    grid._wind_acc += np.asarray(cfg.wind, dtype=float)
    shift = np.trunc(grid._wind_acc)
    grid._wind_acc -= shift
    sx, sy = int(shift[0]), int(shift[1])
    # WN(i, j) = noise[(i + vx) mod nx, (j + vy) mod ny]
    wn = np.roll(grid.noise, (-sx, -sy), axis=(0, 1)) if (sx or sy) else grid.noise
    p = cfg.persistence
    if p == 0.0:
        grid.noise = wn.copy() if wn is grid.noise else wn
    else:
        mixed = (1.0 - p) * wn + p * grid.fresh_noise()
        mixed /= math.hypot(1.0 - p, p)
        grid.noise = mixed
    grid.step_count += 1
    _render(grid)
    return grid


def thickness_at(grid, x, y):
    """Cloud thickness (km) at layer-plane coordinates ``x``, ``y`` (m).

    Bilinear between pixel centres; the raster is periodic so queries near
    the border interpolate across the wrap.
    """
    cfg = grid.config
    hx, hy = cfg.extent
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) > hx) or np.any(np.abs(y) > hy):
        raise ValueError("query outside the cloud raster extent")
    fx = (x + hx) / cfg.pixel_size - 0.5
    fy = (y + hy) / cfg.pixel_size - 0.5
    i0 = np.floor(fx).astype(int)
    j0 = np.floor(fy).astype(int)
    tx = fx - i0
    ty = fy - j0
    i0 %= cfg.nx
    j0 %= cfg.ny
    i1 = (i0 + 1) % cfg.nx
    j1 = (j0 + 1) % cfg.ny
    t = grid.thickness
    out = (
        (1 - tx) * (1 - ty) * t[i0, j0]
        + tx * (1 - ty) * t[i1, j0]
        + (1 - tx) * ty * t[i0, j1]
        + tx * ty * t[i1, j1]
    )
    return float(out) if out.ndim == 0 else out


def thickness_histogram(grid, bins=50):
    """Empirical PDF of thickness over cloudy pixels: ``(density, edges)``."""
    values = grid.thickness[grid.thickness > 0]
    if values.size == 0:
        raise ValueError("no cloudy pixels")
    return np.histogram(values, bins=bins, density=True)


_RASTER_MAGIC = b"FSOCLD01"
_RASTER_HEADER = struct.Struct("<8siidq")


def write_raster(path, grid):
    """Binary frame: 32-byte header (magic, nx, ny, pixel_size, step) + float32 LE, x-major."""
    cfg = grid.config
    with open(path, "wb") as fh:
        fh.write(_RASTER_HEADER.pack(_RASTER_MAGIC, cfg.nx, cfg.ny, cfg.pixel_size, grid.step_count))
        fh.write(np.ascontiguousarray(grid.thickness, dtype="<f4").tobytes())


def read_raster(path):
    with open(path, "rb") as fh:
        magic, nx, ny, pixel_size, step = _RASTER_HEADER.unpack(fh.read(_RASTER_HEADER.size))
        if magic != _RASTER_MAGIC:
            raise ValueError(f"{path} is not a cloud raster")
        data = np.frombuffer(fh.read(), dtype="<f4").reshape(nx, ny)
    return {"nx": nx, "ny": ny, "pixel_size": pixel_size, "step": step, "thickness": data}
