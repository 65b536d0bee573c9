import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsoahead.cloudfield import (
    CloudConfig,
    blur,
    cloud_init,
    cloud_step,
    gaussian_kernel_1d,
    read_raster,
    thickness_at,
    thickness_histogram,
    upsample_matrix,
    write_raster,
)

SMALL = CloudConfig(nx=120, ny=90, pixel_size=50.0, u=30, seed=3)


def autocorr_length(noise):
    """First lag (px) where the x-axis autocorrelation drops below half its lag-1 value."""
    z = noise - noise.mean()
    var = np.mean(z * z)
    rho = [np.mean(z * np.roll(z, k, axis=0)) / var for k in range(1, noise.shape[0] // 2)]
    for k, r in enumerate(rho, start=1):
        if r < 0.5 * rho[0]:
            return k
    return len(rho)


def test_config_rejects_bad_grid():
    with pytest.raises(ValueError):
        CloudConfig(nx=100, ny=90, u=30)
    with pytest.raises(ValueError):
        CloudConfig(persistence=1.5)
    with pytest.raises(ValueError):
        CloudConfig(target_mean_thickness=0.0)


def test_upsample_single_coarse_cell_is_constant():
    cfg = CloudConfig(nx=60, ny=60, u=60, seed=1, persistence=1.0)
    grid = cloud_init(cfg)
    w = upsample_matrix(60, 1)
    assert np.all(w == 1.0)
    coarse = grid.rng.standard_normal((1, 1))
    up = w @ coarse @ w.T
    assert np.all(up == coarse[0, 0])


def test_upsample_rows_are_partitions_of_unity():
    w = upsample_matrix(600, 20)
    np.testing.assert_allclose(w.sum(axis=1), 1.0)
    assert w.min() >= 0


def test_init_deterministic_by_seed():
    a, b = cloud_init(SMALL), cloud_init(SMALL)
    assert np.array_equal(a.noise, b.noise) and np.array_equal(a.thickness, b.thickness)
    c = cloud_init(replace(SMALL, seed=4))
    assert not np.array_equal(a.noise, c.noise)


def test_steps_deterministic_by_seed():
    a, b = cloud_init(SMALL), cloud_init(SMALL)
    for _ in range(20):
        cloud_step(a)
        cloud_step(b)
        assert a.checksum() == b.checksum()
    assert np.array_equal(a.noise, b.noise)


def test_noise_correlation_length_on_full_grid():
    grid = cloud_init(CloudConfig(seed=11))
    assert autocorr_length(grid.noise) >= 15


def test_pure_advection_shifts_everything():
    cfg = replace(SMALL, persistence=0.0, wind=(2.0, 1.0), threshold=-math.inf, blur_sigma=0.0)
    grid = cloud_init(cfg)
    for _ in range(5):
        noise0, thick0 = grid.noise.copy(), grid.thickness.copy()
        cloud_step(grid)
        # WN(i, j) = noise[(i + vx) mod nx, (j + vy) mod ny]
        expected = np.roll(noise0, (-2, -1), axis=(0, 1))
        assert np.array_equal(grid.noise, expected)
        np.testing.assert_allclose(grid.thickness, np.roll(thick0, (-2, -1), axis=(0, 1)), rtol=1e-12, atol=0)


def test_advection_exact_with_default_filtering():
    cfg = replace(SMALL, persistence=0.0, wind=(1.0, 3.0))
    grid = cloud_init(cfg)
    noise0 = grid.noise.copy()
    for _ in range(7):
        cloud_step(grid)
    assert np.array_equal(grid.noise, np.roll(noise0, (-7, -21), axis=(0, 1)))


def test_fractional_wind_accumulates_whole_pixels():
    cfg = replace(SMALL, persistence=0.0, wind=(0.5, -0.25))
    grid = cloud_init(cfg)
    noise0 = grid.noise.copy()
    for _ in range(4):
        cloud_step(grid)
    assert np.array_equal(grid.noise, np.roll(noise0, (-2, 1), axis=(0, 1)))


def test_full_innovation_decorrelates():
    grid = cloud_init(CloudConfig(persistence=1.0, seed=2))
    before = grid.noise.copy()
    cloud_step(grid)
    rho = np.corrcoef(before.ravel(), grid.noise.ravel())[0, 1]
    assert abs(rho) < 0.05


def test_cross_correlation_peak_follows_wind():
    cfg = CloudConfig(persistence=0.0, wind=(2.0, 1.0), seed=5)
    grid = cloud_init(cfg)
    first = grid.noise.copy()
    for _ in range(100):
        cloud_step(grid)
    # circular cross-correlation via FFT, independent of the roll used in the step
    xc = np.fft.ifft2(np.fft.fft2(first) * np.conj(np.fft.fft2(grid.noise))).real
    peak = np.unravel_index(np.argmax(xc), xc.shape)
    assert peak == (200, 100)


def test_normalization_and_non_negativity_every_step():
    grid = cloud_init(replace(SMALL, persistence=0.05))
    for _ in range(30):
        cloud_step(grid)
        t = grid.thickness
        assert t.min() >= 0
        cloudy = t > 0
        assert cloudy.any()
        assert t[cloudy].mean() == pytest.approx(grid.config.target_mean_thickness, rel=0.01)
        # thickness only where the mask says cloud
        assert not np.any(cloudy & ~grid.cloud_mask())


def test_default_cover_fraction_is_mixed():
    grid = cloud_init(CloudConfig(seed=6))
    cover = np.mean(grid.thickness > 0)
    assert 0.35 < cover < 0.55


def test_noise_variance_stationary_over_10000_steps():
    cfg = CloudConfig(nx=60, ny=60, u=6, persistence=0.05, seed=9)
    grid = cloud_init(cfg)
    v0 = grid.noise.var()
    lo = hi = 1.0
    for _ in range(10_000):
        cloud_step(grid)
        r = grid.noise.var() / v0
        lo, hi = min(lo, r), max(hi, r)
    assert 0.5 <= lo and hi <= 2.0


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.0, 1.5))
def test_mask_monotone_in_threshold(thr, delta):
    base = replace(SMALL, threshold=thr)
    a = cloud_init(base)
    b = cloud_init(replace(base, threshold=thr + delta))
    assert np.count_nonzero(b.thickness > 0) <= np.count_nonzero(a.thickness > 0)
    assert np.count_nonzero(b.cloud_mask()) <= np.count_nonzero(a.cloud_mask())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 4.0))
def test_blur_conserves_sum_and_sign(seed, sigma):
    r = np.random.default_rng(seed).exponential(1.0, (64, 48))
    h = int(math.ceil(3 * sigma))
    out = blur(r, sigma, (h, h))
    assert out.min() >= 0
    assert out.sum() == pytest.approx(r.sum(), rel=1e-6)


def test_kernel_normalized_and_identity_at_zero_sigma():
    assert gaussian_kernel_1d(2.0, 6).sum() == pytest.approx(1.0)
    assert np.array_equal(gaussian_kernel_1d(0.0, 6), [1.0])


def test_clear_sky_threshold():
    grid = cloud_init(replace(SMALL, threshold=math.inf))
    cloud_step(grid)
    assert not grid.thickness.any()
    with pytest.raises(ValueError):
        thickness_histogram(grid)


def _grid_with(thickness):
    cfg = CloudConfig(nx=thickness.shape[0], ny=thickness.shape[1], u=1, pixel_size=10.0)
    grid = cloud_init(cfg)
    grid.thickness = np.asarray(thickness, dtype=float)
    return grid


def test_thickness_at_pixel_centre_and_midpoint():
    t = np.zeros((4, 4))
    t[2, 1] = 0.7
    grid = _grid_with(t)
    # pixel (2, 1) centre: x = 2.5 * 10 - 20, y = 1.5 * 10 - 20
    assert thickness_at(grid, 5.0, -5.0) == pytest.approx(0.7)
    patch = np.zeros((4, 4))
    patch[1:3, 1:3] = [[0.0, 0.0], [1.0, 1.0]]
    grid = _grid_with(patch)
    # midpoint between centres of pixels (1,1),(2,1),(1,2),(2,2) is the origin
    assert thickness_at(grid, 0.0, 0.0) == pytest.approx(0.5)


def test_thickness_at_clear_and_out_of_extent():
    grid = _grid_with(np.zeros((4, 4)))
    assert thickness_at(grid, 3.0, -7.0) == 0.0
    with pytest.raises(ValueError):
        thickness_at(grid, 25.0, 0.0)


def test_histogram_uniform_field_is_a_spike():
    grid = _grid_with(np.full((6, 6), 0.3))
    density, edges = thickness_histogram(grid, bins=20)
    assert np.count_nonzero(density) == 1
    assert np.sum(density * np.diff(edges)) == pytest.approx(1.0, abs=1e-9)


def test_default_histogram_shape():
    grid = cloud_init(CloudConfig(seed=12))
    for _ in range(3):
        cloud_step(grid)
    density, edges = thickness_histogram(grid, bins=40)
    assert np.sum(density * np.diff(edges)) == pytest.approx(1.0, abs=1e-9)
    centres = 0.5 * (edges[1:] + edges[:-1])
    mean = np.sum(centres * density * np.diff(edges))
    assert mean == pytest.approx(0.30, rel=0.02)
    values = grid.thickness[grid.thickness > 0]
    skew = np.mean((values - values.mean()) ** 3) / values.std() ** 3
    assert skew > 0
    # unimodal: density rises to one peak then falls (allowing small wiggles)
    smooth = np.convolve(density, np.ones(3) / 3, mode="same")
    peak = int(np.argmax(smooth))
    rises = np.diff(smooth[: peak + 1])
    falls = np.diff(smooth[peak:])
    tol = 0.02 * smooth.max()
    assert np.all(rises > -tol) and np.all(falls < tol)


def test_raster_roundtrip(tmp_path):
    grid = cloud_init(SMALL)
    cloud_step(grid)
    path = tmp_path / "frame.bin"
    write_raster(path, grid)
    back = read_raster(path)
    assert (back["nx"], back["ny"], back["pixel_size"], back["step"]) == (120, 90, 50.0, 1)
    np.testing.assert_allclose(back["thickness"], grid.thickness, rtol=1e-6)


def test_fine_weight_zero_leaves_smooth_coarse_field():
    grid = cloud_init(replace(SMALL, fine_weight=0.0))
    n = grid.noise
    # piecewise-linear interpolation of coarse cells: second differences vanish inside cells
    assert np.var(np.diff(n, axis=0)) < 0.01 * np.var(n)
    assert n.var() == pytest.approx(1.0, rel=0.5)


def test_fine_weight_scales_pixel_scale_roughness():
    rough = cloud_init(replace(SMALL, fine_weight=1.0)).noise
    smooth = cloud_init(replace(SMALL, fine_weight=0.3)).noise
    # both are rescaled to unit variance; expected ratio is about 0.24
    assert np.var(np.diff(smooth, axis=0)) < 0.35 * np.var(np.diff(rough, axis=0))


def test_unmasked_output_keeps_normalization():
    grid = cloud_init(replace(SMALL, mask_output=False))
    cloud_step(grid)
    t = grid.thickness
    assert np.any((t > 0) & ~grid.cloud_mask())
    assert t[t > 0].mean() == pytest.approx(SMALL.target_mean_thickness, rel=0.01)
