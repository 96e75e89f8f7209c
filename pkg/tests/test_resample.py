import math

import numpy as np
import pytest

from sinir.errors import DimensionError, ParameterError
from sinir.resample import bicubic_resize, build_pyramid, fit_scales, round_dim, upsample_by_r

from .oracles import bicubic_loops


@pytest.mark.parametrize("dims", [(7, 5), (30, 41), (1, 1), (13, 13)])
@pytest.mark.parametrize("antialias", [False, True])
def test_constant_image_stays_constant(dims, antialias):
    x = np.full((3, 13, 17), 0.37)
    out = bicubic_resize(x, *dims, antialias=antialias)
    assert out.shape == (3, *dims)
    np.testing.assert_allclose(out, 0.37, rtol=0, atol=1e-14)


def test_identity_resize_is_bit_equal(nprng):
    x = nprng.uniform(-1, 1, (3, 9, 11))
    out = bicubic_resize(x, 9, 11)
    assert np.array_equal(out, x)
    assert out is not x


def test_linear_ramp_upscaled_exactly():
    w = 12
    ramp = np.tile(np.linspace(-0.9, 0.9, w), (1, 5, 1))
    out = bicubic_resize(ramp, 5, 2 * w)
    ref = bicubic_loops(ramp, 5, 2 * w)
    np.testing.assert_allclose(out, ref, atol=1e-14)
    # away from clamped borders the samples lie on the line through the input
    slope = 1.8 / (w - 1)
    for j in range(4, 2 * w - 4):
        src = (j + 0.5) / 2 - 0.5
        np.testing.assert_allclose(out[0, :, j], -0.9 + slope * src, atol=1e-13)


@pytest.mark.parametrize("antialias", [False, True])
@pytest.mark.parametrize("out_dims", [(6, 5), (17, 23), (9, 14)])
def test_resize_matches_kernel_sum_oracle(nprng, antialias, out_dims):
    x = nprng.uniform(-1, 1, (2, 11, 13))
    np.testing.assert_allclose(
        bicubic_resize(x, *out_dims, antialias=antialias),
        bicubic_loops(x, *out_dims, antialias=antialias),
        atol=1e-13,
    )


def test_antialias_only_changes_downsampling(nprng):
    x = nprng.uniform(-1, 1, (3, 10, 10))
    assert np.array_equal(bicubic_resize(x, 20, 20, antialias=True), bicubic_resize(x, 20, 20))
    assert not np.allclose(bicubic_resize(x, 4, 4, antialias=True), bicubic_resize(x, 4, 4))


def test_antialias_suppresses_checkerboard():
    x = np.where((np.add.outer(np.arange(30), np.arange(30)) % 2) == 0, 1.0, -1.0)[None]
    plain = bicubic_resize(x, 10, 10)
    smooth = bicubic_resize(x, 10, 10, antialias=True)
    assert np.abs(smooth).max() < 0.1 < np.abs(plain).max()


def test_resize_rejects_zero_dims():
    with pytest.raises(DimensionError):
        bicubic_resize(np.zeros((3, 4, 4)), 0, 3)


def test_down_up_round_trip_of_constant():
    x = np.full((3, 40, 30), -0.25)
    y = bicubic_resize(bicubic_resize(x, 13, 9, antialias=True), 40, 30)
    np.testing.assert_allclose(y, -0.25, atol=1e-14)


@pytest.mark.parametrize("max_dim, scales", [(125, 8), (250, 11), (500, 13)])
def test_pyramid_scale_counts_match_reported(max_dim, scales):
    pyr = build_pyramid(np.zeros((3, max_dim, max_dim)), max_dim, 25, 4 / 3)
    assert pyr.num_scales == scales
    assert abs(min(pyr.level_dims(pyr.coarsest)) - 25) <= 1


def test_effective_r_closed_form():
    n, r = fit_scales(250, 25, 4 / 3)
    assert n == 11
    assert r == pytest.approx(10 ** (1 / 10), rel=1e-12)
    assert r == pytest.approx(1.2589, abs=1e-4)


def test_pyramid_levels_and_monotonicity(nprng):
    img = nprng.uniform(-1, 1, (3, 120, 90))
    pyr = build_pyramid(img, 250, 25, 4 / 3)
    assert pyr.level(0).shape == (3, 250, 188)
    dims = [pyr.level_dims(n) for n in range(pyr.num_scales)]
    for (h0, w0), (h1, w1) in zip(dims, dims[1:]):
        assert h1 < h0 and w1 < w0
    r = pyr.effective_r
    for n in range(pyr.num_scales):
        h, w = pyr.level_dims(n)
        assert pyr.level(n).shape == (3, h, w)
        assert (h, w) == (round_dim(250 / r ** n), round_dim(188 / r ** n))
    assert abs(min(pyr.level_dims(pyr.coarsest)) - 25) <= 1


def test_pyramid_finest_level_is_resized_input(nprng):
    img = nprng.uniform(-1, 1, (3, 50, 40))
    pyr = build_pyramid(img, 50, 25, 4 / 3)
    assert np.array_equal(pyr.level(0), img)


def test_pyramid_rejects_r_not_above_one():
    with pytest.raises(ParameterError):
        build_pyramid(np.zeros((3, 50, 50)), 50, 25, 1.0)


def test_pyramid_degenerates_when_min_exceeds_max():
    pyr = build_pyramid(np.zeros((3, 33, 33)), 33, 40, 4 / 3)
    assert pyr.num_scales == 2 and pyr.effective_r == 1.0
    assert pyr.dims == [(33, 33), (33, 33)]


def test_pyramid_explicit_scale_count():
    pyr = build_pyramid(np.zeros((3, 64, 64)), 64, 25, 2.0, num_scales=2)
    assert pyr.dims == [(32, 32), (64, 64)]
    flat = build_pyramid(np.zeros((3, 64, 48)), 64, 25, 1.0, num_scales=2)
    assert flat.dims == [(64, 48), (64, 48)]


def test_upsample_by_r():
    x = np.zeros((3, 100, 100))
    assert np.array_equal(upsample_by_r(x, 1.0), x)
    assert upsample_by_r(x, 1.2589).shape == (3, 126, 126)
    assert upsample_by_r(x, 1.2589, (250, 188)).shape == (3, 250, 188)
    with pytest.raises(ParameterError):
        upsample_by_r(x, 0.5)


def test_round_dim_half_up():
    assert round_dim(2.5) == 3 and round_dim(2.4999) == 2 and round_dim(0.2) == 1
    assert round_dim(100 * 1.2589) == 126
    assert math.isclose(1.2589 * 100, 125.89)
