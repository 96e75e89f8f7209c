import numpy as np
import pytest

from sinir.errors import DimensionError, ShapeError
from sinir.loss import DEFAULT_SSIM, gaussian_taps, mse, rec_loss, ssim, ssim_maps

from .oracles import gaussian_window, ssim_loops, ssim_maps_loops


def test_mse_examples():
    assert mse(np.array([1.0]), np.array([-1.0])) == 4.0
    assert mse(np.array([0.0, 1.0]), np.array([1.0, 1.0])) == 0.5
    x = np.random.default_rng(0).normal(size=(3, 4, 4))
    assert mse(x, x) == 0.0


def test_mse_shape_mismatch():
    with pytest.raises(ShapeError):
        mse(np.zeros((3, 4, 4)), np.zeros((3, 4, 5)))


def test_gaussian_taps_match_window_oracle():
    g = gaussian_taps(11, 1.5)
    assert g.sum() == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(np.outer(g, g), gaussian_window(), atol=1e-16)


def test_ssim_self_similarity(nprng):
    x = nprng.uniform(-1, 1, (3, 16, 16))
    assert ssim(x, x) == pytest.approx(1.0, abs=1e-12)


def test_constant_images_closed_form():
    a, b = np.full((3, 16, 16), 0.5), np.full((3, 16, 16), -0.5)
    c1 = DEFAULT_SSIM.c1
    assert c1 == pytest.approx(4e-4)
    expected = (-0.5 + c1) / (0.5 + c1)  # luminance term; contrast-structure term is exactly 1
    assert expected == pytest.approx(-0.998401, abs=1e-6)
    assert ssim(a, b) == pytest.approx(expected, abs=1e-12)
    assert rec_loss(a, b) == pytest.approx(1.0 + 1.0 - expected, abs=1e-12)


def test_rec_loss_self_is_zero(nprng):
    x = nprng.uniform(-1, 1, (3, 12, 12))
    assert rec_loss(x, x) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_ssim_matches_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (2, 16, 16))
    b = np.clip(a + 0.4 * rng.normal(size=a.shape), -1, 1)
    s, cs = ssim_maps(a, b)
    s_ref, cs_ref = ssim_maps_loops(a, b)
    np.testing.assert_allclose(s, s_ref, rtol=0, atol=1e-10)
    np.testing.assert_allclose(cs, cs_ref, rtol=0, atol=1e-10)
    assert abs(ssim(a, b) - ssim_loops(a, b)) <= 1e-10


def test_ssim_against_reference_library(nprng):
    skm = pytest.importorskip("skimage.metrics")
    a = nprng.uniform(-1, 1, (3, 32, 40))
    b = np.clip(a + 0.2 * nprng.normal(size=a.shape), -1, 1)
    # population moments match ours; skimage averages only away from a 5-px border
    ref = skm.structural_similarity(
        a, b, channel_axis=0, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=2.0
    )
    s = ssim_maps(a, b)[0][:, 5:-5, 5:-5].mean()
    assert s == pytest.approx(ref, abs=1e-12)


def test_ssim_symmetry(nprng):
    a, b = nprng.uniform(-1, 1, (2, 3, 14, 13))
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-14)


def test_ssim_small_image_rejected():
    with pytest.raises(DimensionError):
        ssim(np.zeros((3, 10, 20)), np.zeros((3, 10, 20)))


def test_ssim_weight_zero_is_mse(nprng):
    a, b = nprng.uniform(-1, 1, (2, 3, 12, 12))
    assert rec_loss(a, b, ssim_weight=0.0) == mse(a, b)
