"""Reconstruction loss: MSE + (1 - SSIM), with analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionError
from .tensor import as_image, check_same_shape


@dataclass(frozen=True)
class SsimConfig:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 2.0

    @cached_property
    def taps(self) -> np.ndarray:
        return gaussian_taps(self.window, self.sigma)

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


DEFAULT_SSIM = SsimConfig()


def gaussian_taps(size: int, sigma: float) -> np.ndarray:
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    with np.errstate(over="ignore"):  # vanishing sigma: off-centre taps underflow to 0
        g = np.exp(-0.5 * (x / sigma) ** 2)
    return g / g.sum()


def mse(a, b) -> float:
    return mse_and_grad(a, b)[0]


def mse_and_grad(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    check_same_shape(a, b)
    d = a - b
    return float(np.mean(d * d)), 2.0 * d / d.size


def _check_ssim_inputs(a, b, cfg: SsimConfig):
    a, b = as_image(a), as_image(b)
    check_same_shape(a, b)
    if min(a.shape[1:]) < cfg.window:
        raise DimensionError(
            f"SSIM needs both spatial dims >= {cfg.window}, got {a.shape[1]}x{a.shape[2]}"
        )
    return a, b


def _moments(a, b, cfg: SsimConfig):
    c = a.shape[0]
    stack = np.concatenate([a, b, a * a, b * b, a * b], axis=0)
    f = kernels.separable_filter(stack, cfg.taps)
    mu_a, mu_b, e_aa, e_bb, e_ab = (f[i * c:(i + 1) * c] for i in range(5))
    return mu_a, mu_b, e_aa, e_bb, e_ab


def ssim_maps(a, b, cfg: SsimConfig = DEFAULT_SSIM):
    """Per-pixel SSIM and contrast-structure maps, each C x H x W."""
    a, b = _check_ssim_inputs(a, b, cfg)
    mu_a, mu_b, e_aa, e_bb, e_ab = _moments(a, b, cfg)
    s_aa = e_aa - mu_a * mu_a
    s_bb = e_bb - mu_b * mu_b
    s_ab = e_ab - mu_a * mu_b
    lum = (2.0 * mu_a * mu_b + cfg.c1) / (mu_a * mu_a + mu_b * mu_b + cfg.c1)
    cs = (2.0 * s_ab + cfg.c2) / (s_aa + s_bb + cfg.c2)
    return lum * cs, cs


def ssim(a, b, cfg: SsimConfig = DEFAULT_SSIM) -> float:
    return float(ssim_maps(a, b, cfg)[0].mean())


def ssim_and_grad(a, b, cfg: SsimConfig = DEFAULT_SSIM):
    """Mean SSIM over pixels and channels, and its gradient w.r.t. ``a``."""
    a, b = _check_ssim_inputs(a, b, cfg)
    mu_a, mu_b, e_aa, e_bb, e_ab = _moments(a, b, cfg)
    c1, c2 = cfg.c1, cfg.c2
    a1 = 2.0 * mu_a * mu_b + c1
    a2 = 2.0 * (e_ab - mu_a * mu_b) + c2
    b1 = mu_a * mu_a + mu_b * mu_b + c1
    b2 = (e_aa - mu_a * mu_a) + (e_bb - mu_b * mu_b) + c2
    den = b1 * b2
    s = a1 * a2 / den
    n = s.size
    # partials of the per-pixel map w.r.t. the filtered moments of a
    d_mu = (2.0 * mu_b * a2 - 2.0 * mu_b * a1) / den - s * (2.0 * mu_a / b1 - 2.0 * mu_a / b2)
    d_eaa = -s / b2
    d_eab = 2.0 * a1 / den
    c = a.shape[0]
    back = kernels.separable_filter_adjoint(np.concatenate([d_mu, d_eaa, d_eab], axis=0), cfg.taps)
    grad = (back[:c] + 2.0 * a * back[c:2 * c] + b * back[2 * c:]) / n
    return float(s.mean()), grad


def rec_loss(a, b, ssim_weight: float = 1.0, cfg: SsimConfig = DEFAULT_SSIM) -> float:
    return rec_loss_and_grad(a, b, ssim_weight, cfg)[0]


def rec_loss_and_grad(a, b, ssim_weight: float = 1.0, cfg: SsimConfig = DEFAULT_SSIM):
    """MSE(a, b) + w * (1 - SSIM(a, b)) and its gradient w.r.t. ``a``."""
    m, gm = mse_and_grad(a, b)
    s, gs = ssim_and_grad(a, b, cfg)
    return m + ssim_weight * (1.0 - s), gm - ssim_weight * gs
