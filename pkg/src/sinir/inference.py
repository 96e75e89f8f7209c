"""Manipulating arbitrary images with a trained cascade."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError, ShapeError
from .loss import gaussian_taps
from .nn import net_forward
from .resample import bicubic_resize, round_dim, scaled_dims
from .tensor import as_image
from .trainer import ModelCheckpoint

DEFAULT_FEATHER = 2.0


@dataclass(frozen=True)
class InferConfig:
    start_scale: int = 0
    sr_factor: float | None = None
    feather_sigma: float = DEFAULT_FEATHER


def inference_dims(h: int, w: int, r: float, n: int) -> list:
    """Per-level dims n ... 0 for an inference image of size ``h x w``."""
    return [scaled_dims(h, w, r, m) for m in range(n, -1, -1)]


def manipulate(img, ckpt: ModelCheckpoint, n: int) -> np.ndarray:
    """Enter the cascade at level ``n``; the output has the input's size."""
    x = as_image(img, channels=3)
    if not 0 <= n <= ckpt.coarsest:
        raise ParameterError(f"start scale {n} outside [0, {ckpt.coarsest}]")
    _, h, w = x.shape
    levels = inference_dims(h, w, ckpt.effective_r, n)
    if min(min(d) for d in levels) < 2:
        raise DimensionError(f"image {h}x{w} too small to enter at scale {n} (levels {levels})")
    y = net_forward(bicubic_resize(x, *levels[0], antialias=True), ckpt.net(n))
    for m, d in zip(range(n - 1, -1, -1), levels[1:]):
        y = net_forward(bicubic_resize(y, *d), ckpt.net(m))
    return y


def sr_factors(sf: float, r: float) -> list:
    """Cumulative magnification after each refinement step; the last is ``sf``."""
    if sf <= 1.0:
        raise ParameterError(f"super-resolution factor must be > 1, got {sf}")
    if r <= 1.0:
        raise ParameterError(f"checkpoint scale factor {r} cannot drive super-resolution")
    k = max(1, math.ceil(math.log(sf) / math.log(r) - 1e-9))
    return [r ** i for i in range(1, k)] + [sf]


def super_resolve(img, ckpt: ModelCheckpoint, sf: float) -> np.ndarray:
    """Upsample by ``r`` and refine with the finest network, repeatedly."""
    x = as_image(img, channels=3)
    _, h, w = x.shape
    finest = ckpt.net(0)
    y = x
    for f in sr_factors(sf, ckpt.effective_r):
        y = net_forward(bicubic_resize(y, round_dim(h * f), round_dim(w * f)), finest)
    return y


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with edge-replicating borders."""
    if sigma <= 0:
        return img.copy()
    rad = max(1, math.ceil(3.0 * sigma))
    taps = gaussian_taps(2 * rad + 1, sigma)
    _, h, w = img.shape
    p = np.pad(img, ((0, 0), (rad, rad), (0, 0)), mode="edge")
    out = sum(taps[t] * p[:, t:t + h, :] for t in range(len(taps)))
    p = np.pad(out, ((0, 0), (0, 0), (rad, rad)), mode="edge")
    return sum(taps[t] * p[:, :, t:t + w] for t in range(len(taps)))


def composite(manip, orig, mask, feather_sigma: float = DEFAULT_FEATHER) -> np.ndarray:
    """Blend ``manip`` into ``orig`` under a (feathered) mask in [0, 1]."""
    manip, orig = as_image(manip), as_image(orig)
    m = np.asarray(mask, dtype=np.float64)
    if m.ndim == 2:
        m = m[None]
    if manip.shape != orig.shape or m.shape[1:] != manip.shape[1:] or m.shape[0] != 1:
        raise ShapeError(f"composite shapes disagree: manip {manip.shape}, orig {orig.shape}, mask {m.shape}")
    if feather_sigma < 0:
        raise ParameterError(f"feather sigma must be >= 0, got {feather_sigma}")
    m = np.clip(gaussian_blur(np.clip(m, 0.0, 1.0), feather_sigma), 0.0, 1.0)
    return m * manip + (1.0 - m) * orig
