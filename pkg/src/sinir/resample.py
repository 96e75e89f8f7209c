"""Bicubic resampling and the multi-scale ground-truth pyramid."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .tensor import as_image

CUBIC_A = -0.5


def cubic_kernel(x: np.ndarray, a: float = CUBIC_A) -> np.ndarray:
    """Keys cubic convolution kernel; a = -0.5 reproduces linear ramps."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    ax2 = ax * ax
    ax3 = ax2 * ax
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def round_dim(x: float) -> int:
    """Round half up, never below one pixel."""
    return max(1, int(math.floor(x + 0.5)))


def resize_weights(in_n: int, out_n: int, antialias: bool = False) -> np.ndarray:
    """Dense ``out_n x in_n`` interpolation matrix along one axis.

    Pixel centres are aligned (half-pixel convention). Source indices
    outside the image are clamped to the border. When ``antialias`` is set
    and the axis shrinks, the kernel is stretched by the inverse scale.
    """
    scale = out_n / in_n
    kscale = scale if (antialias and scale < 1.0) else 1.0
    support = 2.0 / kscale
    W = np.zeros((out_n, in_n))
    for i in range(out_n):
        center = (i + 0.5) / scale - 0.5
        lo = int(math.floor(center - support))
        hi = int(math.ceil(center + support))
        js = np.arange(lo, hi + 1)
        w = cubic_kernel((center - js) * kscale)
        w = w / w.sum()
        np.add.at(W[i], np.clip(js, 0, in_n - 1), w)
    return W


def bicubic_resize(img, out_h: int, out_w: int, antialias: bool = False) -> np.ndarray:
    x = as_image(img)
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"output dims must be >= 1, got {(out_h, out_w)}")
    _, h, w = x.shape
    if (h, w) == (out_h, out_w):
        return x.copy()
    out = x
    if out_h != h:
        out = np.matmul(resize_weights(h, out_h, antialias), out)
    if out_w != w:
        out = np.matmul(out, resize_weights(w, out_w, antialias).T)
    return np.ascontiguousarray(out)


def upsample_by_r(img, r: float, target_dims: tuple[int, int] | None = None) -> np.ndarray:
    x = as_image(img)
    if r < 1.0:
        raise ParameterError(f"upsampling factor must be >= 1, got {r}")
    if target_dims is not None:
        return bicubic_resize(x, int(target_dims[0]), int(target_dims[1]))
    _, h, w = x.shape
    return bicubic_resize(x, round_dim(h * r), round_dim(w * r))


def scaled_dims(h: int, w: int, r: float, n: int) -> tuple[int, int]:
    """Dims of pyramid level ``n`` for a finest level of ``h x w``."""
    f = r ** n
    return round_dim(h / f), round_dim(w / f)


def fit_scales(short_side: int, min_dim: int, r_target: float) -> tuple[int, float]:
    """Number of scales and the realised factor between adjacent levels.

    The coarsest level's shorter side lands on ``min_dim``. If the image
    is already no larger than ``min_dim`` the pyramid collapses to two
    levels of identical size.
    """
    if r_target <= 1.0:
        raise ParameterError(f"target scale factor must be > 1, got {r_target}")
    ratio = short_side / min_dim
    if ratio <= 1.0:
        return 2, 1.0
    # guard against ln ratios that are integral up to rounding noise
    steps = math.ceil(math.log(ratio) / math.log(r_target) - 1e-9)
    num_scales = steps + 2
    return num_scales, ratio ** (1.0 / (num_scales - 1))


@dataclass
class ScalePyramid:
    """Ground truths X_N ... X_0, coarsest first."""

    images: list
    effective_r: float
    max_dim: int | None
    min_dim: int
    dims: list = field(default_factory=list)

    @property
    def num_scales(self) -> int:
        return len(self.images)

    @property
    def coarsest(self) -> int:
        """Index N of the coarsest level."""
        return len(self.images) - 1

    def level(self, n: int) -> np.ndarray:
        return self.images[self.coarsest - n]

    def level_dims(self, n: int) -> tuple[int, int]:
        return self.dims[self.coarsest - n]


def build_pyramid(
    img,
    max_dim: int | None,
    min_dim: int,
    r_target: float,
    antialias: bool = False,
    num_scales: int | None = None,
) -> ScalePyramid:
    """Resize ``img`` so its longer side is ``max_dim`` and build the pyramid.

    With ``num_scales`` given, ``r_target`` is used verbatim as the factor
    between levels (r = 1 gives levels of identical size). Otherwise the
    scale count is fitted to the shorter side and ``min_dim``.
    """
    x = as_image(img)
    if min_dim < 1 or (max_dim is not None and max_dim < 1):
        raise ParameterError(f"pyramid dims must be >= 1, got max={max_dim} min={min_dim}")
    _, h, w = x.shape
    if max_dim is not None and max(h, w) != max_dim:
        s = max_dim / max(h, w)
        x = bicubic_resize(x, round_dim(h * s), round_dim(w * s), antialias=antialias)
    _, h, w = x.shape

    if num_scales is not None:
        if num_scales < 1:
            raise ParameterError(f"num_scales must be >= 1, got {num_scales}")
        if r_target < 1.0:
            raise ParameterError(f"scale factor must be >= 1, got {r_target}")
        n_scales, r = int(num_scales), float(r_target)
    else:
        if r_target <= 1.0:
            raise ParameterError(f"target scale factor must be > 1, got {r_target}")
        if max_dim is not None and min_dim > max_dim:
            n_scales, r = 2, 1.0
        else:
            n_scales, r = fit_scales(min(h, w), min_dim, r_target)

    images, dims = [], []
    for n in range(n_scales - 1, -1, -1):
        d = scaled_dims(h, w, r, n)
        dims.append(d)
        images.append(x if n == 0 else bicubic_resize(x, d[0], d[1], antialias=antialias))
    return ScalePyramid(images=images, effective_r=r, max_dim=max_dim, min_dim=min_dim, dims=dims)
