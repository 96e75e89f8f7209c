"""Input corruption applied freshly at every training iteration.

``intensity`` is a percentage of pixels for the four pixel schemes, and
the divisor of the longer image side (giving the patch side) for patch
shuffling.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .tensor import Rng, as_image

GAUSS_STD = math.sqrt(0.5)  # variance 0.5 on the [-1, 1] scale
MAX_PATCH_ATTEMPTS = 1000


class Scheme(str, enum.Enum):
    PIXEL_SHUFFLE = "pixel_shuffle"
    BLACK_NOISE = "black_noise"
    ADDITIVE_GAUSSIAN = "additive_gaussian"
    REPLACING_GAUSSIAN = "replacing_gaussian"
    PATCH_SHUFFLE = "patch_shuffle"


# CLI spellings
SCHEME_ALIASES = {
    "pixel-shuffle": Scheme.PIXEL_SHUFFLE,
    "black": Scheme.BLACK_NOISE,
    "add-gauss": Scheme.ADDITIVE_GAUSSIAN,
    "replace-gauss": Scheme.REPLACING_GAUSSIAN,
    "patch-shuffle": Scheme.PATCH_SHUFFLE,
}


def parse_scheme(name) -> Scheme:
    if isinstance(name, Scheme):
        return name
    if name in SCHEME_ALIASES:
        return SCHEME_ALIASES[name]
    try:
        return Scheme(name)
    except ValueError:
        choices = sorted(SCHEME_ALIASES) + [s.value for s in Scheme]
        raise ParameterError(f"unknown corruption scheme {name!r}; choose from {choices}") from None


@dataclass(frozen=True)
class CorruptionSpec:
    scheme: Scheme = Scheme.PIXEL_SHUFFLE
    intensity: float = 5e-4
    patch_count: int = 50

    def __post_init__(self):
        object.__setattr__(self, "scheme", parse_scheme(self.scheme))
        if self.intensity < 0:
            raise ParameterError(f"corruption intensity must be >= 0, got {self.intensity}")
        if self.scheme is Scheme.PATCH_SHUFFLE and self.patch_count < 2:
            raise ParameterError(f"patch shuffling needs patch_count >= 2, got {self.patch_count}")


def pixel_count(intensity: float, n_pixels: int) -> int:
    """Number of pixel sites touched: ``intensity`` percent, at least two."""
    if intensity == 0:
        return 0
    k = max(2, int(math.floor(intensity / 100.0 * n_pixels + 0.5)))
    return min(k, n_pixels)


def patch_side(intensity: float, h: int, w: int) -> int:
    return max(1, min(h, w, int(math.floor(max(h, w) / intensity + 0.5))))


def corrupt(img, spec: CorruptionSpec, rng: Rng) -> np.ndarray:
    x = as_image(img)
    out = x.copy()
    if spec.intensity == 0:
        return out
    c, h, w = x.shape
    if spec.scheme is Scheme.PATCH_SHUFFLE:
        return _patch_shuffle(out, spec, rng)

    n = h * w
    if spec.scheme is Scheme.PIXEL_SHUFFLE and n < 2:
        raise ParameterError(f"cannot shuffle pixels of a {h}x{w} image")
    k = pixel_count(spec.intensity, n)
    sites = rng.choice(n, k)
    flat = out.reshape(c, n)
    if spec.scheme is Scheme.PIXEL_SHUFFLE:
        flat[:, sites] = x.reshape(c, n)[:, sites[rng.permutation(k)]]
    elif spec.scheme is Scheme.BLACK_NOISE:
        flat[:, sites] = -1.0
    elif spec.scheme is Scheme.ADDITIVE_GAUSSIAN:
        noise = rng.normal((c, k), GAUSS_STD)
        flat[:, sites] = np.clip(flat[:, sites] + noise, -1.0, 1.0)
    elif spec.scheme is Scheme.REPLACING_GAUSSIAN:
        flat[:, sites] = np.clip(rng.normal((c, k), GAUSS_STD), -1.0, 1.0)
    return out


def _patch_shuffle(out: np.ndarray, spec: CorruptionSpec, rng: Rng) -> np.ndarray:
    _, h, w = out.shape
    side = patch_side(spec.intensity, h, w)
    corners = sample_patches(h, w, side, spec.patch_count, rng)
    src = out.copy()
    perm = rng.permutation(len(corners))
    for (y, x), j in zip(corners, perm):
        sy, sx = corners[j]
        out[:, y:y + side, x:x + side] = src[:, sy:sy + side, sx:sx + side]
    return out


def sample_patches(h: int, w: int, side: int, count: int, rng: Rng) -> list:
    """Top-left corners of ``count`` square patches.

    Patches are drawn without overlap by rejection; after
    ``MAX_PATCH_ATTEMPTS`` rejections the remaining ones may overlap.
    """
    corners = []
    attempts = 0
    while len(corners) < count:
        y = int(rng.integers(0, h - side + 1))
        x = int(rng.integers(0, w - side + 1))
        if attempts < MAX_PATCH_ATTEMPTS and any(
            abs(y - cy) < side and abs(x - cx) < side for cy, cx in corners
        ):
            attempts += 1
            continue
        corners.append((y, x))
    return corners
