"""Image tensors and the seeded random source.

Images are plain ``numpy.ndarray`` objects of dtype float64 laid out
row-major as ``(channels, height, width)``. Image-valued tensors live in
[-1, 1]; intermediate feature maps are unbounded.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParameterError, ShapeError

DTYPE = np.float64

_OPS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
}


def tensor_new(channels: int, height: int, width: int, fill: float = 0.0) -> np.ndarray:
    if min(channels, height, width) < 1:
        raise DimensionError(f"tensor dims must be >= 1, got {(channels, height, width)}")
    return np.full((channels, height, width), fill, dtype=DTYPE)


def as_image(x, channels: int | None = None) -> np.ndarray:
    """Validate ``x`` as a C x H x W tensor and return it as float64."""
    arr = np.asarray(x, dtype=DTYPE)
    if arr.ndim != 3:
        raise ShapeError(f"expected a C x H x W tensor, got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise DimensionError(f"tensor dims must be >= 1, got {arr.shape}")
    if channels is not None and arr.shape[0] != channels:
        raise ShapeError(f"expected {channels} channels, got {arr.shape[0]}")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "operands") -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what} differ in shape: {a.shape} vs {b.shape}")


def elementwise(a: np.ndarray, b: np.ndarray, op: str) -> np.ndarray:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ParameterError(f"unknown elementwise op {op!r}; expected one of {sorted(_OPS)}") from None
    check_same_shape(a, b)
    return fn(a, b)


class Rng:
    """Seeded generator backed by numpy's PCG64.

    PCG64 (128-bit LCG state, XSL-RR output permutation) has a fixed,
    documented stream for a given seed, so draws are reproducible across
    platforms. Every uniform draw consumes exactly one 64-bit output,
    which makes successive calls concatenate to one longer call.
    """

    def __init__(self, seed: int = 0):
        if not 0 <= int(seed) < 2**64:
            raise ParameterError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, n: int) -> np.ndarray:
        if n < 0:
            raise ParameterError(f"draw count must be >= 0, got {n}")
        return self._gen.random(n)

    def normal(self, size, std: float = 1.0) -> np.ndarray:
        return self._gen.standard_normal(size) * std

    def choice(self, population: int, k: int) -> np.ndarray:
        """``k`` distinct integers from ``range(population)``."""
        return self._gen.choice(population, size=k, replace=False)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)

    def spawn(self, key: int) -> "Rng":
        """Independent child stream, derived from the seed and ``key`` only."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(key),))
        child = Rng.__new__(Rng)
        child.seed = self.seed
        child._gen = np.random.Generator(np.random.PCG64(ss))
        return child


def rng_uniform(rng: Rng, n: int) -> np.ndarray:
    return rng.uniform(n)
