"""SSIM, MS-SSIM and RMSE between a reference and a test image."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .loss import DEFAULT_SSIM, SsimConfig, ssim_maps
from .tensor import as_image, check_same_shape

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


@dataclass(frozen=True)
class MetricReport:
    ssim: float
    ms_ssim: float
    rmse: float
    ms_ssim_levels: int = 5

    def line(self) -> str:
        return f"ssim={self.ssim:.6g} ms_ssim={self.ms_ssim:.6g} rmse={self.rmse:.6g}"


def to_8bit_scale(x: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) + 1.0) * 127.5


def rmse(ref, test) -> float:
    d = to_8bit_scale(ref) - to_8bit_scale(test)
    return float(np.sqrt(np.mean(d * d)))


def avg_pool2(x: np.ndarray) -> np.ndarray:
    c, h, w = x.shape
    h2, w2 = h // 2, w // 2
    x = x[:, :2 * h2, :2 * w2]
    return (x[:, 0::2, 0::2] + x[:, 1::2, 0::2] + x[:, 0::2, 1::2] + x[:, 1::2, 1::2]) / 4.0


def ms_ssim_levels(h: int, w: int, window: int = 11, max_levels: int = 5) -> int:
    levels = 1
    while levels < max_levels and min(h, w) // 2 ** levels >= window:
        levels += 1
    return levels


def ms_ssim(ref, test, cfg: SsimConfig = DEFAULT_SSIM, levels: int | None = None) -> float:
    """Multi-scale SSIM over dyadic levels; fewer than 5 for small images.

    Negative per-level terms are clamped to 0 before the weighted product.
    """
    a, b = as_image(ref), as_image(test)
    check_same_shape(a, b)
    if levels is None:
        levels = ms_ssim_levels(a.shape[1], a.shape[2], cfg.window)
    w = np.asarray(MS_SSIM_WEIGHTS[:levels])
    w = w / w.sum()
    out = 1.0
    for j in range(levels):
        s, cs = ssim_maps(a, b, cfg)
        if j == levels - 1:
            out *= max(float(s.mean()), 0.0) ** w[j]
        else:
            out *= max(float(cs.mean()), 0.0) ** w[j]
            a, b = avg_pool2(a), avg_pool2(b)
    return float(out)


def evaluate(ref, test, cfg: SsimConfig = DEFAULT_SSIM) -> MetricReport:
    a, b = as_image(ref), as_image(test)
    check_same_shape(a, b, "reference and test images")
    levels = ms_ssim_levels(a.shape[1], a.shape[2], cfg.window)
    return MetricReport(
        ssim=float(ssim_maps(a, b, cfg)[0].mean()),
        ms_ssim=ms_ssim(a, b, cfg, levels),
        rmse=rmse(a, b),
        ms_ssim_levels=levels,
    )


def trend_check(reports) -> bool:
    """True when RMSE does not increase as the shuffle percentage grows."""
    reports = list(reports)
    if len(reports) < 3:
        raise ParameterError(f"trend check needs >= 3 runs, got {len(reports)}")
    pcts = [p for p, _ in reports]
    if pcts != sorted(pcts):
        raise ParameterError(f"reports must be sorted by shuffle percentage, got {pcts}")
    rm = [rep.rmse for _, rep in reports]
    return all(b <= a for a, b in zip(rm, rm[1:]))
