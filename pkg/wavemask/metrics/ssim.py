""" Structural similarity with a uniform square window.

Local means, population variances and covariances come from scipy's uniform_filter and
only windows lying fully inside the image are kept. SSIM and its contrast-structure term
are averaged over those windows and over channels.
"""
from typing import NamedTuple, Tuple

import numpy as np
from scipy.ndimage import uniform_filter

from wavemask.errors import InvalidArgumentError
from wavemask.tensor import as_chw, avgpool2x

K1 = 0.01
K2 = 0.03
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
MIN_SCALE_SIZE = 8


class SsimResult(NamedTuple):
    ssim: float
    cs: float


def _valid(stat: np.ndarray, k: int) -> np.ndarray:
    h, w = stat.shape
    return stat[k // 2:h - k + k // 2 + 1, k // 2:w - k + k // 2 + 1]


def ssim_maps(x: np.ndarray, y: np.ndarray, window: int, data_range: float) -> Tuple[np.ndarray, np.ndarray]:
    """ Local SSIM and contrast-structure maps of two H x W arrays over the valid windows.

    :param x: first image
    :param y: second image
    :param window: side of the square window, at most min(H, W)
    :param data_range: dynamic range R setting C1 = (0.01 R)^2 and C2 = (0.03 R)^2
    :return: SSIM map and cs map, each (H - window + 1) x (W - window + 1)
    """
    if window < 1 or window > min(x.shape):
        raise InvalidArgumentError(f"A window of {window} does not fit in an image of shape {x.shape}.")
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2

    def mean(a):
        return _valid(uniform_filter(a, size=window, mode="reflect"), window)

    mx, my = mean(x), mean(y)
    vx = mean(x * x) - mx * mx
    vy = mean(y * y) - my * my
    cov = mean(x * y) - mx * my

    cs = (2 * cov + c2) / (vx + vy + c2)
    ssim = (2 * mx * my + c1) / (mx * mx + my * my + c1) * cs
    return ssim, cs


def ssim(x: np.ndarray, y: np.ndarray, window: int = 7, data_range: float = 1.0) -> SsimResult:
    """ Mean SSIM and mean contrast-structure term, averaged over channels.

    :param x: tensor of shape C x H x W (or H x W)
    :param y: tensor of the same shape
    :param window: window side, reduced to min(H, W) for small inputs
    :param data_range: dynamic range of the data
    :return: SsimResult
    """
    x, y = as_chw(x), as_chw(y)
    if x.shape != y.shape:
        raise InvalidArgumentError(f"SSIM needs inputs of the same shape, got {x.shape} and {y.shape}.")
    window = min(window, x.shape[1], x.shape[2])
    s, c = [], []
    for xc, yc in zip(x, y):
        s_map, cs_map = ssim_maps(xc, yc, window, data_range)
        s.append(np.mean(s_map))
        c.append(np.mean(cs_map))
    return SsimResult(float(np.mean(s)), float(np.mean(c)))


def ms_ssim_scales(h: int, w: int) -> int:
    """ Number of scales: the largest k with min(H, W) / 2^(k-1) >= 8 whose downsampled
    sizes stay integral, at most 5.
    """
    size = min(h, w)
    if size < MIN_SCALE_SIZE:
        raise InvalidArgumentError(f"MS-SSIM needs images of at least {MIN_SCALE_SIZE} pixels per side, got {h} x {w}.")
    k = 1
    while k < len(MS_SSIM_WEIGHTS) and size // 2 ** k >= MIN_SCALE_SIZE and h % 2 ** k == 0 and w % 2 ** k == 0:
        k += 1
    return k


def ms_ssim(gen: np.ndarray, real: np.ndarray, window: int = 7, data_range: float = 1.0) -> float:
    """ Multi-scale SSIM: the contrast-structure terms of the finer scales and the full SSIM
    of the coarsest, raised to the standard per-scale exponents renormalised over the
    scales in use. Scales are produced by 2x2 average pooling; negative terms are clamped
    to 0.

    :param gen: generated image, C x H x W
    :param real: reference image of the same shape
    :param window: SSIM window side
    :param data_range: dynamic range of the data, 1 for images in [0, 1]
    :return: MS-SSIM in [0, 1]
    """
    x, y = as_chw(gen), as_chw(real)
    if x.shape != y.shape:
        raise InvalidArgumentError(f"MS-SSIM needs inputs of the same shape, got {x.shape} and {y.shape}.")
    scales = ms_ssim_scales(x.shape[1], x.shape[2])
    weights = np.array(MS_SSIM_WEIGHTS[:scales])
    weights = weights / weights.sum()

    value = 1.0
    for k in range(scales):
        result = ssim(x, y, window, data_range)
        if k == scales - 1:
            value *= max(result.ssim, 0.0) ** weights[k]
        else:
            value *= max(result.cs, 0.0) ** weights[k]
            x, y = avgpool2x(x), avgpool2x(y)
    return float(min(max(value, 0.0), 1.0))
