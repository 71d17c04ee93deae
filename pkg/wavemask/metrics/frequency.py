""" Frequency-aware image metrics built on the Haar pyramid.

- hlfr: ratio of the level-1 detail energy to the level-1 approximation energy
- rdr: absolute HLFR difference between a generated and a reference image
- hfe: detail energy summed over the levels of a pyramid
- hfei: difference of the high-frequency energy shares of two images
- wqs: wavelet-domain quality score, weighted per-subband SSIM minus a weighted
  per-subband error, clamped to [0, 1]
"""
import math
import warnings
from typing import NamedTuple, Optional, Sequence

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError, UndefinedMetricError
from wavemask.state import merge_dicts
from wavemask.tensor import as_chw
from wavemask.wavelet import dwt2, dwt2_multi, pyramid_energy
from .ssim import ssim


def _sum_of_squares(*arrays: np.ndarray) -> float:
    return math.fsum(np.concatenate([(a * a).ravel() for a in arrays]))


def hlfr(img: np.ndarray) -> float:
    """ High to low frequency ratio (E_LH + E_HL + E_HH) / E_LL of a single level.

    :param img: image of shape C x H x W (or H x W), even sides
    :return: the ratio
    """
    bands = dwt2(as_chw(img))
    low = _sum_of_squares(bands.ll)
    if low == 0:
        raise UndefinedMetricError("HLFR is undefined for an image with zero approximation energy.")
    return _sum_of_squares(*bands.details()) / low


def rdr(gen: np.ndarray, real: np.ndarray) -> float:
    """ Ratio deviation |HLFR(gen) - HLFR(real)|. """
    return abs(hlfr(gen) - hlfr(real))


def hfe(img: np.ndarray, depth: int) -> float:
    """ High frequency energy: squared detail coefficients summed over all levels.

    :param img: image with sides divisible by 2^depth
    :param depth: number of levels
    :return: the energy
    """
    pyramid = dwt2_multi(as_chw(img), depth)
    return _sum_of_squares(*[band for level in pyramid.levels for band in level])


def total_energy(img: np.ndarray, depth: int) -> float:
    """ Energy of all pyramid coefficients, equal to the image energy by Parseval. """
    pyramid = dwt2_multi(as_chw(img), depth)
    return _sum_of_squares(pyramid.top_ll, *[band for level in pyramid.levels for band in level])


def hfe_share(img: np.ndarray, depth: int) -> float:
    total = total_energy(img, depth)
    if total == 0:
        raise UndefinedMetricError("The high frequency share is undefined for an image with zero energy.")
    return hfe(img, depth) / total


def hfei(gen: np.ndarray, real: np.ndarray, depth: int) -> float:
    """ High frequency emphasis index HFE(gen)/E(gen) - HFE(real)/E(real). Negative values
    mean the generated image lost fine detail relative to the reference.
    """
    return hfe_share(gen, depth) - hfe_share(real, depth)


def energy_audit(img: np.ndarray, depth: int) -> dict:
    """ Per-level detail energies, coarsest approximation energy and their total. """
    return pyramid_energy(dwt2_multi(as_chw(img), depth))


class WqsConfig(NamedTuple):
    depth: int
    weights: Sequence[float]
    lambda_q: float
    window: int


def make_wqs_config(depth: Optional[int] = None, weights: Optional[Sequence[float]] = None,
                    lambda_q: Optional[float] = None, window: Optional[int] = None) -> WqsConfig:
    """ WQS settings, missing values taken from the [Metrics] configuration. Weights
    default to uniform 1 / (4 depth) over the (level, subband) pairs, ordered level by
    level as LL, LH, HL, HH.
    """
    options = merge_dicts(
        {
            "depth": config.getint("Metrics", "depth"),
            "lambda_q": config.getfloat("Metrics", "lambda_q"),
            "window": config.getint("Metrics", "ssim_window"),
        },
        {"depth": depth, "lambda_q": lambda_q, "window": window},
    )
    if options.depth < 1:
        raise InvalidArgumentError(f"The WQS depth must be at least 1, got {options.depth}.")
    if options.lambda_q < 0:
        raise InvalidArgumentError(f"The WQS penalty must be non-negative, got {options.lambda_q}.")
    n = 4 * options.depth
    weights = [1 / n] * n if weights is None else [float(w) for w in weights]
    if len(weights) != n:
        raise InvalidArgumentError(f"WQS needs {n} weights for depth {options.depth}, got {len(weights)}.")
    if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1) > 1e-9:
        raise InvalidArgumentError(f"WQS weights must be non-negative and sum to 1, got {weights}.")
    return WqsConfig(int(options.depth), weights, float(options.lambda_q), int(options.window))


def subband_scores(gen: np.ndarray, real: np.ndarray, cfg: WqsConfig):
    """ (SSIM, normalised MSE) of every (level, subband) pair, in weight order. The
    dynamic range R of each reference subband sets the SSIM constants and normalises the
    MSE; a flat reference subband falls back to R = 1 with a warning.
    """
    g, r = as_chw(gen), as_chw(real)
    if g.shape != r.shape:
        raise InvalidArgumentError(f"WQS needs images of the same shape, got {g.shape} and {r.shape}.")
    gp, rp = dwt2_multi(g, cfg.depth), dwt2_multi(r, cfg.depth)

    scores = []
    for level in range(1, cfg.depth + 1):
        for name, gb, rb in zip(("LL", "LH", "HL", "HH"), gp.subbands(level), rp.subbands(level)):
            data_range = float(rb.max() - rb.min())
            if data_range == 0:
                warnings.warn(f"Reference subband {name} of level {level} is flat; using a dynamic range of 1.")
                data_range = 1.0
            s = ssim(gb, rb, cfg.window, data_range).ssim
            mse = float(np.mean((gb - rb) ** 2)) / data_range ** 2
            scores.append((s, mse))
    return scores


def wqs(gen: np.ndarray, real: np.ndarray, cfg: Optional[WqsConfig] = None) -> float:
    """ Wavelet quality score sum_k w_k SSIM_k - lambda_q sum_k w_k MSE_k over the
    (level, subband) pairs, clamped to [0, 1].

    :param gen: generated image
    :param real: reference image of the same shape, sides divisible by 2^depth
    :param cfg: WqsConfig, by default from the configuration
    :return: the score
    """
    cfg = make_wqs_config() if cfg is None else cfg
    scores = subband_scores(gen, real, cfg)
    norm = math.fsum(cfg.weights)
    similarity = math.fsum(w * s for w, (s, _) in zip(cfg.weights, scores)) / norm
    error = math.fsum(w * e for w, (_, e) in zip(cfg.weights, scores)) / norm
    return min(1.0, max(0.0, similarity - cfg.lambda_q * error))
