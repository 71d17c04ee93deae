""" Gray level co-occurrence texture statistics.

The image is quantised to `levels` uniform bins over [0, 1]; skimage counts the symmetric
co-occurrences for every offset, each offset's matrix is normalised to sum to 1 and the
matrices are averaged. From the averaged matrix P:

    contrast = sum P(i, j) (i - j)^2
    energy = sum P(i, j)^2
    homogeneity = sum P(i, j) / (1 + |i - j|)
"""
import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from skimage.feature import graycomatrix

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.tensor import as_chw

DEFAULT_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))


class GlcmStats(NamedTuple):
    contrast: float
    energy: float
    homogeneity: float


def quantize(img: np.ndarray, levels: int) -> np.ndarray:
    """ Gray levels min(floor(v levels), levels - 1) of an image clipped to [0, 1]; colour
    images are averaged over channels first.
    """
    if not 2 <= levels <= 256:
        raise InvalidArgumentError(f"The number of gray levels must be in [2, 256], got {levels}.")
    gray = np.mean(as_chw(img), axis=0)
    q = np.floor(np.clip(gray, 0.0, 1.0) * levels)
    return np.minimum(q, levels - 1).astype(np.uint8)


def offset_to_polar(offset: Tuple[int, int]) -> Tuple[int, float]:
    """ skimage describes an offset (dr, dc) by a distance and an angle. """
    dr, dc = offset
    distance = max(abs(dr), abs(dc))
    if distance == 0:
        raise InvalidArgumentError("A co-occurrence offset cannot be (0, 0).")
    angle = math.atan2(dr, dc)
    if round(math.sin(angle) * distance) != dr or round(math.cos(angle) * distance) != dc:
        raise InvalidArgumentError(f"Offset {offset} is not expressible as a distance and an angle.")
    return distance, angle


def glcm_matrix(img: np.ndarray, levels: Optional[int] = None,
                offsets: Sequence[Tuple[int, int]] = DEFAULT_OFFSETS) -> np.ndarray:
    """ Symmetric co-occurrence matrix, normalised per offset and averaged over the
    offsets that have at least one pixel pair.

    :param img: image with values in [0, 1]
    :param levels: number of gray levels, by default the configured [Metrics] glcm_levels
    :param offsets: (row, column) displacements
    :return: levels x levels matrix summing to 1
    """
    levels = config.getint("Metrics", "glcm_levels") if levels is None else levels
    q = quantize(img, levels)
    if q.size < 2:
        raise InvalidArgumentError(f"GLCM statistics need at least two pixels, got shape {q.shape}.")

    matrices = []
    for offset in offsets:
        distance, angle = offset_to_polar(offset)
        counts = graycomatrix(q, [distance], [angle], levels=levels, symmetric=True, normed=False)[:, :, 0, 0]
        total = counts.sum()
        if total > 0:
            matrices.append(counts / total)
    if not matrices:
        raise InvalidArgumentError(f"No pixel pairs of shape {q.shape} match the offsets {list(offsets)}.")
    return np.mean(matrices, axis=0)


def glcm_stats(img: np.ndarray, levels: Optional[int] = None,
               offsets: Sequence[Tuple[int, int]] = DEFAULT_OFFSETS) -> GlcmStats:
    """ Contrast, energy and homogeneity of the averaged co-occurrence matrix. """
    p = glcm_matrix(img, levels, offsets)
    i, j = np.indices(p.shape)
    return GlcmStats(
        float(np.sum(p * (i - j) ** 2)),
        float(np.sum(p ** 2)),
        float(np.sum(p / (1 + np.abs(i - j)))),
    )
