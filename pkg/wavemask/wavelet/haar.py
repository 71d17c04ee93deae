""" Orthonormal 2D Haar wavelet transform of C x H x W tensors.

The analysis filters are h_low = [1, 1] / sqrt(2) and h_high = [1, -1] / sqrt(2) applied
along rows and columns. For every 2x2 block [[a, b], [c, d]] this gives

    LL = (a + b + c + d) / 2        HL = (a - b + c - d) / 2
    LH = (a + b - c - d) / 2        HH = (a - b - c + d) / 2

HL responds to changes along a row, LH to changes along a column. Every consumer in
wavemask sums the three detail bands, so the orientation labels carry no weight beyond
this definition. Odd dimensions are rejected rather than padded.
"""
from typing import List, NamedTuple, Tuple

import numpy as np

from wavemask.errors import InvalidArgumentError


class SubbandSet(NamedTuple):
    """ The four subbands of one decomposition level, each C x H/2 x W/2. """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def details(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.lh, self.hl, self.hh

    def energy(self) -> float:
        return float(sum(np.sum(b * b) for b in self))


class DetailBands(NamedTuple):
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray


class WaveletPyramid(NamedTuple):
    """ Multi-level decomposition: the detail bands of every level, finest first, the
    approximation (LL) band of every level, and the coarsest approximation.
    """

    levels: List[DetailBands]
    approximations: List[np.ndarray]
    top_ll: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.levels)

    def subbands(self, level: int) -> SubbandSet:
        """ The four subbands of a level, counted from 1 (finest). """
        d = self.levels[level - 1]
        return SubbandSet(self.approximations[level - 1], d.lh, d.hl, d.hh)


def _as_chw(src: np.ndarray, name: str) -> np.ndarray:
    src = np.asarray(src, dtype=np.float64)
    if src.ndim == 2:
        src = src[None]
    if src.ndim != 3 or src.size == 0:
        raise InvalidArgumentError(f"{name} expects a C x H x W tensor, got shape {src.shape}.")
    return src


def dwt2(src: np.ndarray) -> SubbandSet:
    """ Single level Haar analysis, applied independently to every channel.

    :param src: tensor of shape C x H x W (or H x W, treated as one channel) with even H, W
    :return: the four subbands, each C x H/2 x W/2
    """
    src = _as_chw(src, "dwt2")
    _, h, w = src.shape
    if h % 2 or w % 2:
        raise InvalidArgumentError(f"dwt2 needs even spatial dimensions, got {h} x {w}.")

    a = src[:, 0::2, 0::2]
    b = src[:, 0::2, 1::2]
    c = src[:, 1::2, 0::2]
    d = src[:, 1::2, 1::2]

    ll = (a + b + c + d) / 2
    hl = (a - b + c - d) / 2
    lh = (a + b - c - d) / 2
    hh = (a - b - c + d) / 2
    return SubbandSet(ll, lh, hl, hh)


def idwt2(bands: SubbandSet) -> np.ndarray:
    """ Haar synthesis, the exact inverse of dwt2.

    :param bands: four subbands of identical shape C x h x w
    :return: tensor of shape C x 2h x 2w
    """
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in bands)
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise InvalidArgumentError(
            f"idwt2 needs four subbands of the same shape, got {ll.shape}, {lh.shape}, {hl.shape}, {hh.shape}."
        )
    if ll.ndim == 2:
        ll, lh, hl, hh = ll[None], lh[None], hl[None], hh[None]

    c, h, w = ll.shape
    out = np.empty((c, 2 * h, 2 * w))
    out[:, 0::2, 0::2] = (ll + hl + lh + hh) / 2
    out[:, 0::2, 1::2] = (ll - hl + lh - hh) / 2
    out[:, 1::2, 0::2] = (ll + hl - lh - hh) / 2
    out[:, 1::2, 1::2] = (ll - hl - lh + hh) / 2
    return out


def max_depth(h: int, w: int) -> int:
    """ Largest L such that both H and W are divisible by 2^L. """
    depth = 0
    while h % 2 == 0 and w % 2 == 0 and h > 1 and w > 1:
        h //= 2
        w //= 2
        depth += 1
    return depth


def dwt2_multi(src: np.ndarray, depth: int) -> WaveletPyramid:
    """ Multi-level Haar analysis: dwt2 applied recursively to the LL band.

    :param src: tensor of shape C x H x W with H and W divisible by 2^depth
    :param depth: number of levels, L >= 1
    :return: the wavelet pyramid
    """
    src = _as_chw(src, "dwt2_multi")
    _, h, w = src.shape
    legal = max_depth(h, w)
    if depth < 1 or depth > legal:
        raise InvalidArgumentError(
            f"Depth {depth} is not valid for a {h} x {w} tensor; the maximum legal depth is {legal}."
        )

    levels = []
    approximations = []
    current = src
    for _ in range(depth):
        bands = dwt2(current)
        levels.append(DetailBands(bands.lh, bands.hl, bands.hh))
        approximations.append(bands.ll)
        current = bands.ll
    return WaveletPyramid(levels, approximations, current)


def idwt2_multi(pyramid: WaveletPyramid) -> np.ndarray:
    """ Composed inverse of dwt2_multi, rebuilt from the coarsest approximation and the
    detail bands only.
    """
    current = pyramid.top_ll
    for details in reversed(pyramid.levels):
        current = idwt2(SubbandSet(current, details.lh, details.hl, details.hh))
    return current


def detail_energy(bands: SubbandSet) -> float:
    return float(sum(np.sum(b * b) for b in bands.details()))


def pyramid_energy(pyramid: WaveletPyramid) -> dict:
    """ Energy audit of a pyramid: the detail energy of every level, the energy of the
    coarsest approximation and their total, which equals the input energy by Parseval.
    """
    details = [float(sum(np.sum(b * b) for b in level)) for level in pyramid.levels]
    top = float(np.sum(pyramid.top_ll ** 2))
    return {"details": details, "top_ll": top, "total": top + sum(details)}
