""" Dyadic resampling of C x H x W tensors: bilinear 2x upsampling with pixel-centre
alignment and 2x2 average pooling, together with their adjoints, needed to back-propagate
through the toy models.
"""
from typing import Tuple

import numpy as np

from wavemask.errors import InvalidArgumentError


def _check_chw(src: np.ndarray, name: str) -> None:
    if src.ndim != 3:
        raise InvalidArgumentError(f"{name} expects a C x H x W tensor, got shape {src.shape}.")
    if src.size == 0:
        raise InvalidArgumentError(f"{name} got an empty tensor of shape {src.shape}.")


def upsample_weights(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ Interpolation stencil along one axis of length n upsampled to 2n. Output sample i
    sits at the input coordinate (i + 0.5) / 2 - 0.5, clamped to [0, n - 1].

    :param n: input length
    :return: lower index, upper index and fractional weight of the upper index for each
    of the 2n output samples
    """
    coords = (np.arange(2 * n) + 0.5) / 2 - 0.5
    coords = np.clip(coords, 0, n - 1)
    lo = np.floor(coords).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    frac = coords - lo
    return lo, hi, frac


def _lerp(a: np.ndarray, b: np.ndarray, frac: np.ndarray) -> np.ndarray:
    # a + f (b - a) keeps constant fields exact; the clip keeps rounding inside [a, b]
    out = a + frac * (b - a)
    return np.clip(out, np.minimum(a, b), np.maximum(a, b))


def bilinear_upsample2x(src: np.ndarray) -> np.ndarray:
    """ Bilinear upsampling by a factor of 2 in both spatial dimensions.

    :param src: tensor of shape C x h x w
    :return: tensor of shape C x 2h x 2w
    """
    src = np.asarray(src, dtype=np.float64)
    _check_chw(src, "bilinear_upsample2x")
    _, h, w = src.shape

    lo, hi, frac = upsample_weights(h)
    rows = _lerp(src[:, lo, :], src[:, hi, :], frac[None, :, None])

    lo, hi, frac = upsample_weights(w)
    return _lerp(rows[:, :, lo], rows[:, :, hi], frac[None, None, :])


def bilinear_upsample2x_adjoint(grad: np.ndarray) -> np.ndarray:
    """ Adjoint (transpose) of the bilinear upsampling: maps a gradient with respect to the
    C x 2h x 2w output onto the C x h x w input.
    """
    grad = np.asarray(grad, dtype=np.float64)
    c, h2, w2 = grad.shape
    h, w = h2 // 2, w2 // 2

    lo, hi, frac = upsample_weights(w)
    cols = np.zeros((c, h2, w))
    np.add.at(cols, (slice(None), slice(None), lo), grad * (1 - frac)[None, None, :])
    np.add.at(cols, (slice(None), slice(None), hi), grad * frac[None, None, :])

    lo, hi, frac = upsample_weights(h)
    out = np.zeros((c, h, w))
    np.add.at(out, (slice(None), lo, slice(None)), cols * (1 - frac)[None, :, None])
    np.add.at(out, (slice(None), hi, slice(None)), cols * frac[None, :, None])
    return out


def avgpool2x(src: np.ndarray) -> np.ndarray:
    """ Mean over non-overlapping 2x2 blocks.

    :param src: tensor of shape C x H x W with H and W even
    :return: tensor of shape C x H/2 x W/2
    """
    src = np.asarray(src, dtype=np.float64)
    _check_chw(src, "avgpool2x")
    c, h, w = src.shape
    if h % 2 or w % 2:
        raise InvalidArgumentError(f"avgpool2x needs even spatial dimensions, got {h} x {w}.")
    blocks = src.reshape(c, h // 2, 2, w // 2, 2)
    return (blocks[:, :, 0, :, 0] + blocks[:, :, 0, :, 1] + blocks[:, :, 1, :, 0] + blocks[:, :, 1, :, 1]) / 4


def avgpool2x_adjoint(grad: np.ndarray) -> np.ndarray:
    """ Adjoint of avgpool2x: every input of a block receives a quarter of its gradient. """
    grad = np.asarray(grad, dtype=np.float64)
    return np.repeat(np.repeat(grad, 2, axis=1), 2, axis=2) / 4
