""" Wavelet energy saliency maps.

The saliency of a latent is the local high-frequency energy of its single level Haar
transform, averaged over channels, bilinearly upsampled back to the latent resolution and
min-max normalised per sample to [0, 1]. Regions rich in edges and texture score high;
smooth regions score low.
"""
from typing import NamedTuple, Optional, Tuple

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.tensor import bilinear_upsample2x, as_chw
from wavemask.wavelet import dwt2


class SaliencyMap(NamedTuple):
    """ Normalised saliency A in [0, 1], shape H x W. """

    map: np.ndarray
    source_shape: Tuple[int, ...]
    epsilon: float


def default_epsilon() -> float:
    return config.getfloat("Masking", "epsilon")


def energy_map(z: np.ndarray) -> np.ndarray:
    """ Local high-frequency energy E(i, j) = mean over channels of LH^2 + HL^2 + HH^2.

    :param z: latent of shape C x H x W with even H and W
    :return: energy map of shape H/2 x W/2
    """
    bands = dwt2(as_chw(z))
    return np.mean(bands.lh ** 2 + bands.hl ** 2 + bands.hh ** 2, axis=0)


def normalize_saliency(energy: np.ndarray, epsilon: Optional[float] = None,
                       source_shape: Optional[Tuple[int, ...]] = None) -> SaliencyMap:
    """ Upsamples an energy map by 2 and min-max normalises it:
    A = (E - min E) / (max E - min E + epsilon), with one minimum and maximum per map.
    A constant energy map normalises to all zeros.

    :param energy: energy map of shape h x w
    :param epsilon: positive guard against a zero range
    :param source_shape: shape of the latent the energy was computed from, for the record
    :return: SaliencyMap of shape 2h x 2w
    """
    epsilon = default_epsilon() if epsilon is None else epsilon
    if epsilon <= 0:
        raise InvalidArgumentError(f"The saliency epsilon must be positive, got {epsilon}.")
    energy = np.asarray(energy, dtype=np.float64)
    if energy.ndim != 2:
        raise InvalidArgumentError(f"normalize_saliency expects an h x w map, got shape {energy.shape}.")
    if not np.all(np.isfinite(energy)):
        raise InvalidArgumentError("The energy map contains NaN or infinite values.")

    up = bilinear_upsample2x(energy[None])[0]
    low, high = up.min(), up.max()
    a = (up - low) / (high - low + epsilon)
    a = np.clip(a, 0.0, 1.0)

    if source_shape is None:
        source_shape = (1,) + up.shape
    return SaliencyMap(a, tuple(source_shape), epsilon)


def saliency_from_latent(z: np.ndarray, epsilon: Optional[float] = None) -> SaliencyMap:
    """ Saliency map of a latent: energy_map followed by normalize_saliency. The result
    has the spatial shape of z.

    :param z: latent of shape C x H x W (H x W is read as one channel)
    :param epsilon: normalisation guard, by default the configured [Masking] epsilon
    :return: SaliencyMap of shape H x W
    """
    z = as_chw(z)
    return normalize_saliency(energy_map(z), epsilon, source_shape=z.shape)
