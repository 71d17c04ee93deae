""" Synthetic texture dataset standing in for real latents and images at desk scale.

Every sample is a smooth field, 0.5 plus two random low-order cosine modes, with a one
pixel checkerboard patch added over one randomly chosen quadrant. The patch is the high
frequency region; its quadrant and its pixel mask are recorded with the sample. Values stay
in [0, 1], so samples can be written as images.
"""
import math
from typing import List, NamedTuple, Tuple

import numpy as np

from wavemask.errors import InvalidArgumentError
from wavemask.tensor import Rng

MODE_AMPLITUDE = 0.15
PATCH_AMPLITUDE = 0.2


class SyntheticDataset(NamedTuple):
    samples: List[np.ndarray]
    quadrants: List[int]
    regions: List[np.ndarray]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.samples[0].shape


def quadrant_mask(size: int, quadrant: int) -> np.ndarray:
    """ Boolean size x size mask of a quadrant: 0 top left, 1 top right, 2 bottom left,
    3 bottom right.
    """
    half = size // 2
    mask = np.zeros((size, size), dtype=bool)
    r0 = half if quadrant >= 2 else 0
    c0 = half if quadrant % 2 else 0
    mask[r0:r0 + half, c0:c0 + half] = True
    return mask


def _cosine_mode(rng: Rng, size: int) -> np.ndarray:
    # frequencies of at most one cycle per side, never both zero
    kx, ky = 0, 0
    while kx == 0 and ky == 0:
        kx, ky = rng.randbelow(2), rng.randbelow(2)
    amplitude = MODE_AMPLITUDE * (0.5 + 0.5 * rng.uniform())
    phase = 2 * math.pi * rng.uniform()
    coords = (np.arange(size) + 0.5) / size
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    return amplitude * np.cos(2 * math.pi * (kx * xx + ky * yy) + phase)


def make_synthetic_dataset(rng: Rng, n: int, size: int, channels: int = 1) -> SyntheticDataset:
    """ Builds n textured samples of shape channels x size x size.

    :param rng: generator, advanced in place
    :param n: number of samples, >= 1
    :param size: side length, even and >= 16
    :param channels: number of channels; every channel gets the same field
    :return: SyntheticDataset
    """
    if n < 1:
        raise InvalidArgumentError(f"The dataset needs at least one sample, got n = {n}.")
    if size < 16 or size % 2:
        raise InvalidArgumentError(f"The sample size must be even and at least 16, got {size}.")

    checker = PATCH_AMPLITUDE * (1 - 2 * (np.add.outer(np.arange(size), np.arange(size)) % 2))
    samples, quadrants, regions = [], [], []
    for _ in range(n):
        field = 0.5 + _cosine_mode(rng, size) + _cosine_mode(rng, size)
        quadrant = rng.randbelow(4)
        region = quadrant_mask(size, quadrant)
        field = field + np.where(region, checker, 0.0)
        samples.append(np.repeat(field[None], channels, axis=0))
        quadrants.append(quadrant)
        regions.append(region)
    return SyntheticDataset(samples, quadrants, regions)


def as_dataset(dataset) -> SyntheticDataset:
    """ Wraps a plain sequence of tensors as a dataset without recorded regions. """
    if isinstance(dataset, SyntheticDataset):
        return dataset
    samples = [np.asarray(s, dtype=np.float64) for s in dataset]
    return SyntheticDataset(samples, [], [])


def check_dataset(dataset) -> Tuple[int, ...]:
    """ Shape shared by all samples of a dataset; any drift is an error. """
    samples = as_dataset(dataset).samples
    if not samples:
        raise InvalidArgumentError("The dataset is empty.")
    shape = np.shape(samples[0])
    for i, s in enumerate(samples):
        if np.shape(s) != shape:
            raise InvalidArgumentError(f"Sample {i} has shape {np.shape(s)}, the first sample has shape {shape}.")
    if len(shape) != 3:
        raise InvalidArgumentError(f"Samples must be C x H x W tensors, got shape {shape}.")
    return shape
