""" Dense float64 tensors are plain numpy arrays in wavemask, with images, latents,
subbands and masks stored channel first (C x H x W). This package provides the pieces
every other module builds on: the seeded random stream, dyadic resampling and file I/O.
"""
import numpy as np

from .rng import Rng, gaussian_sample
from .resample import (
    bilinear_upsample2x,
    bilinear_upsample2x_adjoint,
    avgpool2x,
    avgpool2x_adjoint,
)
from .file_io import (
    read_tensor,
    write_tensor,
    read_netpbm,
    write_netpbm,
    read_image,
    write_image,
)
from wavemask.errors import InvalidArgumentError


def as_chw(tensor: np.ndarray) -> np.ndarray:
    """ Views an H x W array as 1 x H x W; C x H x W arrays are returned unchanged. """
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim == 2:
        return tensor[None]
    if tensor.ndim != 3:
        raise InvalidArgumentError(f"Expected an H x W or C x H x W tensor, got shape {tensor.shape}.")
    return tensor


def check_finite(tensor: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(tensor)):
        raise InvalidArgumentError(f"{name} contains NaN or infinite values.")
    return tensor
