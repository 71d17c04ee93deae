""" Sampling from a trained velocity network by integrating dz/dtau = v(z, tau) backwards
from pure noise at tau = 1 to tau = 0 with explicit Euler steps.
"""
import logging
import os
from typing import List, Optional, Sequence

import numpy as np

from wavemask.errors import InvalidArgumentError
from wavemask.models import VelocityNet, velocity_forward
from wavemask.tensor import Rng, gaussian_sample, write_netpbm

logger = logging.getLogger(__name__)


def euler_sample(net: VelocityNet, shape: Sequence[int], rng: Optional[Rng] = None, steps: int = 50,
                 cond: Optional[float] = None, z1: Optional[np.ndarray] = None) -> np.ndarray:
    """ Integrates the flow from tau = 1 to tau = 0:
    z_{tau - d} = z_tau - d v(z_tau, tau), with d = 1 / steps.

    :param net: velocity network
    :param shape: latent shape C x H x W
    :param rng: source of the initial noise
    :param steps: number of Euler steps, >= 1
    :param cond: optional scalar condition
    :param z1: initial noise, drawn from rng when not given
    :return: the sample at tau = 0
    """
    if steps < 1:
        raise InvalidArgumentError(f"The number of sampling steps must be at least 1, got {steps}.")
    shape = tuple(shape)
    if len(shape) != 3 or shape[0] != net.channels:
        raise InvalidArgumentError(f"Cannot sample shape {shape} from a network with {net.channels} channels.")
    if z1 is None:
        if rng is None:
            raise InvalidArgumentError("euler_sample needs either an rng or the initial noise z1.")
        z1 = gaussian_sample(rng, shape)
    z = np.array(z1, dtype=np.float64).reshape(shape)

    d = 1 / steps
    for k in range(steps):
        tau = 1 - k * d
        z = z - d * velocity_forward(net, z, tau, cond)
    return z


def sample_to_directory(net: VelocityNet, n: int, shape: Sequence[int], seed: int, out_dir, steps: int = 50,
                        cond: Optional[float] = None) -> List[str]:
    """ Writes n samples as 8-bit images sample_0000.pgm, ... (values clipped to [0, 1]),
    ready for frequency evaluation.

    :return: the written paths
    """
    if n < 1:
        raise InvalidArgumentError(f"The number of samples must be at least 1, got {n}.")
    if shape[0] not in (1, 3):
        raise InvalidArgumentError(f"Only 1 or 3 channel samples can be written as images, got {shape[0]}.")
    os.makedirs(out_dir, exist_ok=True)
    rng = Rng(seed)
    suffix = "pgm" if shape[0] == 1 else "ppm"
    paths = []
    for i in range(n):
        path = os.path.join(out_dir, f"sample_{i:04d}.{suffix}")
        write_netpbm(path, euler_sample(net, shape, rng, steps, cond))
        paths.append(path)
    logger.info("Wrote %d samples to %s", n, out_dir)
    return paths
