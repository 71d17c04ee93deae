""" Time-dependent binary supervision masks.

At discrete timestep t of a schedule with T steps and lower bound l, a location (i, j) is
supervised when T * (A(i, j) + l) >= t. Every location is therefore supervised for at
least the first floor(l T) timesteps, and salient locations for proportionally more.

Flow matching runs on a continuous time tau in [0, 1]; it maps to the discrete timestep
t = ceil(tau T), with tau = 0 mapped to t = 1.
"""
import math
from typing import Iterable, List, NamedTuple, Optional, Union

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.saliency import SaliencyMap

SaliencyLike = Union[SaliencyMap, np.ndarray]


class MaskSchedule(NamedTuple):
    T: int
    lower_bound: float


class BinaryMask(NamedTuple):
    """ Mask with entries exactly 0.0 or 1.0, shape H x W, built for timestep t. """

    mask: np.ndarray
    t: int

    @property
    def fraction(self) -> float:
        return float(np.mean(self.mask))


def make_schedule(T: Optional[int] = None, lower_bound: Optional[float] = None) -> MaskSchedule:
    """ Validated mask schedule; missing values come from the [Masking] configuration.

    :param T: total number of timesteps, T >= 1
    :param lower_bound: supervision floor l in [0, 1]
    :return: MaskSchedule
    """
    T = config.getint("Masking", "T") if T is None else T
    lower_bound = config.getfloat("Masking", "lower_bound") if lower_bound is None else lower_bound
    if int(T) != T or T < 1:
        raise InvalidArgumentError(f"The number of timesteps T must be a positive integer, got {T}.")
    if not 0.0 <= lower_bound <= 1.0:
        raise InvalidArgumentError(f"The lower bound must be in [0, 1], got {lower_bound}.")
    return MaskSchedule(int(T), float(lower_bound))


def _saliency_array(A: SaliencyLike) -> np.ndarray:
    return np.asarray(A.map if isinstance(A, SaliencyMap) else A, dtype=np.float64)


def tau_to_timestep(tau: float, T: int) -> int:
    """ Discrete timestep of a continuous flow time: ceil(tau T), at least 1. """
    if not 0.0 <= tau <= 1.0:
        raise InvalidArgumentError(f"The flow time tau must be in [0, 1], got {tau}.")
    return min(T, max(1, math.ceil(tau * T)))


def mask_at(A: SaliencyLike, sched: MaskSchedule, t: int) -> BinaryMask:
    """ Binary mask at timestep t: 1 where T (A + l) >= t, ties included.

    :param A: saliency map (or a plain H x W array of saliency values)
    :param sched: the mask schedule
    :param t: timestep in {1, ..., T}
    :return: BinaryMask
    """
    if int(t) != t or not 1 <= t <= sched.T:
        raise InvalidArgumentError(f"The timestep must be an integer in [1, {sched.T}], got {t}.")
    a = _saliency_array(A)
    mask = (sched.T * (a + sched.lower_bound) >= t).astype(np.float64)
    return BinaryMask(mask, int(t))


def mask_at_tau(A: SaliencyLike, sched: MaskSchedule, tau: float) -> BinaryMask:
    return mask_at(A, sched, tau_to_timestep(tau, sched.T))


def mask_sequence(A: SaliencyLike, sched: MaskSchedule, timesteps: Iterable[int]) -> List[BinaryMask]:
    """ Masks of a saliency map over a series of timesteps, to follow how supervision
    shrinks towards the salient regions as t grows.
    """
    return [mask_at(A, sched, t) for t in timesteps]


def supervised_steps(A: SaliencyLike, sched: MaskSchedule) -> np.ndarray:
    """ Number of timesteps in 1..T at which each location is supervised,
    min(T, floor(T (A + l))).
    """
    a = _saliency_array(A)
    return np.minimum(sched.T, np.floor(sched.T * (a + sched.lower_bound)))


def coverage_fraction(A: SaliencyLike, sched: MaskSchedule) -> np.ndarray:
    """ Fraction of the timesteps at which each location is supervised, min(1, A + l).
    It agrees with supervised_steps / T to within 1 / T.
    """
    a = _saliency_array(A)
    return np.minimum(1.0, a + sched.lower_bound)
