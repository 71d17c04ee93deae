""" Flow matching objective on the linear interpolant between a clean latent z0 and Gaussian
noise eps:

    z_t = (1 - tau) z0 + tau eps,      target velocity  eps - z0

The plain loss is the squared L2 norm of the residual r = (eps - z0) - v_pred. The masked
loss multiplies the residual by a binary H x W mask, broadcast across channels, before
squaring. Sums are exactly rounded (math.fsum), so an all-ones mask reproduces the plain
loss to the last bit and the result does not depend on summation order.
"""
import math
from typing import Dict, NamedTuple, Optional, Union

import numpy as np

from wavemask.errors import InvalidArgumentError
from wavemask.masking import BinaryMask

MaskLike = Union[BinaryMask, np.ndarray]


class FlowSample(NamedTuple):
    z0: np.ndarray
    eps: np.ndarray
    tau: float
    zt: np.ndarray
    cond: Optional[float] = None

    @property
    def target(self) -> np.ndarray:
        return self.eps - self.z0


class LossBreakdown(NamedTuple):
    """ A loss value with its named components and the number of elements that
    contributed to it.
    """

    total: float
    components: Dict[str, float]
    active_element_count: int


def make_flow_sample(z0: np.ndarray, eps: np.ndarray, tau: float, cond: Optional[float] = None) -> FlowSample:
    """ Point of the linear interpolant at flow time tau.

    :param z0: clean latent
    :param eps: noise of the same shape
    :param tau: flow time in [0, 1]
    :param cond: optional scalar condition, carried along for the velocity network
    :return: FlowSample
    """
    z0 = np.asarray(z0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if z0.shape != eps.shape:
        raise InvalidArgumentError(f"z0 and eps must have the same shape, got {z0.shape} and {eps.shape}.")
    if not 0.0 <= tau <= 1.0:
        raise InvalidArgumentError(f"The flow time tau must be in [0, 1], got {tau}.")
    zt = (1 - tau) * z0 + tau * eps
    return FlowSample(z0, eps, float(tau), zt, cond)


def _residual(sample: FlowSample, v_pred: np.ndarray) -> np.ndarray:
    v_pred = np.asarray(v_pred, dtype=np.float64)
    if v_pred.shape != sample.z0.shape:
        raise InvalidArgumentError(
            f"The predicted velocity has shape {v_pred.shape}, the sample has shape {sample.z0.shape}."
        )
    return sample.target - v_pred


def _mask_array(mask: MaskLike, residual: np.ndarray) -> np.ndarray:
    m = np.asarray(mask.mask if isinstance(mask, BinaryMask) else mask, dtype=np.float64)
    if residual.ndim < 2 or m.shape != residual.shape[-2:]:
        raise InvalidArgumentError(
            f"The mask has shape {m.shape} but the sample has spatial shape {residual.shape[-2:]}."
        )
    return m


def _sum_of_squares(x: np.ndarray) -> float:
    return math.fsum((x * x).ravel())


def fm_loss(sample: FlowSample, v_pred: np.ndarray) -> LossBreakdown:
    """ Unmasked flow matching loss ||(eps - z0) - v_pred||^2.

    :param sample: the interpolant sample
    :param v_pred: predicted velocity, same shape as the sample
    :return: LossBreakdown with the sum as total and components 'fm' (sum) and 'fm_mean'
    """
    r = _residual(sample, v_pred)
    total = _sum_of_squares(r)
    return LossBreakdown(total, {"fm": total, "fm_mean": total / r.size}, int(r.size))


def masked_fm_loss(sample: FlowSample, v_pred: np.ndarray, mask: MaskLike) -> LossBreakdown:
    """ Masked flow matching loss ||M * ((eps - z0) - v_pred)||^2, with the H x W mask
    broadcast across channels.

    :param sample: the interpolant sample
    :param v_pred: predicted velocity, same shape as the sample
    :param mask: BinaryMask or H x W array of zeros and ones
    :return: LossBreakdown with the sum as total, components 'masked_fm' (sum) and
        'masked_fm_mean' (sum per active element, 0 when nothing is supervised)
    """
    r = _residual(sample, v_pred)
    m = _mask_array(mask, r)
    masked = r * m
    total = _sum_of_squares(masked)
    active = int(np.count_nonzero(np.broadcast_to(m, r.shape)))
    mean = total / active if active else 0.0
    return LossBreakdown(total, {"masked_fm": total, "masked_fm_mean": mean}, active)


def masked_fm_loss_grad(sample: FlowSample, v_pred: np.ndarray, mask: MaskLike, reduction: str = "sum") -> np.ndarray:
    """ Gradient of the masked loss with respect to v_pred: -2 M * r for the sum, divided by
    the number of active elements for the mean.

    :param sample: the interpolant sample
    :param v_pred: predicted velocity
    :param mask: BinaryMask or H x W array
    :param reduction: 'sum' or 'mean'
    :return: array shaped like v_pred
    """
    r = _residual(sample, v_pred)
    m = _mask_array(mask, r)
    grad = -2 * (r * m) * m
    if reduction == "sum":
        return grad
    elif reduction == "mean":
        active = int(np.count_nonzero(np.broadcast_to(m, r.shape)))
        return grad / active if active else np.zeros_like(grad)
    raise InvalidArgumentError(f"Unknown loss reduction '{reduction}'; use 'sum' or 'mean'.")
