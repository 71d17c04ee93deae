""" Autoencoder objective combining four terms:

    recon + alpha * scale_consistency + beta * KL + lambda_p * perceptual

- recon: ||x_rec - x||^2
- scale_consistency: ||x_down_rec - x_down||^2, the decode of the 2x downsampled latent
  against the 2x downsampled image
- KL: divergence of the diagonal Gaussian posterior from the standard normal prior
- perceptual: a learned perceptual metric needs pretrained weights, so the default is an
  edge-feature distance, the mean squared difference of the level-1 Haar detail bands.
  Any callable f(a, b) -> float can be passed in its place.
"""
import math
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.tensor import as_chw
from wavemask.wavelet import SubbandSet, dwt2, idwt2
from .flow_matching import LossBreakdown

Perceptual = Callable[[np.ndarray, np.ndarray], float]


class VaeLossWeights(NamedTuple):
    alpha: float = 0.25
    beta: float = 0.001
    lambda_p: float = 0.05


def default_weights() -> VaeLossWeights:
    """ Loss weights from the [VAE] section of the configuration. """
    return make_weights(
        config.getfloat("VAE", "alpha"), config.getfloat("VAE", "beta"), config.getfloat("VAE", "lambda_p")
    )


def make_weights(alpha: float, beta: float, lambda_p: float) -> VaeLossWeights:
    for name, value in (("alpha", alpha), ("beta", beta), ("lambda_p", lambda_p)):
        if value < 0:
            raise InvalidArgumentError(f"The loss weight {name} must be non-negative, got {value}.")
    return VaeLossWeights(float(alpha), float(beta), float(lambda_p))


def _check_pair(a: np.ndarray, b: np.ndarray, term: str) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"Shape mismatch in the {term} term: {a.shape} and {b.shape}.")
    return a, b


def kl_diag_gaussian(mu: np.ndarray, logvar: np.ndarray) -> float:
    """ KL(N(mu, exp(logvar)) || N(0, 1)) summed over all elements:
    sum of 0.5 (mu^2 + exp(logvar) - 1 - logvar).
    """
    mu, logvar = _check_pair(mu, logvar, "kl")
    terms = 0.5 * (mu ** 2 + np.exp(logvar) - 1 - logvar)
    return math.fsum(terms.ravel())


def kl_diag_gaussian_grad(mu: np.ndarray, logvar: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """ Gradients of kl_diag_gaussian: mu and 0.5 (exp(logvar) - 1). """
    mu, logvar = _check_pair(mu, logvar, "kl")
    return mu.copy(), 0.5 * (np.exp(logvar) - 1)


def _detail_difference(a: np.ndarray, b: np.ndarray) -> Tuple[SubbandSet, int]:
    a, b = _check_pair(as_chw(a), as_chw(b), "perceptual")
    da, db = dwt2(a), dwt2(b)
    diff = SubbandSet(np.zeros_like(da.ll), da.lh - db.lh, da.hl - db.hl, da.hh - db.hh)
    return diff, int(da.ll.size)


def perceptual_proxy(a: np.ndarray, b: np.ndarray) -> float:
    """ Edge-feature distance between two images: the squared differences of the three
    level-1 Haar detail bands, summed over bands and divided by the number of detail
    positions (C x H/2 x W/2). Blind to constant offsets.
    """
    diff, positions = _detail_difference(a, b)
    total = math.fsum(np.concatenate([(d * d).ravel() for d in diff.details()]))
    return total / positions


def perceptual_proxy_grad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """ Gradient of perceptual_proxy with respect to its first argument. The transform is
    orthonormal, so the adjoint of the analysis is the synthesis with LL left at zero.
    """
    diff, positions = _detail_difference(a, b)
    grad = 2 * idwt2(diff) / positions
    return grad.reshape(np.shape(a))


def combine_vae_terms(recon: float, scale_consistency: float, kl: float, perceptual: float,
                      weights: Optional[VaeLossWeights] = None) -> float:
    w = default_weights() if weights is None else weights
    return recon + w.alpha * scale_consistency + w.beta * kl + w.lambda_p * perceptual


def vae_loss(x: np.ndarray, x_rec: np.ndarray, x_down_rec: np.ndarray, x_down: np.ndarray, mu: np.ndarray,
             logvar: np.ndarray, weights: Optional[VaeLossWeights] = None, reduction: str = "sum",
             perceptual: Perceptual = perceptual_proxy) -> LossBreakdown:
    """ Four term autoencoder loss.

    :param x: input image
    :param x_rec: reconstruction of x
    :param x_down_rec: decode of the downsampled latent
    :param x_down: downsampled input
    :param mu: posterior mean
    :param logvar: posterior log variance
    :param weights: VaeLossWeights, by default from the configuration
    :param reduction: 'sum', or 'mean' to divide recon, scale consistency and KL by their
        element counts (the perceptual proxy is already a mean)
    :param perceptual: perceptual functional f(x_rec, x)
    :return: LossBreakdown with components recon, scale_consistency, kl and perceptual
    """
    w = default_weights() if weights is None else weights
    x, x_rec = _check_pair(x, x_rec, "reconstruction")
    x_down, x_down_rec = _check_pair(x_down, x_down_rec, "scale consistency")
    mu, logvar = _check_pair(mu, logvar, "kl")

    recon = math.fsum(((x_rec - x) ** 2).ravel())
    sc = math.fsum(((x_down_rec - x_down) ** 2).ravel())
    kl = kl_diag_gaussian(mu, logvar)
    if reduction == "mean":
        recon /= x.size
        sc /= x_down.size
        kl /= mu.size
    elif reduction != "sum":
        raise InvalidArgumentError(f"Unknown loss reduction '{reduction}'; use 'sum' or 'mean'.")
    proxy = perceptual(x_rec, x)

    components: Dict[str, float] = {
        "recon": recon,
        "scale_consistency": sc,
        "kl": kl,
        "perceptual": proxy,
    }
    total = combine_vae_terms(recon, sc, kl, proxy, w)
    return LossBreakdown(total, components, int(x.size))
