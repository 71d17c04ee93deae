""" A tiny variational autoencoder with a factor-2 latent:

- encoder: 2x2 average pooling followed by a per-position affine map from C image channels
  to 2C' channels, read as the posterior mean and log variance (clamped to a configured
  range, [-30, 20] by default).
- decoder: bilinear 2x upsampling followed by a per-position affine map from C' latent
  channels back to C image channels.

The scale consistency term decodes the 2x pooled latent and compares it with the 2x pooled
image. Image sides must be even and at least 4; when a latent side is odd, its last row or
column is left out of the pooled latent and of the pooled image alike.
"""
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.objectives import (
    LossBreakdown,
    VaeLossWeights,
    default_weights,
    kl_diag_gaussian_grad,
    perceptual_proxy_grad,
    vae_loss,
)
from wavemask.tensor import (
    Rng,
    as_chw,
    avgpool2x,
    avgpool2x_adjoint,
    bilinear_upsample2x,
    bilinear_upsample2x_adjoint,
    gaussian_sample,
)
from .base import ToyModel, uniform_init


class TinyVae(ToyModel):
    """ Per-position autoencoder around a 2x pooling bottleneck.

    :param channels: image channels C
    :param latent_channels: latent channels C', by default the configured [VAE] latent_channels
    :param rng: generator for the initialisation; all parameters are zero without it
    """

    kind = "vae"
    param_names = ("W_enc", "b_enc", "W_dec", "b_dec")

    def __init__(self, channels: int, latent_channels: Optional[int] = None, rng: Optional[Rng] = None):
        latent_channels = config.getint("VAE", "latent_channels") if latent_channels is None else latent_channels
        if channels < 1 or latent_channels < 1:
            raise InvalidArgumentError(
                f"Channels and latent channels must be positive, got {channels} and {latent_channels}."
            )
        self.channels = int(channels)
        self.latent_channels = int(latent_channels)
        self.logvar_min = config.getfloat("VAE", "logvar_min")
        self.logvar_max = config.getfloat("VAE", "logvar_max")

        c, cl = self.channels, self.latent_channels
        if rng is None:
            self.W_enc = np.zeros((2 * cl, c))
            self.b_enc = np.zeros(2 * cl)
            self.W_dec = np.zeros((c, cl))
            self.b_dec = np.zeros(c)
        else:
            self.W_enc = uniform_init(rng, (2 * cl, c), c)
            self.b_enc = uniform_init(rng, (2 * cl,), c)
            self.W_dec = uniform_init(rng, (c, cl), cl)
            self.b_dec = uniform_init(rng, (c,), cl)

    def hyperparameters(self) -> Dict[str, int]:
        return {"channels": self.channels, "latent_channels": self.latent_channels}

    def __repr__(self):
        return f"TinyVae(channels={self.channels}, latent_channels={self.latent_channels})"


class VaeOutput(NamedTuple):
    mu: np.ndarray
    logvar: np.ndarray
    z: np.ndarray
    x_rec: np.ndarray
    eta: np.ndarray
    x_down: np.ndarray
    x_down_rec: np.ndarray
    logvar_raw: np.ndarray


def _check_image(vae: TinyVae, x: np.ndarray) -> np.ndarray:
    x = as_chw(x)
    c, h, w = x.shape
    if c != vae.channels:
        raise InvalidArgumentError(f"The image has {c} channels, the autoencoder expects {vae.channels}.")
    if h % 2 or w % 2 or h < 4 or w < 4:
        raise InvalidArgumentError(f"The autoencoder needs even image sides of at least 4, got {h} x {w}.")
    return x


def _even_crop(t: np.ndarray) -> np.ndarray:
    """ The top-left part of a C x h x w tensor with both sides rounded down to even. """
    return t[:, :t.shape[1] // 2 * 2, :t.shape[2] // 2 * 2]


def _even_crop_adjoint(g: np.ndarray, shape) -> np.ndarray:
    out = np.zeros(shape)
    out[:, :g.shape[1], :g.shape[2]] = g
    return out


def _affine(W: np.ndarray, b: np.ndarray, src: np.ndarray) -> np.ndarray:
    c, h, w = src.shape
    return (W @ src.reshape(c, -1) + b[:, None]).reshape(W.shape[0], h, w)


def encode(vae: TinyVae, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ Posterior parameters of an image.

    :return: mean, clamped log variance and the unclamped log variance, each C' x H/2 x W/2
    """
    x = _check_image(vae, x)
    out = _affine(vae.W_enc, vae.b_enc, avgpool2x(x))
    cl = vae.latent_channels
    mu, raw = out[:cl], out[cl:]
    return mu, np.clip(raw, vae.logvar_min, vae.logvar_max), raw


def decode(vae: TinyVae, z: np.ndarray) -> np.ndarray:
    """ Image of shape C x 2h x 2w decoded from a C' x h x w latent. """
    z = as_chw(z)
    if z.shape[0] != vae.latent_channels:
        raise InvalidArgumentError(f"The latent has {z.shape[0]} channels, expected {vae.latent_channels}.")
    return _affine(vae.W_dec, vae.b_dec, bilinear_upsample2x(z))


def vae_forward(vae: TinyVae, x: np.ndarray, rng: Optional[Rng] = None, eta: Optional[np.ndarray] = None) -> VaeOutput:
    """ Reparameterised forward pass: z = mu + exp(logvar / 2) eta with eta ~ N(0, I).

    :param vae: the model
    :param x: image of shape C x H x W, even sides of at least 4
    :param rng: source of eta; used only when eta is not given
    :param eta: frozen noise of the latent shape, to repeat a pass exactly
    :return: VaeOutput
    """
    x = _check_image(vae, x)
    mu, logvar, raw = encode(vae, x)
    if eta is None:
        if rng is None:
            raise InvalidArgumentError("vae_forward needs either an rng or a frozen noise tensor eta.")
        eta = gaussian_sample(rng, mu.shape)
    eta = np.asarray(eta, dtype=np.float64)
    if eta.shape != mu.shape:
        raise InvalidArgumentError(f"The noise has shape {eta.shape}, the latent has shape {mu.shape}.")

    z = mu + np.exp(logvar / 2) * eta
    x_rec = decode(vae, z)
    x_down_rec = decode(vae, avgpool2x(_even_crop(z)))
    return VaeOutput(mu, logvar, z, x_rec, eta, _even_crop(avgpool2x(x)), x_down_rec, raw)


def vae_objective(vae: TinyVae, x: np.ndarray, out: VaeOutput, weights: Optional[VaeLossWeights] = None,
                  reduction: str = "sum") -> LossBreakdown:
    """ The four term loss of a forward pass, with the built-in perceptual proxy. """
    return vae_loss(as_chw(x), out.x_rec, out.x_down_rec, out.x_down, out.mu, out.logvar, weights, reduction)


def _decoder_backward(vae: TinyVae, z: np.ndarray, g_img: np.ndarray,
                      grads: Dict[str, np.ndarray]) -> np.ndarray:
    up = bilinear_upsample2x(z)
    cl = vae.latent_channels
    g = g_img.reshape(vae.channels, -1)
    grads["W_dec"] += g @ up.reshape(cl, -1).T
    grads["b_dec"] += g.sum(axis=1)
    g_up = (vae.W_dec.T @ g).reshape(up.shape)
    return bilinear_upsample2x_adjoint(g_up)


def vae_backward(vae: TinyVae, x: np.ndarray, out: VaeOutput, weights: Optional[VaeLossWeights] = None,
                 reduction: str = "sum") -> Dict[str, np.ndarray]:
    """ Parameter gradients of vae_objective for a forward pass, the sampled noise held
    fixed. Gradients through the log variance clamp are zero outside the clamp range.

    :param vae: the model
    :param x: the image of the forward pass
    :param out: the forward pass
    :param weights: loss weights, by default from the configuration
    :param reduction: 'sum' or 'mean', as in vae_loss
    :return: gradients keyed by parameter name
    """
    w = default_weights() if weights is None else weights
    x = _check_image(vae, x)
    if reduction == "mean":
        k_rec, k_sc, k_kl = 1 / x.size, 1 / out.x_down.size, 1 / out.mu.size
    elif reduction == "sum":
        k_rec = k_sc = k_kl = 1.0
    else:
        raise InvalidArgumentError(f"Unknown loss reduction '{reduction}'; use 'sum' or 'mean'.")

    grads = {name: np.zeros_like(p) for name, p in vae.params().items()}

    g_rec = 2 * k_rec * (out.x_rec - x) + w.lambda_p * perceptual_proxy_grad(out.x_rec, x)
    g_down = 2 * k_sc * w.alpha * (out.x_down_rec - out.x_down)

    g_z = _decoder_backward(vae, out.z, g_rec, grads)
    g_pooled = _decoder_backward(vae, avgpool2x(_even_crop(out.z)), g_down, grads)
    g_z += _even_crop_adjoint(avgpool2x_adjoint(g_pooled), out.z.shape)

    kl_mu, kl_logvar = kl_diag_gaussian_grad(out.mu, out.logvar)
    sigma = np.exp(out.logvar / 2)
    g_mu = g_z + w.beta * k_kl * kl_mu
    g_logvar = g_z * 0.5 * sigma * out.eta + w.beta * k_kl * kl_logvar
    inside = (out.logvar_raw >= vae.logvar_min) & (out.logvar_raw <= vae.logvar_max)
    g_logvar = np.where(inside, g_logvar, 0.0)

    cl = vae.latent_channels
    g_enc = np.concatenate([g_mu.reshape(cl, -1), g_logvar.reshape(cl, -1)])
    pooled = avgpool2x(x)
    grads["W_enc"] = g_enc @ pooled.reshape(vae.channels, -1).T
    grads["b_enc"] = g_enc.sum(axis=1)
    return grads
