""" Training objectives: the flow matching loss, with and without a time-dependent
supervision mask, and the four term autoencoder loss with its perceptual stand-in.
"""
from .flow_matching import (
    FlowSample,
    LossBreakdown,
    make_flow_sample,
    fm_loss,
    masked_fm_loss,
    masked_fm_loss_grad,
)
from .vae_loss import (
    VaeLossWeights,
    default_weights,
    make_weights,
    kl_diag_gaussian,
    kl_diag_gaussian_grad,
    perceptual_proxy,
    perceptual_proxy_grad,
    combine_vae_terms,
    vae_loss,
)
