""" Desk-scale differentiable models with analytic gradients: a per-position velocity
network for flow matching and a tiny variational autoencoder.
"""
from .base import ToyModel, sgd_step, uniform_init
from .velocity_net import VelocityNet, velocity_forward, velocity_backward
from .tiny_vae import TinyVae, VaeOutput, encode, decode, vae_forward, vae_backward, vae_objective
from .checkpoint import save_checkpoint, load_checkpoint
