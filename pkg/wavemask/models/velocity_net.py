""" Velocity network: a two-layer perceptron applied independently at every spatial
position of a C x H x W latent. The input at each position is the C latent values followed
by the flow time tau and an optional scalar condition:

    v(i, j) = W2 tanh(W1 [z_t(:, i, j); tau; cond] + b1) + b2

Weights are shared across positions, so the network commutes with any permutation of the
positions.
"""
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.tensor import Rng, as_chw
from .base import ToyModel, uniform_init


class VelocityNet(ToyModel):
    """ Per-position velocity predictor.

    :param channels: number of latent channels C
    :param hidden: hidden width, by default the configured [Velocity] hidden
    :param rng: generator for the uniform(+-1/sqrt(fan_in)) initialisation. Without it all
        parameters start at zero.
    """

    kind = "velocity"
    param_names = ("W1", "b1", "W2", "b2")

    def __init__(self, channels: int, hidden: Optional[int] = None, rng: Optional[Rng] = None):
        hidden = config.getint("Velocity", "hidden") if hidden is None else hidden
        if channels < 1 or hidden < 1:
            raise InvalidArgumentError(f"Channels and hidden size must be positive, got {channels} and {hidden}.")
        self.channels = int(channels)
        self.hidden = int(hidden)

        n_in = self.channels + 2
        if rng is None:
            self.W1 = np.zeros((self.hidden, n_in))
            self.b1 = np.zeros(self.hidden)
            self.W2 = np.zeros((self.channels, self.hidden))
            self.b2 = np.zeros(self.channels)
        else:
            self.W1 = uniform_init(rng, (self.hidden, n_in), n_in)
            self.b1 = uniform_init(rng, (self.hidden,), n_in)
            self.W2 = uniform_init(rng, (self.channels, self.hidden), self.hidden)
            self.b2 = uniform_init(rng, (self.channels,), self.hidden)

    def hyperparameters(self) -> Dict[str, int]:
        return {"channels": self.channels, "hidden": self.hidden}

    def __repr__(self):
        return f"VelocityNet(channels={self.channels}, hidden={self.hidden})"


class _Activations(NamedTuple):
    inputs: np.ndarray
    hidden: np.ndarray
    shape: Tuple[int, ...]


def _inputs(net: VelocityNet, zt: np.ndarray, tau: float, cond: Optional[float]) -> Tuple[np.ndarray, Tuple]:
    zt = as_chw(zt)
    c, h, w = zt.shape
    if c != net.channels:
        raise InvalidArgumentError(f"The latent has {c} channels, the velocity network expects {net.channels}.")
    n = h * w
    x = np.empty((c + 2, n))
    x[:c] = zt.reshape(c, n)
    x[c] = tau
    x[c + 1] = 0.0 if cond is None else cond
    return x, zt.shape


def _forward(net: VelocityNet, zt: np.ndarray, tau: float, cond: Optional[float]) -> Tuple[np.ndarray, _Activations]:
    x, shape = _inputs(net, zt, tau, cond)
    hidden = np.tanh(net.W1 @ x + net.b1[:, None])
    v = net.W2 @ hidden + net.b2[:, None]
    return v.reshape(shape), _Activations(x, hidden, shape)


def velocity_forward(net: VelocityNet, zt: np.ndarray, tau: float, cond: Optional[float] = None) -> np.ndarray:
    """ Predicted velocity at every position.

    :param net: the network
    :param zt: latent of shape C x H x W
    :param tau: flow time
    :param cond: optional scalar condition, 0 when absent
    :return: velocity of shape C x H x W
    """
    v, _ = _forward(net, zt, tau, cond)
    return v


def velocity_backward(net: VelocityNet, zt: np.ndarray, tau: float, grad_v: np.ndarray,
                      cond: Optional[float] = None) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """ Back-propagates dL/dv through the network.

    :param net: the network
    :param zt: latent the forward pass was evaluated on
    :param tau: flow time
    :param grad_v: gradient of the loss with respect to the output, shape of zt
    :param cond: optional scalar condition
    :return: parameter gradients keyed by name, and dL/dzt
    """
    _, act = _forward(net, zt, tau, cond)
    grad_v = np.asarray(grad_v, dtype=np.float64)
    if grad_v.shape != act.shape:
        raise InvalidArgumentError(f"The output gradient has shape {grad_v.shape}, expected {act.shape}.")

    c = net.channels
    g_out = grad_v.reshape(c, -1)
    grads = {
        "W2": g_out @ act.hidden.T,
        "b2": g_out.sum(axis=1),
    }
    g_pre = (net.W2.T @ g_out) * (1 - act.hidden ** 2)
    grads["W1"] = g_pre @ act.inputs.T
    grads["b1"] = g_pre.sum(axis=1)

    g_in = net.W1.T @ g_pre
    return grads, g_in[:c].reshape(act.shape)
