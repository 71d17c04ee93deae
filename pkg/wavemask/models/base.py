from collections import OrderedDict
from typing import Dict, Sequence, Tuple

import numpy as np

from wavemask.errors import InvalidArgumentError, TrainingDivergedError
from wavemask.tensor import Rng


class ToyModel:
    """ Base of the desk-scale models: a fixed, ordered set of named float64 parameter
    arrays stored as attributes. Updates happen in place, so the arrays returned by
    params() stay bound to the model.
    """

    kind = ""
    param_names: Tuple[str, ...] = ()

    def params(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, getattr(self, name)) for name in self.param_names)

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.params().values())

    def set_params(self, values: Dict[str, np.ndarray]) -> None:
        """ Replaces the parameters, checking every name and shape. """
        for name, current in self.params().items():
            if name not in values:
                raise InvalidArgumentError(f"Missing parameter '{name}' for the {self.kind} model.")
            new = np.asarray(values[name], dtype=np.float64)
            if new.shape != current.shape:
                raise InvalidArgumentError(
                    f"Parameter '{name}' has shape {new.shape}, the model expects {current.shape}."
                )
            setattr(self, name, new.copy())

    def hyperparameters(self) -> Dict[str, int]:
        raise NotImplementedError


def uniform_init(rng: Rng, shape: Sequence[int], fan_in: int) -> np.ndarray:
    """ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) entries drawn from the stream of rng. """
    bound = 1 / np.sqrt(fan_in)
    return rng.uniform_array(shape, -bound, bound)


def sgd_step(model: ToyModel, grads: Dict[str, np.ndarray], lr: float) -> None:
    """ Plain gradient descent update p <- p - lr * g, in place, for every parameter.

    :param model: the model to update
    :param grads: gradients keyed by parameter name
    :param lr: learning rate, > 0
    :return: None
    """
    if lr <= 0:
        raise InvalidArgumentError(f"The learning rate must be positive, got {lr}.")
    for name, p in model.params().items():
        g = grads[name]
        if g.shape != p.shape:
            raise InvalidArgumentError(f"Gradient of '{name}' has shape {g.shape}, expected {p.shape}.")
        p -= lr * g
        if not np.all(np.isfinite(p)):
            raise TrainingDivergedError(f"Parameter '{name}' is no longer finite after the update.")
