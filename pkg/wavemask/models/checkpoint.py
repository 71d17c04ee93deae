""" Model checkpoints. A checkpoint is a directory with

- one LWT1 tensor file per parameter, <name>.lwt
- manifest.txt, one "name d1 d2 ..." line per tensor
- model.cfg, an INI file with the model kind, its hyperparameters and the training
  options it was produced with.

Tensors are stored in single precision, so a reloaded model agrees with the saved one to
float32 accuracy.
"""
import logging
import os
from configparser import ConfigParser
from typing import Dict, Optional, Tuple, Union

import numpy as np

from wavemask.errors import FormatError
from wavemask.state import State
from wavemask.tensor import read_tensor, write_tensor
from .base import ToyModel
from .tiny_vae import TinyVae
from .velocity_net import VelocityNet

logger = logging.getLogger(__name__)

MANIFEST = "manifest.txt"
MODEL_CONFIG = "model.cfg"


def save_checkpoint(model: ToyModel, directory: Union[str, os.PathLike], options: Optional[Dict] = None) -> None:
    """ Writes the model parameters, manifest and options to a directory, created if needed.

    :param model: VelocityNet or TinyVae
    :param directory: destination directory
    :param options: training options to record alongside
    :return: None
    """
    os.makedirs(directory, exist_ok=True)
    lines = []
    for name, p in model.params().items():
        write_tensor(os.path.join(directory, f"{name}.lwt"), p)
        lines.append(" ".join([name] + [str(d) for d in p.shape]))
    with open(os.path.join(directory, MANIFEST), "w") as f:
        f.write("\n".join(lines) + "\n")

    cfg = ConfigParser()
    cfg.optionxform = str
    cfg["Model"] = {"kind": model.kind, **{k: str(v) for k, v in model.hyperparameters().items()}}
    cfg["Training"] = {k: str(v) for k, v in (options or {}).items()}
    with open(os.path.join(directory, MODEL_CONFIG), "w") as f:
        cfg.write(f)
    logger.info("Saved %r to %s", model, directory)


def _parse_manifest(path: str) -> Dict[str, Tuple[int, ...]]:
    shapes = {}
    with open(path) as f:
        for number, line in enumerate(f, 1):
            fields = line.split()
            if not fields:
                continue
            try:
                shapes[fields[0]] = tuple(int(d) for d in fields[1:])
            except ValueError:
                raise FormatError(f"Invalid manifest line {number}: {line.strip()!r}", path)
    return shapes


def load_checkpoint(directory: Union[str, os.PathLike]) -> Tuple[ToyModel, State]:
    """ Rebuilds a model saved with save_checkpoint.

    :param directory: checkpoint directory
    :return: the model and the recorded training options, as strings
    """
    cfg_path = os.path.join(directory, MODEL_CONFIG)
    if not os.path.isfile(cfg_path):
        raise FileNotFoundError(f"No checkpoint found in {directory}: missing {MODEL_CONFIG}")
    cfg = ConfigParser()
    cfg.optionxform = str
    cfg.read(cfg_path)

    kind = cfg.get("Model", "kind", fallback="")
    if kind == VelocityNet.kind:
        model: ToyModel = VelocityNet(cfg.getint("Model", "channels"), cfg.getint("Model", "hidden"))
    elif kind == TinyVae.kind:
        model = TinyVae(cfg.getint("Model", "channels"), cfg.getint("Model", "latent_channels"))
    else:
        raise FormatError(f"Unknown model kind '{kind}'", cfg_path)

    shapes = _parse_manifest(os.path.join(directory, MANIFEST))
    values = {}
    for name, expected in model.params().items():
        path = os.path.join(directory, f"{name}.lwt")
        tensor = read_tensor(path)
        if shapes.get(name) != tensor.shape or tensor.shape != expected.shape:
            raise FormatError(
                f"Tensor '{name}' has shape {tensor.shape}, the manifest lists {shapes.get(name)} "
                f"and the model expects {expected.shape}",
                path,
            )
        values[name] = tensor
    model.set_params(values)

    options = State(cfg.items("Training")) if cfg.has_section("Training") else State()
    return model, options
