from pytest import fixture
import numpy as np
from unittest.mock import patch
import os


@fixture(autouse=True)
def wavemask_user(tmp_path):
    os.environ["WAVEMASK_USER_DATA"] = str(tmp_path)


def patch_plots(function):
    from functools import wraps

    @wraps(function)
    def decorated(*args, **kwargs):

        with patch("matplotlib.pyplot.show", lambda *x, **y: None):
            import matplotlib

            matplotlib.use("Agg")
            return function(*args, **kwargs)

    return decorated


@fixture
def np_rng():
    return np.random.default_rng(1234)


def unit_checkerboard(h, w, channels=1):
    """ Tiles of [[1, 0], [0, 1]]. """
    board = (np.add.outer(np.arange(h), np.arange(w)) % 2 == 0).astype(float)
    return np.repeat(board[None], channels, axis=0)


@fixture
def checkerboard():
    return unit_checkerboard


def relative_error(analytic, numeric):
    """ Norm-wise relative error of two gradient tensors. """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return np.linalg.norm(analytic - numeric) / scale


def numeric_gradient(loss, param, step=1e-5):
    """ Central finite differences of loss() with respect to every entry of param, which
    is modified in place and restored.
    """
    grad = np.zeros_like(param)
    it = np.nditer(param, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        original = param[idx]
        param[idx] = original + step
        plus = loss()
        param[idx] = original - step
        minus = loss()
        param[idx] = original
        grad[idx] = (plus - minus) / (2 * step)
    return grad


@fixture
def fd():
    return numeric_gradient, relative_error
