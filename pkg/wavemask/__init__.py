""" wavemask: wavelet saliency, time-dependent supervision masks and frequency-aware
metrics for latent flow-matching training, at desk scale.
"""
import os

WAVEMASK_ROOT = os.path.split(__file__)[0]
default_config = os.path.join(WAVEMASK_ROOT, "wavemask_config.txt")
user_path = os.environ.get("WAVEMASK_USER_DATA")
if user_path is None:
    user_path = os.path.join(os.path.expanduser("~"), ".wavemask")
user_config = os.path.join(user_path, "wavemask_config.txt")

from .config_tools import WavemaskConfig

config = WavemaskConfig(default_config, user_config)
__version__ = config.version()
