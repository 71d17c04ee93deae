""" Evaluation of generated images against references, pair by pair or over two
directories of matching files.
"""
import json
import logging
import math
import os
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from natsort import natsorted

from wavemask import config
from wavemask.errors import InvalidArgumentError
from wavemask.tensor import as_chw, read_image
from .frequency import WqsConfig, hfe, hfei, hlfr, make_wqs_config, wqs
from .glcm import glcm_stats
from .ssim import ms_ssim

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".pgm", ".ppm", ".lwt")


class MetricReport(NamedTuple):
    hlfr_real: float
    hlfr_gen: float
    rdr: float
    wqs: float
    hfe_real: float
    hfe_gen: float
    hfei: float
    ms_ssim: float
    glcm_contrast: float
    glcm_energy: float
    glcm_homogeneity: float

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self._asdict(), f, indent=2)


def evaluate_pair(gen: np.ndarray, real: np.ndarray, cfg: Optional[WqsConfig] = None,
                  levels: Optional[int] = None) -> MetricReport:
    """ All metrics of one generated image against its reference. Texture statistics
    describe the generated image.

    :param gen: generated image, C x H x W in [0, 1]
    :param real: reference image of the same shape
    :param cfg: WQS settings; its depth is also used for HFE and HFEI
    :param levels: gray levels of the co-occurrence statistics
    :return: MetricReport
    """
    cfg = make_wqs_config() if cfg is None else cfg
    gen, real = as_chw(gen), as_chw(real)
    if gen.shape != real.shape:
        raise InvalidArgumentError(f"Generated and reference images differ in shape: {gen.shape} and {real.shape}.")
    h_gen, h_real = hlfr(gen), hlfr(real)
    texture = glcm_stats(gen, levels)
    return MetricReport(
        hlfr_real=h_real,
        hlfr_gen=h_gen,
        rdr=abs(h_gen - h_real),
        wqs=wqs(gen, real, cfg),
        hfe_real=hfe(real, cfg.depth),
        hfe_gen=hfe(gen, cfg.depth),
        hfei=hfei(gen, real, cfg.depth),
        ms_ssim=ms_ssim(gen, real),
        glcm_contrast=texture.contrast,
        glcm_energy=texture.energy,
        glcm_homogeneity=texture.homogeneity,
    )


def _evaluate_files(gen_path: str, real_path: str, cfg: WqsConfig, levels: Optional[int]) -> MetricReport:
    return evaluate_pair(read_image(gen_path), read_image(real_path), cfg, levels)


def _list_images(directory: str) -> List[str]:
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"Directory not found: {directory}")
    return natsorted(f for f in os.listdir(directory) if os.path.splitext(f)[1].lower() in IMAGE_SUFFIXES)


def match_files(gen_dir: str, real_dir: str) -> List[Tuple[str, str]]:
    """ Pairs the images of two directories by name, in natural sort order. Every name
    must be present in both.
    """
    gen_names, real_names = _list_images(gen_dir), _list_images(real_dir)
    only_gen = sorted(set(gen_names) - set(real_names))
    only_real = sorted(set(real_names) - set(gen_names))
    if only_gen or only_real:
        raise InvalidArgumentError(
            f"The directories do not match ({len(gen_names)} generated, {len(real_names)} reference files). "
            f"Only in {gen_dir}: {only_gen}. Only in {real_dir}: {only_real}."
        )
    if not gen_names:
        raise InvalidArgumentError(f"No images found in {gen_dir}.")
    return [(os.path.join(gen_dir, n), os.path.join(real_dir, n)) for n in gen_names]


def average_reports(reports: List[MetricReport]) -> MetricReport:
    return MetricReport(*[math.fsum(values) / len(reports) for values in zip(*reports)])


def evaluate_dirs(gen_dir: str, real_dir: str, cfg: Optional[WqsConfig] = None, levels: Optional[int] = None,
                  n_jobs: Optional[int] = None) -> MetricReport:
    """ Metrics of every pair of same-named images, averaged arithmetically. Pairs may be
    evaluated in parallel; the reduction always follows the sorted names.

    :param gen_dir: directory of generated images
    :param real_dir: directory of reference images with the same file names
    :param cfg: WQS settings
    :param levels: gray levels of the co-occurrence statistics
    :param n_jobs: joblib workers, by default the configured [Metrics] n_jobs
    :return: the averaged MetricReport
    """
    cfg = make_wqs_config() if cfg is None else cfg
    n_jobs = config.getint("Metrics", "n_jobs") if n_jobs is None else n_jobs
    pairs = match_files(gen_dir, real_dir)
    logger.info("Evaluating %d image pairs with %d job(s)", len(pairs), n_jobs)
    reports = Parallel(n_jobs=n_jobs)(delayed(_evaluate_files)(g, r, cfg, levels) for g, r in pairs)
    return average_reports(reports)
