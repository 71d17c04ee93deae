""" Per-region diagnostics of a velocity network on a dataset: the squared velocity
residual over salient and non-salient positions, and over the textured and smooth regions
of the synthetic samples, together with how many timesteps each region is supervised for.
"""
import math
from typing import Dict, Optional

import numpy as np

from wavemask.masking import MaskSchedule, coverage_fraction, mask_at
from wavemask.models import VelocityNet, velocity_forward
from wavemask.objectives import make_flow_sample
from wavemask.saliency import saliency_from_latent
from wavemask.tensor import Rng, gaussian_sample
from .datasets import SyntheticDataset, as_dataset, check_dataset

HIGH_SALIENCY = 0.5


class _Pool:
    """ Values of a region, pooled across samples. """

    def __init__(self):
        self.values = []
        self.count = 0

    def add(self, values: np.ndarray, region: np.ndarray) -> None:
        self.values.append(values[region].ravel())
        self.count += int(np.count_nonzero(region))

    def mean(self) -> float:
        if self.count == 0:
            return math.nan
        return math.fsum(np.concatenate(self.values)) / self.count


def _ratio(high: float, low: float) -> float:
    if math.isnan(high) or math.isnan(low) or low == 0:
        return math.nan
    return high / low


def region_report(net: VelocityNet, dataset: SyntheticDataset, schedule: MaskSchedule, rng: Optional[Rng] = None,
                  draws: int = 1, epsilon: Optional[float] = None) -> Dict[str, float]:
    """ Mean squared velocity residual per region, and the supervised-step ratio between
    regions, measured by counting the masks over t = 1..T. The ratio is predicted from the
    region means of A as min(1, mean A_hi + l) / min(1, mean A_lo + l), and under the
    '_coverage' keys from the region means of the per-position coverage min(1, A + l).
    The counted ratio also carries the floor of T (A + l), so it sits within a few 1/T of
    either prediction.

    High saliency means A >= 0.5, with A computed from the clean sample. The textured
    region is the recorded checkerboard patch.

    :param net: velocity network
    :param dataset: synthetic dataset with recorded regions
    :param schedule: the mask schedule
    :param rng: source of the noise and flow times, Rng(0) by default
    :param draws: number of (noise, tau) draws per sample
    :param epsilon: saliency normalisation guard
    :return: dictionary of the report values
    """
    dataset = as_dataset(dataset)
    check_dataset(dataset)
    rng = Rng(0) if rng is None else rng

    pools = {name: _Pool() for name in ("high", "low", "textured", "smooth")}
    steps = {name: _Pool() for name in ("high", "low", "textured", "smooth")}
    coverages = {name: _Pool() for name in ("high", "low", "textured", "smooth")}
    saliency = {name: _Pool() for name in ("high", "low", "textured", "smooth")}

    for k, z0 in enumerate(dataset.samples):
        a = saliency_from_latent(z0, epsilon)
        high = a.map >= HIGH_SALIENCY
        regions = {"high": high, "low": ~high}
        if dataset.regions:
            regions.update(textured=dataset.regions[k], smooth=~dataset.regions[k])

        count = np.zeros(a.map.shape)
        for t in range(1, schedule.T + 1):
            count += mask_at(a, schedule, t).mask
        coverage = coverage_fraction(a, schedule)

        for _ in range(draws):
            eps = gaussian_sample(rng, z0.shape)
            sample = make_flow_sample(z0, eps, rng.uniform())
            r = sample.target - velocity_forward(net, sample.zt, sample.tau)
            per_position = np.mean(r * r, axis=0)
            for name, region in regions.items():
                pools[name].add(per_position, region)

        for name, region in regions.items():
            steps[name].add(count / schedule.T, region)
            coverages[name].add(coverage, region)
            saliency[name].add(a.map, region)

    def covered(name):
        mean = saliency[name].mean()
        return mean if math.isnan(mean) else min(1.0, mean + schedule.lower_bound)

    report = {f"residual_{name}": pool.mean() for name, pool in pools.items()}
    report.update({f"supervised_fraction_{name}": pool.mean() for name, pool in steps.items()})
    report.update({f"saliency_{name}": pool.mean() for name, pool in saliency.items()})
    report["supervised_ratio"] = _ratio(steps["textured"].mean(), steps["smooth"].mean())
    report["predicted_ratio"] = _ratio(covered("textured"), covered("smooth"))
    report["predicted_ratio_coverage"] = _ratio(coverages["textured"].mean(), coverages["smooth"].mean())
    report["supervised_ratio_saliency"] = _ratio(steps["high"].mean(), steps["low"].mean())
    report["predicted_ratio_saliency"] = _ratio(covered("high"), covered("low"))
    report["predicted_ratio_saliency_coverage"] = _ratio(coverages["high"].mean(), coverages["low"].mean())
    report["T"] = schedule.T
    report["lower_bound"] = schedule.lower_bound
    return report
