""" Deterministic training loops for the two stages of latent wavelet masked training:

- train_vae: the autoencoder with the four term multi-resolution loss
- train_flow: the velocity network with the wavelet masked flow matching loss
- encode_dataset: the autoencoder latents the velocity network trains on

Each step draws a sample, its noise and a flow time from one seeded stream, so the seed,
the options and the dataset fully determine every logged number. Evaluation losses use a
fixed set of draws from a second stream, seeded with seed + 1, before the first and after
the last update.

ablate_components chains the stages over the scale consistency weight and masking and
scores decoded Euler samples with the frequency metrics.
"""
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from wavemask import config
from wavemask.errors import InvalidArgumentError, TrainingDivergedError
from wavemask.masking import BinaryMask, MaskSchedule, make_schedule, mask_at, tau_to_timestep
from wavemask.models import (
    TinyVae,
    VelocityNet,
    decode,
    encode,
    sgd_step,
    vae_backward,
    vae_forward,
    vae_objective,
    velocity_backward,
    velocity_forward,
)
from wavemask.metrics import MetricReport, average_reports, evaluate_pair, make_wqs_config
from wavemask.objectives import (
    FlowSample,
    LossBreakdown,
    make_flow_sample,
    fm_loss,
    make_weights,
    masked_fm_loss,
    masked_fm_loss_grad,
)
from wavemask.saliency import SaliencyMap, saliency_from_latent
from wavemask.state import State, merge_dicts
from wavemask.tensor import Rng, gaussian_sample
from .datasets import SyntheticDataset, as_dataset, check_dataset, make_synthetic_dataset
from .region_report import region_report
from .sampling import euler_sample

logger = logging.getLogger(__name__)

EVAL_STREAM = 1
DATA_STREAM = 2
SAMPLE_STREAM = 3
DEFAULT_BOUNDS = (0.0, 0.1, 0.3, 0.5, 0.7)


def default_train_options() -> State:
    """ Training options from the configuration. """
    return State(
        seed=config.getint("Training", "seed"),
        steps=config.getint("Training", "steps"),
        learning_rate=config.getfloat("Training", "learning_rate"),
        batch_size=config.getint("Training", "batch_size"),
        dataset_size=config.getint("Training", "dataset_size"),
        image_size=config.getint("Training", "image_size"),
        reduction=config["Training", "reduction"],
        saliency_source=config["Training", "saliency_source"],
        eval_samples=config.getint("Training", "eval_samples"),
        log_every=config.getint("Training", "log_every"),
        T=config.getint("Masking", "T"),
        lower_bound=config.getfloat("Masking", "lower_bound"),
        epsilon=config.getfloat("Masking", "epsilon"),
        masking=True,
        hidden=config.getint("Velocity", "hidden"),
        latent_channels=config.getint("VAE", "latent_channels"),
        alpha=config.getfloat("VAE", "alpha"),
        beta=config.getfloat("VAE", "beta"),
        lambda_p=config.getfloat("VAE", "lambda_p"),
        cond=None,
    )


def train_options(user_options: Optional[Dict] = None) -> State:
    """ Merges user options over the configured defaults and validates them. """
    options = merge_dicts(default_train_options(), user_options)
    if int(options.steps) != options.steps or options.steps < 1:
        raise InvalidArgumentError(f"The number of steps must be a positive integer, got {options.steps}.")
    if options.learning_rate <= 0:
        raise InvalidArgumentError(f"The learning rate must be positive, got {options.learning_rate}.")
    if options.batch_size < 1:
        raise InvalidArgumentError(f"The batch size must be at least 1, got {options.batch_size}.")
    if options.eval_samples < 1:
        raise InvalidArgumentError(f"At least one evaluation sample is needed, got {options.eval_samples}.")
    if options.reduction not in ("sum", "mean"):
        raise InvalidArgumentError(f"Unknown loss reduction '{options.reduction}'; use 'sum' or 'mean'.")
    if options.saliency_source not in ("z0", "zt"):
        raise InvalidArgumentError(f"Unknown saliency source '{options.saliency_source}'; use 'z0' or 'zt'.")
    return options


def schedule_of(options: State) -> MaskSchedule:
    return make_schedule(options.T, options.lower_bound)


def demo_dataset(options: Optional[Dict] = None) -> SyntheticDataset:
    """ The synthetic dataset of a demo run, drawn from its own stream of the run seed. """
    options = train_options(options)
    return make_synthetic_dataset(Rng(options.seed + DATA_STREAM), options.dataset_size, options.image_size)


class TrainRecord(NamedTuple):
    step: int
    total: float
    components: Dict[str, float]
    masked_fraction: float


class TrainLog:
    """ One record per training step, plus the evaluation losses before and after training
    and, for flow runs, the final region report.
    """

    def __init__(self, mode: str):
        self.mode = mode
        self.records: List[TrainRecord] = []
        self.initial_eval: Optional[LossBreakdown] = None
        self.final_eval: Optional[LossBreakdown] = None
        self.region: Optional[Dict[str, float]] = None

    def append(self, record: TrainRecord) -> None:
        if self.records and record.step <= self.records[-1].step:
            raise InvalidArgumentError(f"Step {record.step} does not follow step {self.records[-1].step}.")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.records])

    @property
    def totals(self) -> np.ndarray:
        return np.array([r.total for r in self.records])

    @property
    def component_names(self) -> List[str]:
        return list(self.records[0].components) if self.records else []

    def to_csv(self, path) -> None:
        """ Writes step, total, the components and masked_fraction, one row per step. """
        names = self.component_names
        rows = [
            [r.step, r.total] + [r.components[n] for n in names] + [r.masked_fraction] for r in self.records
        ]
        header = ",".join(["step", "total"] + names + ["masked_fraction"])
        fmt = ["%d"] + ["%.17g"] * (len(names) + 2)
        np.savetxt(path, np.array(rows, dtype=np.float64).reshape(len(rows), len(names) + 3), delimiter=",",
                   header=header, comments="", fmt=fmt)


def _check_finite(value: float, what: str, step: int) -> None:
    if not math.isfinite(value):
        raise TrainingDivergedError(f"The {what} is not finite at step {step}: {value}.")


def _average(breakdowns: Sequence[LossBreakdown], totals: Sequence[float]) -> Tuple[float, Dict[str, float]]:
    n = len(totals)
    components = {k: math.fsum(b.components[k] for b in breakdowns) / n for k in breakdowns[0].components}
    return math.fsum(totals) / n, components


class _FlowCase(NamedTuple):
    sample: FlowSample
    mask: BinaryMask
    v: np.ndarray
    loss: LossBreakdown
    reduced: float


def _flow_case(net: VelocityNet, z0: np.ndarray, eps: np.ndarray, tau: float, schedule: MaskSchedule,
               options: State, saliency: Optional[SaliencyMap] = None) -> _FlowCase:
    sample = make_flow_sample(z0, eps, tau, options.get("cond"))
    t = tau_to_timestep(tau, schedule.T)
    if not options.masking:
        mask = BinaryMask(np.ones(z0.shape[-2:]), t)
    else:
        if options.saliency_source == "zt" or saliency is None:
            saliency = saliency_from_latent(sample.zt if options.saliency_source == "zt" else z0, options.epsilon)
        mask = mask_at(saliency, schedule, t)
    v = velocity_forward(net, sample.zt, tau, options.get("cond"))
    loss = masked_fm_loss(sample, v, mask)
    reduced = loss.components["masked_fm_mean"] if options.reduction == "mean" else loss.total
    return _FlowCase(sample, mask, v, loss, reduced)


def _eval_draws(dataset, shape, options: State):
    rng = Rng(options.seed + EVAL_STREAM)
    n = len(dataset.samples)
    for _ in range(options.eval_samples):
        i = rng.randbelow(n)
        yield i, gaussian_sample(rng, shape), rng.uniform()


def evaluate_flow(net: VelocityNet, dataset: SyntheticDataset, options: Optional[Dict] = None) -> LossBreakdown:
    """ Training objective of a velocity network averaged over the fixed evaluation draws.

    :param net: the network
    :param dataset: the dataset
    :param options: training options
    :return: LossBreakdown with the averaged reduced masked loss as total and the components
        'masked' (same value) and 'fm_mean', the unmasked mean squared residual
    """
    options = train_options(options)
    dataset = as_dataset(dataset)
    shape = check_dataset(dataset)
    schedule = schedule_of(options)
    totals, unmasked, active = [], [], 0
    for i, eps, tau in _eval_draws(dataset, shape, options):
        case = _flow_case(net, dataset.samples[i], eps, tau, schedule, options)
        totals.append(case.reduced)
        unmasked.append(fm_loss(case.sample, case.v).components["fm_mean"])
        active += case.loss.active_element_count
    total = math.fsum(totals) / len(totals)
    return LossBreakdown(total, {"masked": total, "fm_mean": math.fsum(unmasked) / len(unmasked)}, active)


def train_flow(options: Optional[Dict] = None, dataset: Optional[SyntheticDataset] = None,
               report_regions: bool = True) -> Tuple[VelocityNet, TrainLog]:
    """ Trains a velocity network with the masked flow matching loss and plain SGD.

    Every step draws a sample index, Gaussian noise and tau ~ U[0, 1), builds the saliency
    map of the clean sample (or of the interpolant, with saliency_source 'zt'), masks the
    timestep ceil(tau T) and takes one gradient step. With masking off the mask is all ones,
    which gives the same run as a lower bound of 1.

    :param options: training options, merged over the configured defaults
    :param dataset: dataset of C x H x W latents, by default the demo dataset
    :param report_regions: compute the region report of the trained network
    :return: the trained network and its TrainLog
    """
    options = train_options(options)
    dataset = demo_dataset(options) if dataset is None else as_dataset(dataset)
    shape = check_dataset(dataset)
    schedule = schedule_of(options)

    rng = Rng(options.seed)
    net = VelocityNet(shape[0], options.hidden, rng)
    saliency_cache: Dict[int, SaliencyMap] = {}

    log = TrainLog("flow")
    log.initial_eval = evaluate_flow(net, dataset, options)
    logger.info("Flow training: %d steps, T = %d, lower bound = %g, masking %s, initial eval loss %.6g",
                options.steps, schedule.T, schedule.lower_bound, "on" if options.masking else "off",
                log.initial_eval.total)

    n = len(dataset.samples)
    for step in range(1, options.steps + 1):
        cases, grads = [], None
        for _ in range(options.batch_size):
            i = rng.randbelow(n)
            z0 = dataset.samples[i]
            eps = gaussian_sample(rng, shape)
            tau = rng.uniform()
            if options.masking and options.saliency_source == "z0" and i not in saliency_cache:
                saliency_cache[i] = saliency_from_latent(z0, options.epsilon)
            case = _flow_case(net, z0, eps, tau, schedule, options, saliency_cache.get(i))
            _check_finite(case.reduced, "flow matching loss", step)

            g_v = masked_fm_loss_grad(case.sample, case.v, case.mask, options.reduction)
            g, _ = velocity_backward(net, case.sample.zt, tau, g_v, options.get("cond"))
            grads = g if grads is None else {k: grads[k] + g[k] for k in grads}
            cases.append(case)

        if options.batch_size > 1:
            grads = {k: v / options.batch_size for k, v in grads.items()}
        sgd_step(net, grads, options.learning_rate)

        total, components = _average([c.loss for c in cases], [c.reduced for c in cases])
        fraction = math.fsum(c.mask.fraction for c in cases) / len(cases)
        log.append(TrainRecord(step, total, components, fraction))
        if options.log_every and step % options.log_every == 0:
            logger.info("step %d: loss %.6g, masked fraction %.3f", step, total, fraction)

    log.final_eval = evaluate_flow(net, dataset, options)
    logger.info("Flow training done: eval loss %.6g -> %.6g", log.initial_eval.total, log.final_eval.total)
    if report_regions and dataset.regions:
        log.region = region_report(net, dataset, schedule, Rng(options.seed + EVAL_STREAM), epsilon=options.epsilon)
    return net, log


def _vae_weights(options: State):
    return make_weights(options.alpha, options.beta, options.lambda_p)


def evaluate_vae(vae: TinyVae, dataset: SyntheticDataset, options: Optional[Dict] = None) -> LossBreakdown:
    """ Autoencoder loss averaged over the fixed evaluation draws, with every component
    averaged alongside the total.
    """
    options = train_options(options)
    dataset = as_dataset(dataset)
    shape = check_dataset(dataset)
    weights = _vae_weights(options)
    latent_shape = (vae.latent_channels, shape[1] // 2, shape[2] // 2)
    breakdowns = []
    for i, eta, _ in _eval_draws(dataset, latent_shape, options):
        x = dataset.samples[i]
        out = vae_forward(vae, x, eta=eta)
        breakdowns.append(vae_objective(vae, x, out, weights, options.reduction))
    total, components = _average(breakdowns, [b.total for b in breakdowns])
    return LossBreakdown(total, components, sum(b.active_element_count for b in breakdowns))


def train_vae(options: Optional[Dict] = None, dataset: Optional[SyntheticDataset] = None) -> Tuple[TinyVae, TrainLog]:
    """ Trains the tiny autoencoder on the four term loss with plain SGD.

    :param options: training options, merged over the configured defaults
    :param dataset: dataset of C x H x W images with even sides of at least 4
    :return: the trained model and its TrainLog
    """
    options = train_options(options)
    dataset = demo_dataset(options) if dataset is None else as_dataset(dataset)
    shape = check_dataset(dataset)
    weights = _vae_weights(options)

    rng = Rng(options.seed)
    vae = TinyVae(shape[0], options.latent_channels, rng)

    log = TrainLog("vae")
    log.initial_eval = evaluate_vae(vae, dataset, options)
    logger.info("VAE training: %d steps, weights %s, initial eval loss %.6g", options.steps, weights,
                log.initial_eval.total)

    n = len(dataset.samples)
    for step in range(1, options.steps + 1):
        losses, grads = [], None
        for _ in range(options.batch_size):
            x = dataset.samples[rng.randbelow(n)]
            out = vae_forward(vae, x, rng)
            loss = vae_objective(vae, x, out, weights, options.reduction)
            _check_finite(loss.total, "autoencoder loss", step)
            g = vae_backward(vae, x, out, weights, options.reduction)
            grads = g if grads is None else {k: grads[k] + g[k] for k in grads}
            losses.append(loss)

        if options.batch_size > 1:
            grads = {k: v / options.batch_size for k, v in grads.items()}
        sgd_step(vae, grads, options.learning_rate)

        total, components = _average(losses, [b.total for b in losses])
        log.append(TrainRecord(step, total, components, 1.0))
        if options.log_every and step % options.log_every == 0:
            logger.info("step %d: loss %.6g, recon %.6g", step, total, components["recon"])

    log.final_eval = evaluate_vae(vae, dataset, options)
    logger.info("VAE training done: eval loss %.6g -> %.6g", log.initial_eval.total, log.final_eval.total)
    return vae, log


def sweep_lower_bound(options: Optional[Dict] = None, dataset: Optional[SyntheticDataset] = None,
                      bounds: Sequence[float] = DEFAULT_BOUNDS) -> List[Dict]:
    """ Trains one velocity network per masking lower bound, same seed and dataset.

    :param options: training options
    :param dataset: dataset of latents, by default the demo dataset
    :param bounds: lower bounds to try
    :return: one summary per bound, with the evaluation losses and the region report
    """
    options = train_options(options)
    dataset = demo_dataset(options) if dataset is None else as_dataset(dataset)
    results = []
    for bound in bounds:
        _, log = train_flow(merge_dicts(options, {"lower_bound": bound}), dataset)
        results.append(
            {
                "lower_bound": float(bound),
                "initial_eval": log.initial_eval.total,
                "final_eval": log.final_eval.total,
                "final_fm_mean": log.final_eval.components["fm_mean"],
                "region": log.region,
            }
        )
        logger.info("Lower bound %g: eval loss %.6g -> %.6g", bound, log.initial_eval.total, log.final_eval.total)
    return results


def encode_dataset(vae: TinyVae, dataset: SyntheticDataset) -> SyntheticDataset:
    """ Posterior means of every sample, the latent dataset the velocity network trains on.
    Recorded regions are subsampled to the latent grid.

    :param vae: trained autoencoder
    :param dataset: dataset of images
    :return: SyntheticDataset of C' x H/2 x W/2 latents
    """
    dataset = as_dataset(dataset)
    check_dataset(dataset)
    latents = [encode(vae, x)[0] for x in dataset.samples]
    regions = [np.asarray(r)[::2, ::2].copy() for r in dataset.regions]
    return SyntheticDataset(latents, list(dataset.quadrants), regions)


def _generated_metrics(vae: TinyVae, net: VelocityNet, images: SyntheticDataset, latent_shape, n: int,
                       options: State) -> MetricReport:
    rng = Rng(options.seed + SAMPLE_STREAM)
    cfg = make_wqs_config()
    reports = []
    for k in range(n):
        z = euler_sample(net, latent_shape, rng, options.sample_steps, options.get("cond"))
        generated = np.clip(decode(vae, z), 0.0, 1.0)
        reports.append(evaluate_pair(generated, images.samples[k % len(images.samples)], cfg))
    return average_reports(reports)


def ablate_components(options: Optional[Dict] = None, dataset: Optional[SyntheticDataset] = None,
                      samples: int = 4, alphas: Optional[Sequence[float]] = None) -> List[Dict]:
    """ Two-stage runs with the scale consistency weight off and on, each followed by flow
    training with masking off and on. Every run shares the seed and the image dataset.

    Generated images are Euler samples of the velocity network decoded by the autoencoder
    and clipped to [0, 1]; sample k is compared with image k of the dataset, cycling.

    :param options: training options; 'sample_steps' sets the Euler steps (50 by default)
    :param dataset: dataset of images, by default the demo dataset
    :param samples: generated images per run
    :param alphas: scale consistency weights, by default 0 and the configured alpha
    :return: one summary per (alpha, masking) pair with the evaluation losses of both
        stages and the averaged metrics of the generated images
    """
    options = merge_dicts({"sample_steps": 50}, train_options(options))
    if samples < 1:
        raise InvalidArgumentError(f"The number of generated samples must be at least 1, got {samples}.")
    dataset = demo_dataset(options) if dataset is None else as_dataset(dataset)
    alphas = (0.0, options.alpha) if alphas is None else alphas

    results = []
    for alpha in alphas:
        vae, vae_log = train_vae(merge_dicts(options, {"alpha": alpha}), dataset)
        latents = encode_dataset(vae, dataset)
        for masking in (False, True):
            net, flow_log = train_flow(merge_dicts(options, {"masking": masking}), latents)
            metrics = _generated_metrics(vae, net, dataset, check_dataset(latents), samples, options)
            results.append(
                {
                    "alpha": float(alpha),
                    "masking": masking,
                    "vae_final_eval": vae_log.final_eval.total,
                    "vae_final_recon": vae_log.final_eval.components["recon"],
                    "flow_initial_eval": flow_log.initial_eval.total,
                    "flow_final_eval": flow_log.final_eval.total,
                    "final_fm_mean": flow_log.final_eval.components["fm_mean"],
                    "metrics": metrics._asdict(),
                    "region": flow_log.region,
                }
            )
            logger.info("alpha %g, masking %s: flow eval loss %.6g, WQS %.4f, MS-SSIM %.4f", alpha,
                        "on" if masking else "off", flow_log.final_eval.total, metrics.wqs, metrics.ms_ssim)
    return results
