""" Command line interface of wavemask.

Exit codes: 0 on success, 2 for usage errors, 3 when a file cannot be read or written and
4 for invalid arguments and numeric errors. Diagnostics go to the standard error stream;
results are written to files, and to standard output where a command prints one.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from wavemask import config, __version__
from wavemask.errors import FormatError, InvalidArgumentError, TrainingDivergedError, UndefinedMetricError

logger = logging.getLogger("wavemask")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_NUMERIC = 4

# training options recorded in checkpoints, with their types
RECORDED_OPTIONS = {
    "seed": int,
    "steps": int,
    "learning_rate": float,
    "dataset_size": int,
    "image_size": int,
    "T": int,
    "lower_bound": float,
    "masking": lambda v: v == "True",
    "saliency_source": str,
    "reduction": str,
}


def _setup_logging(verbose: bool, quiet: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers = [handler]
    logger.propagate = False
    if quiet:
        logger.setLevel(logging.WARNING)
    elif verbose or config.verbose():
        logger.setLevel(logging.INFO)
    else:
        logger.setLevel(logging.WARNING)


def _bounds(text: str) -> List[float]:
    try:
        return [float(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid list of bounds: {text!r}")


def _write_json(data, path: Optional[str]) -> None:
    text = json.dumps(data, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w") as f:
            f.write(text + "\n")


def cmd_version(args) -> int:
    print(__version__)
    return EXIT_OK


def cmd_dwt(args) -> int:
    from wavemask.tensor import read_image, write_tensor
    from wavemask.wavelet import dwt2_multi

    pyramid = dwt2_multi(read_image(args.input), args.depth)
    os.makedirs(args.out_dir, exist_ok=True)
    write_tensor(os.path.join(args.out_dir, "ll.lwt"), pyramid.top_ll)
    for level, bands in enumerate(pyramid.levels, 1):
        for name, band in zip(("lh", "hl", "hh"), bands):
            write_tensor(os.path.join(args.out_dir, f"l{level}_{name}.lwt"), band)
    logger.info("Wrote %d levels to %s", pyramid.depth, args.out_dir)
    return EXIT_OK


def cmd_idwt(args) -> int:
    from wavemask.tensor import read_tensor, write_image
    from wavemask.wavelet import DetailBands, WaveletPyramid, idwt2_multi

    def band(name):
        return read_tensor(os.path.join(args.in_dir, name))

    levels = [
        DetailBands(band(f"l{level}_lh.lwt"), band(f"l{level}_hl.lwt"), band(f"l{level}_hh.lwt"))
        for level in range(1, args.depth + 1)
    ]
    image = idwt2_multi(WaveletPyramid(levels, [], band("ll.lwt")))
    write_image(args.out, image)
    return EXIT_OK


def cmd_saliency(args) -> int:
    from wavemask.saliency import saliency_from_latent
    from wavemask.tensor import read_image, write_netpbm, write_tensor

    a = saliency_from_latent(read_image(args.input), args.epsilon)
    write_tensor(args.out, a.map)
    if args.png:
        write_netpbm(args.png, a.map)
    return EXIT_OK


def cmd_mask(args) -> int:
    from wavemask.masking import make_schedule, mask_at, mask_at_tau
    from wavemask.tensor import read_tensor, write_netpbm, write_tensor

    a = read_tensor(args.saliency)
    if a.ndim == 3 and a.shape[0] == 1:
        a = a[0]
    if a.ndim != 2:
        raise InvalidArgumentError(f"The saliency map must be an H x W tensor, got shape {a.shape}.")
    schedule = make_schedule(args.T, args.l)
    mask = mask_at(a, schedule, args.t) if args.t is not None else mask_at_tau(a, schedule, args.tau)
    write_tensor(args.out, mask.mask)
    if args.png:
        write_netpbm(args.png, mask.mask)
    logger.info("Mask at t = %d covers %.4f of the positions", mask.t, mask.fraction)
    return EXIT_OK


def _train_overrides(args) -> dict:
    return {
        "seed": args.seed,
        "steps": args.steps,
        "T": args.T,
        "lower_bound": args.l,
        "learning_rate": args.lr,
        "masking": not args.no_mask if hasattr(args, "no_mask") else None,
        "reduction": getattr(args, "reduction", None),
        "saliency_source": getattr(args, "saliency_source", None),
    }


def _recorded(options) -> dict:
    return {k: options[k] for k in RECORDED_OPTIONS if k in options}


def _summary(log) -> dict:
    return {
        "mode": log.mode,
        "steps": len(log),
        "initial_eval": log.initial_eval.total,
        "final_eval": log.final_eval.total,
        "initial_components": log.initial_eval.components,
        "final_components": log.final_eval.components,
        "region": log.region,
    }


def cmd_train_demo(args) -> int:
    from wavemask.models import save_checkpoint
    from wavemask.training import train_flow, train_options, train_vae

    options = train_options(_train_overrides(args))
    if args.mode == "flow":
        model, log = train_flow(options)
    else:
        model, log = train_vae(options)

    os.makedirs(args.out_dir, exist_ok=True)
    log.to_csv(os.path.join(args.out_dir, "train_log.csv"))
    save_checkpoint(model, args.out_dir, _recorded(options))
    _write_json(_summary(log), os.path.join(args.out_dir, "summary.json"))
    if args.plot:
        from wavemask.training.plotting import plot_train_log

        plot_train_log(log, args.plot)
    logger.info("Training log and checkpoint written to %s", args.out_dir)
    return EXIT_OK


def _load_velocity_net(directory):
    from wavemask.models import VelocityNet, load_checkpoint

    model, recorded = load_checkpoint(directory)
    if not isinstance(model, VelocityNet):
        raise InvalidArgumentError(f"The checkpoint in {directory} holds a {model.kind} model, not a velocity network.")
    options = {k: RECORDED_OPTIONS[k](v) for k, v in recorded.items() if k in RECORDED_OPTIONS}
    return model, options


def cmd_region_report(args) -> int:
    from wavemask.state import merge_dicts
    from wavemask.tensor import Rng
    from wavemask.training import demo_dataset, region_report, train_options
    from wavemask.training.trainer import EVAL_STREAM, schedule_of

    net, recorded = _load_velocity_net(args.ckpt)
    options = train_options(merge_dicts(recorded, {"seed": args.seed, "T": args.T, "lower_bound": args.l}))
    rng = Rng(options.seed + EVAL_STREAM)
    report = region_report(net, demo_dataset(options), schedule_of(options), rng, draws=args.draws)
    _write_json(report, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    from wavemask.training import sample_to_directory

    net, recorded = _load_velocity_net(args.ckpt)
    size = args.size or recorded.get("image_size", config.getint("Training", "image_size"))
    shape = (net.channels, size, size)
    paths = sample_to_directory(net, args.n, shape, args.seed, args.out_dir, args.steps)
    logger.info("Wrote %d samples of shape %s", len(paths), shape)
    return EXIT_OK


def cmd_eval_freq(args) -> int:
    from wavemask.metrics import evaluate_dirs, make_wqs_config

    report = evaluate_dirs(args.gen, args.real, make_wqs_config(depth=args.depth), n_jobs=args.n_jobs)
    if args.out:
        report.to_json(args.out)
    else:
        _write_json(report._asdict(), None)
    return EXIT_OK


def cmd_ablate_bound(args) -> int:
    from wavemask.training import sweep_lower_bound, train_options

    options = train_options({"seed": args.seed, "steps": args.steps, "T": args.T, "learning_rate": args.lr})
    results = sweep_lower_bound(options, bounds=args.bounds)
    _write_json(results, args.out)
    return EXIT_OK


def cmd_ablate_components(args) -> int:
    from wavemask.training import ablate_components

    options = {"seed": args.seed, "steps": args.steps, "T": args.T, "learning_rate": args.lr,
               "sample_steps": args.sample_steps}
    results = ablate_components(options, samples=args.n)
    _write_json(results, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavemask",
        description="Wavelet saliency masks, masked flow matching and frequency-aware metrics. "
        "Tensors are LWT1 files (.lwt); images are binary PGM (.pgm) or PPM (.ppm).",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress messages")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("version", help="print the version")
    p.set_defaults(func=cmd_version)

    p = sub.add_parser("dwt", help="multi-level Haar decomposition of a tensor or image")
    p.add_argument("--in", dest="input", required=True, help="input .lwt, .pgm or .ppm file")
    p.add_argument("--depth", type=int, default=1, help="number of levels (default 1)")
    p.add_argument("--out-dir", required=True, help="directory for ll.lwt and l<level>_<band>.lwt")
    p.set_defaults(func=cmd_dwt)

    p = sub.add_parser("idwt", help="rebuild a tensor from the files written by dwt")
    p.add_argument("--in-dir", required=True, help="directory written by dwt")
    p.add_argument("--depth", type=int, default=1, help="number of levels (default 1)")
    p.add_argument("--out", required=True, help="output .lwt, .pgm or .ppm file")
    p.set_defaults(func=cmd_idwt)

    p = sub.add_parser("saliency", help="wavelet energy saliency map of a latent")
    p.add_argument("--in", dest="input", required=True, help="latent .lwt file, C x H x W")
    p.add_argument("--out", required=True, help="saliency map .lwt file, H x W")
    p.add_argument("--png", help="also write the map as an 8-bit PGM image")
    p.add_argument("--epsilon", type=float, help="normalisation guard (default from the configuration)")
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("mask", help="binary supervision mask of a saliency map at one timestep")
    p.add_argument("--saliency", required=True, help="saliency map .lwt file")
    p.add_argument("--T", type=int, help="number of timesteps (default 1000)")
    p.add_argument("--l", type=float, help="lower bound in [0, 1] (default 0.3)")
    when = p.add_mutually_exclusive_group(required=True)
    when.add_argument("--t", type=int, help="discrete timestep in 1..T")
    when.add_argument("--tau", type=float, help="continuous flow time in [0, 1]")
    p.add_argument("--out", required=True, help="mask .lwt file")
    p.add_argument("--png", help="also write the mask as an 8-bit PGM image")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("train-demo", help="train a toy model on the synthetic texture dataset")
    p.add_argument("--mode", choices=("flow", "vae"), default="flow")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--steps", type=int, help="number of SGD steps (default 2000)")
    p.add_argument("--l", type=float, help="masking lower bound (default 0.3)")
    p.add_argument("--T", type=int, help="number of timesteps (default 1000)")
    p.add_argument("--lr", type=float, help="learning rate (default 0.01)")
    p.add_argument("--no-mask", action="store_true", help="train on the unmasked flow matching loss")
    p.add_argument("--reduction", choices=("sum", "mean"))
    p.add_argument("--saliency-source", choices=("z0", "zt"))
    p.add_argument("--out-dir", required=True, help="directory for train_log.csv, summary.json and the checkpoint")
    p.add_argument("--plot", help="also plot the training curve to this image file")
    p.set_defaults(func=cmd_train_demo)

    p = sub.add_parser("region-report", help="per-region residuals of a trained velocity network")
    p.add_argument("--ckpt", required=True, help="checkpoint directory written by train-demo")
    p.add_argument("--seed", type=int, help="seed of the dataset (default: the training seed)")
    p.add_argument("--l", type=float, help="lower bound (default: the training value)")
    p.add_argument("--T", type=int, help="number of timesteps (default: the training value)")
    p.add_argument("--draws", type=int, default=4, help="noise draws per sample (default 4)")
    p.add_argument("--out", help="JSON report; standard output when absent")
    p.set_defaults(func=cmd_region_report)

    p = sub.add_parser("sample", help="draw samples from a trained velocity network")
    p.add_argument("--ckpt", required=True, help="checkpoint directory written by train-demo")
    p.add_argument("--n", type=int, default=8, help="number of samples (default 8)")
    p.add_argument("--steps", type=int, default=50, help="Euler steps (default 50)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--size", type=int, help="side length (default: the training size)")
    p.add_argument("--out-dir", required=True, help="directory for sample_0000.pgm, ...")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval-freq", help="frequency-aware metrics of generated against reference images")
    p.add_argument("--gen", required=True, help="directory of generated images")
    p.add_argument("--real", required=True, help="directory of reference images with the same names")
    p.add_argument("--depth", type=int, help="wavelet depth (default 3)")
    p.add_argument("--n-jobs", type=int, help="parallel workers (default 1)")
    p.add_argument("--out", help="JSON report; standard output when absent")
    p.set_defaults(func=cmd_eval_freq)

    p = sub.add_parser("ablate-bound", help="train one velocity network per masking lower bound")
    p.add_argument("--bounds", type=_bounds, default=[0.0, 0.1, 0.3, 0.5, 0.7],
                   help="comma separated lower bounds (default 0.0,0.1,0.3,0.5,0.7)")
    p.add_argument("--steps", type=int, help="number of SGD steps per bound (default 2000)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--T", type=int, help="number of timesteps (default 1000)")
    p.add_argument("--lr", type=float, help="learning rate (default 0.01)")
    p.add_argument("--out", help="JSON report; standard output when absent")
    p.set_defaults(func=cmd_ablate_bound)

    p = sub.add_parser("ablate-components",
                       help="two-stage runs with scale consistency off and on, each with masking off and on")
    p.add_argument("--steps", type=int, help="number of SGD steps of each stage (default 2000)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--T", type=int, help="number of timesteps (default 1000)")
    p.add_argument("--lr", type=float, help="learning rate (default 0.01)")
    p.add_argument("--n", type=int, default=4, help="generated images per run (default 4)")
    p.add_argument("--sample-steps", type=int, help="Euler steps per generated image (default 50)")
    p.add_argument("--out", help="JSON report; standard output when absent")
    p.set_defaults(func=cmd_ablate_components)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """ Runs one command.

    :param argv: arguments without the program name, sys.argv[1:] by default
    :return: the exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code in (0, None) else EXIT_USAGE

    _setup_logging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except (FormatError, OSError) as err:
        logger.error("%s", err)
        return EXIT_FORMAT
    except (InvalidArgumentError, UndefinedMetricError, TrainingDivergedError) as err:
        logger.error("%s", err)
        return EXIT_NUMERIC
