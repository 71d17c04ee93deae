""" Training loops, the synthetic dataset, region diagnostics and sampling. """
from .datasets import SyntheticDataset, make_synthetic_dataset, quadrant_mask, as_dataset, check_dataset
from .trainer import (
    TrainLog,
    TrainRecord,
    default_train_options,
    train_options,
    demo_dataset,
    train_flow,
    train_vae,
    evaluate_flow,
    evaluate_vae,
    sweep_lower_bound,
    encode_dataset,
    ablate_components,
)
from .region_report import region_report
from .sampling import euler_sample, sample_to_directory
