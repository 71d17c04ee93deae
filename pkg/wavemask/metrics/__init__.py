""" Frequency-aware evaluation: wavelet energy ratios and quality scores, multi-scale SSIM
and co-occurrence texture statistics.
"""
from .frequency import (
    WqsConfig,
    make_wqs_config,
    hlfr,
    rdr,
    hfe,
    hfei,
    total_energy,
    energy_audit,
    subband_scores,
    wqs,
)
from .ssim import ssim, ssim_maps, ms_ssim, ms_ssim_scales, SsimResult
from .glcm import GlcmStats, glcm_matrix, glcm_stats, quantize, offset_to_polar, DEFAULT_OFFSETS
from .evaluate import MetricReport, evaluate_pair, evaluate_dirs, match_files, average_reports
