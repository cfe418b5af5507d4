"""Rate-1/2 one-memory convolutional codes over GF(2^m) with QAM mapping."""

__version__ = "0.1.0"

from .capacity import capacity_curves, mutual_information, snr_gap_at_rate
from .channel import run_monte_carlo, snr_convert
from .code import CodeCoefficients, CodeError, Trellis, build_trellis, encode_frame
from .decoder import BranchMetrics, branch_metrics, max_log_map_decode
from .gf import FieldError, FieldSpec, build_field, default_field
from .mapping import Constellation, build_bpsk_image, build_qam
from .search import mapping_invariance_check, search_codes, search_space_counts
from .spectrum import DistanceSpectrum, compute_spectrum, verify_truncation

__all__ = [
    "BranchMetrics", "CodeCoefficients", "CodeError", "Constellation", "DistanceSpectrum",
    "FieldError", "FieldSpec", "Trellis", "branch_metrics", "build_bpsk_image", "build_field",
    "build_qam", "build_trellis", "capacity_curves", "compute_spectrum", "default_field",
    "encode_frame", "mapping_invariance_check", "max_log_map_decode", "mutual_information",
    "run_monte_carlo", "search_codes", "search_space_counts", "snr_convert", "snr_gap_at_rate",
    "verify_truncation",
]
