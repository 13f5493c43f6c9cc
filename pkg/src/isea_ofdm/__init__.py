"""Absolute-value DC-biased optical OFDM with iterative sign estimation."""

from .analytics import av_mean, av_power, folding_probability, min_bias, q_func, q_inv
from .channel import apply_dispersion, awgn, snr_to_sigma_v
from .constellation import ConstellationKind, ConstellationSpec, build_constellation, draw_symbols
from .detectors import clipping_detect, isea_detect, lower_bound_detect, slm_detect, slm_select
from .frontend import BiasSpec, absval, add_bias, clip, signs, simplified_transmit
from .harness import SimConfig, SweepPoint, run_frame, run_noiseless_threshold, run_sweep
from .ofdm import OfdmFrame, RealSignal, SignalRole, assemble_frame, demodulate, modulate, papr

__version__ = "0.1.0"
