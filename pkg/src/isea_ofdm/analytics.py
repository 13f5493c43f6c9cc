"""Closed-form absolute-value noise statistics, Q-function tools and bias design.

The analytic moments assume the biased samples are Gaussian with mean
``kappa * sigma_s`` and standard deviation ``sigma_s``; ``empirical_av_stats``
measures the same quantities on true OFDM frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from .constellation import build_constellation, draw_symbols
from .ofdm import hermitian_extend, ifft_real
from .seeding import Stream, frame_rng

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def q_func(x):
    """Standard Gaussian tail probability Q(x) = P(Z > x)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("q_func argument must be finite")
    out = 0.5 * erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def q_inv(p: float) -> float:
    """Inverse of ``q_func`` by bracketed root finding."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return brentq(lambda x: q_func(x) - p, -40.0, 40.0, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def folding_probability(kappa: float) -> float:
    """Probability that a biased sample is negative, Q(kappa)."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    return q_func(kappa)


def _check_domain(kappa, sigma_s):
    if np.any(np.asarray(kappa) < 0) or not sigma_s > 0:
        raise ValueError("need kappa >= 0 and sigma_s > 0")


def av_mean(kappa, sigma_s: float = 1.0):
    """E[n_a] = 2 sigma_s [phi(kappa) - kappa Q(kappa)]."""
    _check_domain(kappa, sigma_s)
    k = np.asarray(kappa, dtype=float)
    out = 2 * sigma_s * (_INV_SQRT_2PI * np.exp(-(k**2) / 2) - k * q_func(k))
    return float(out) if np.ndim(out) == 0 else out


def av_power(kappa, sigma_s: float = 1.0):
    """E[n_a^2] = 4 sigma_s^2 [(1 + kappa^2) Q(kappa) - kappa phi(kappa)]."""
    _check_domain(kappa, sigma_s)
    k = np.asarray(kappa, dtype=float)
    out = 4 * sigma_s**2 * ((1 + k**2) * q_func(k) - k * _INV_SQRT_2PI * np.exp(-(k**2) / 2))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AvNoiseStats:
    kappa: float
    p_a: float
    mean: float
    power: float

    @property
    def rms(self) -> float:
        return math.sqrt(self.power)


def av_noise_stats(kappa: float, sigma_s: float = 1.0) -> AvNoiseStats:
    return AvNoiseStats(kappa, folding_probability(kappa), av_mean(kappa, sigma_s), av_power(kappa, sigma_s))


def min_bias(p_th: float, sigma_s: float = 1.0) -> float:
    """Smallest DC bias keeping the folding probability below ``p_th``."""
    if not 0.0 < p_th < 0.5:
        raise ValueError(f"p_th must lie in (0, 0.5), got {p_th}")
    return sigma_s * q_inv(p_th)


@dataclass(frozen=True)
class AvNoiseRow:
    kappa: float
    p_a_analytic: float
    p_a_empirical: float
    mean_analytic: float
    mean_empirical: float
    rms_analytic: float
    rms_empirical: float


AV_NOISE_COLUMNS = tuple(AvNoiseRow.__dataclass_fields__)


def empirical_av_stats(
    kappas,
    frames: int,
    *,
    n_fft: int = 1024,
    constellation: str = "qpsk",
    seed: int = 0,
    sigma_s: float = 1.0,
) -> list[AvNoiseRow]:
    """Monte-Carlo mean, RMS and folding rate of the AV noise on real OFDM frames."""
    kappas = list(kappas)
    if not kappas:
        raise ValueError("kappa grid is empty")
    if frames < 1:
        raise ValueError("frames must be >= 1")
    spec = build_constellation(constellation, n_fft)
    payloads = np.stack(
        [draw_symbols(spec, n_fft // 2 - 1, frame_rng(seed, i, Stream.PAYLOAD)) for i in range(frames)]
    )
    s = sigma_s * ifft_real(hermitian_extend(payloads))
    rows = []
    for kappa in kappas:
        sb = s + kappa * sigma_s
        na = np.abs(sb) - sb
        rows.append(
            AvNoiseRow(
                kappa=float(kappa),
                p_a_analytic=folding_probability(kappa),
                p_a_empirical=float(np.mean(sb < 0)),
                mean_analytic=av_mean(kappa, sigma_s),
                mean_empirical=float(na.mean()),
                rms_analytic=math.sqrt(av_power(kappa, sigma_s)),
                rms_empirical=float(np.sqrt(np.mean(na**2))),
            )
        )
    return rows
