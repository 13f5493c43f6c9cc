"""Transmitter front-end: DC bias, clipping, absolute value and sign extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import OfdmFrame, RealSignal, SignalRole, modulate


@dataclass(frozen=True)
class BiasSpec:
    """DC bias expressed as a multiple ``kappa`` of the signal standard deviation."""

    kappa: float
    sigma_s: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not self.sigma_s > 0:
            raise ValueError(f"sigma_s must be positive, got {self.sigma_s}")

    @property
    def b_dc(self) -> float:
        return self.kappa * self.sigma_s

    @property
    def beta_db(self) -> float:
        """Bias index: optical power overhead of the bias, in dB."""
        return bias_index_db(self.kappa)


def bias_index_db(kappa: float) -> float:
    return float(10 * np.log10(1 + kappa**2))


def add_bias(signal: RealSignal, bias: BiasSpec) -> RealSignal:
    signal.require(SignalRole.RAW)
    if not np.isclose(signal.sigma_s, bias.sigma_s):
        raise ValueError("bias sigma_s does not match the signal's sigma_s")
    return RealSignal(signal.samples + bias.b_dc, SignalRole.BIASED, bias.kappa, bias.sigma_s)


def clip(signal: RealSignal) -> RealSignal:
    """Zero every negative sample of a biased signal."""
    signal.require(SignalRole.BIASED)
    return signal.replace(np.maximum(signal.samples, 0.0), SignalRole.CLIPPED)


def absval(signal: RealSignal) -> RealSignal:
    """Fold negative samples of a biased signal to their magnitude."""
    signal.require(SignalRole.BIASED)
    return signal.replace(np.abs(signal.samples), SignalRole.ABSOLUTE)


def sign_vector(samples: np.ndarray) -> np.ndarray:
    # sgn(0) = +1
    return np.where(samples >= 0, 1.0, -1.0)


def signs(signal: RealSignal) -> np.ndarray:
    """Sign of each biased sample as a float array over {+1, -1}."""
    signal.require(SignalRole.BIASED)
    return sign_vector(signal.samples)


def clipping_noise(signal: RealSignal) -> RealSignal:
    """n_c = clip(s_B) - s_B: zero where s_B >= 0, -s_B elsewhere."""
    signal.require(SignalRole.BIASED)
    x = signal.samples
    return signal.replace(np.maximum(x, 0.0) - x)


def av_noise(signal: RealSignal) -> RealSignal:
    """n_a = |s_B| - s_B, exactly twice the clipping noise."""
    signal.require(SignalRole.BIASED)
    x = signal.samples
    return signal.replace(np.abs(x) - x)


def simplified_transmit(frame: OfdmFrame, bias: BiasSpec) -> RealSignal:
    """Digital-domain transmitter: |s[n] + B_DC| computed directly on the samples."""
    s = modulate(frame, bias.sigma_s).samples
    return RealSignal(np.abs(s + bias.b_dc), SignalRole.ABSOLUTE, bias.kappa, bias.sigma_s)
