"""AWGN measurement noise, SNR bookkeeping and the dispersion impairment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import RealSignal, SignalRole


@dataclass(frozen=True)
class ChannelSpec:
    sigma_v: float = 0.0
    normalized_dispersion: float = 0.0

    def __post_init__(self):
        if self.sigma_v < 0:
            raise ValueError("sigma_v must be non-negative")
        if self.normalized_dispersion < 0:
            raise ValueError("normalized dispersion must be non-negative")

    def snr_db(self, sigma_s: float = 1.0) -> float:
        return sigma_v_to_snr(self.sigma_v, sigma_s)


def snr_to_sigma_v(snr_db: float, sigma_s: float = 1.0) -> float:
    """Noise standard deviation for SNR = 10 log10(sigma_s^2 / sigma_v^2).

    ``snr_db = inf`` gives a noiseless channel.
    """
    if not sigma_s > 0:
        raise ValueError("sigma_s must be positive")
    return float(sigma_s * 10.0 ** (-snr_db / 20.0))


def sigma_v_to_snr(sigma_v: float, sigma_s: float = 1.0) -> float:
    if sigma_v == 0:
        return float("inf")
    return float(20.0 * np.log10(sigma_s / sigma_v))


def awgn(signal: RealSignal, sigma_v: float, rng: np.random.Generator) -> RealSignal:
    """Add i.i.d. zero-mean Gaussian noise of standard deviation ``sigma_v``.

    The rng is always advanced by one normal draw per sample, so a noiseless
    call consumes the stream the same way a noisy one does.
    """
    if sigma_v < 0:
        raise ValueError("sigma_v must be non-negative")
    noise = rng.standard_normal(signal.n_fft)
    if sigma_v == 0:
        return signal.replace(signal.samples.copy(), SignalRole.RECEIVED)
    return signal.replace(signal.samples + sigma_v * noise, SignalRole.RECEIVED)


def dispersion_response(n_fft: int, normalized_dispersion: float) -> np.ndarray:
    """All-pass quadratic-phase response on the DFT grid.

    The phase 2 pi^2 D (k/N)^2 is applied to positive frequencies and its
    conjugate to negative ones so the filter maps real signals to real signals.
    The Nyquist bin is left untouched.
    """
    if normalized_dispersion < 0:
        raise ValueError("normalized dispersion must be non-negative")
    k = np.fft.fftfreq(n_fft, 1.0 / n_fft)
    phase = np.sign(k) * 2 * np.pi**2 * normalized_dispersion * (k / n_fft) ** 2
    phase[n_fft // 2] = 0.0
    return np.exp(1j * phase)


def apply_dispersion(signal: RealSignal, normalized_dispersion: float) -> RealSignal:
    """Circularly filter one frame with the quadratic-phase dispersion response.

    Output keeps the raw role for unbiased input; anything else becomes a
    received-side waveform since the filter can undo non-negativity.
    """
    response = dispersion_response(signal.n_fft, normalized_dispersion)
    role = SignalRole.RAW if signal.role is SignalRole.RAW else SignalRole.RECEIVED
    if normalized_dispersion == 0:
        return signal.replace(signal.samples.copy(), role)
    out = np.fft.ifft(np.fft.fft(signal.samples) * response)
    if np.max(np.abs(out.imag)) > 1e-9 * max(1.0, np.max(np.abs(out.real))):
        raise ArithmeticError("dispersion filter produced a complex output")
    return signal.replace(out.real, role)
