"""Hermitian frame assembly, unitary IFFT/FFT (de)modulation and PAPR."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

HERMITIAN_TOL = 1e-12
REAL_RESIDUE_TOL = 1e-10


def check_n_fft(n_fft: int) -> int:
    """Validate an FFT size: a power of two, at least 8."""
    n = int(n_fft)
    if n != n_fft or n < 8 or n & (n - 1):
        raise ValueError(f"n_fft must be a power of two >= 8, got {n_fft!r}")
    return n


class SignalRole(str, Enum):
    RAW = "raw"
    BIASED = "biased"
    CLIPPED = "clipped"
    ABSOLUTE = "absolute"
    RECEIVED = "received"


@dataclass(frozen=True)
class RealSignal:
    """One frame of real time-domain samples tagged with its place in the chain."""

    samples: np.ndarray
    role: SignalRole = SignalRole.RAW
    kappa: float = 0.0
    sigma_s: float = 1.0

    @property
    def n_fft(self) -> int:
        return len(self.samples)

    def require(self, *roles: SignalRole) -> None:
        if self.role not in roles:
            allowed = ", ".join(r.value for r in roles)
            raise ValueError(f"expected a signal with role in ({allowed}), got {self.role.value}")

    def replace(self, samples: np.ndarray, role: SignalRole | None = None) -> RealSignal:
        return RealSignal(samples, self.role if role is None else role, self.kappa, self.sigma_s)


@dataclass(frozen=True)
class OfdmFrame:
    """Length-N subcarrier vector. Hard frames are Hermitian with empty DC/Nyquist."""

    theta: np.ndarray

    @property
    def n_fft(self) -> int:
        return len(self.theta)

    @property
    def payload(self) -> np.ndarray:
        return self.theta[1 : self.n_fft // 2]


def hermitian_extend(payload: np.ndarray) -> np.ndarray:
    """Place ``payload`` on k = 1..N/2-1 and mirror it; works on stacked rows."""
    payload = np.asarray(payload)
    half = payload.shape[-1]
    n = 2 * (half + 1)
    theta = np.zeros(payload.shape[:-1] + (n,), dtype=complex)
    theta[..., 1 : n // 2] = payload
    theta[..., n // 2 + 1 :] = np.conj(payload[..., ::-1])
    return theta


def assemble_frame(payload, n_fft: int) -> OfdmFrame:
    check_n_fft(n_fft)
    payload = np.asarray(payload, dtype=complex)
    if payload.shape != (n_fft // 2 - 1,):
        raise ValueError(f"payload must have length {n_fft // 2 - 1}, got {payload.shape}")
    return OfdmFrame(hermitian_extend(payload))


def extract_payload(frame: OfdmFrame) -> np.ndarray:
    return frame.payload.copy()


def is_hermitian(theta: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    mirrored = np.conj(np.roll(theta[::-1], 1))
    scale = max(1.0, float(np.max(np.abs(theta), initial=0.0)))
    return bool(np.max(np.abs(theta - mirrored), initial=0.0) <= tol * scale)


def ifft_real(theta: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT of Hermitian rows, returning the real part (no checks)."""
    return np.fft.ifft(theta, norm="ortho").real


def fft_unitary(samples: np.ndarray) -> np.ndarray:
    return np.fft.fft(samples, norm="ortho")


def modulate(frame: OfdmFrame, sigma_s: float = 1.0) -> RealSignal:
    """s[n] = N^-1/2 sum_k theta_k exp(j 2 pi k n / N), kept as a real signal."""
    theta = frame.theta
    if not is_hermitian(theta):
        raise ValueError("frame is not Hermitian-symmetric")
    full = np.fft.ifft(theta, norm="ortho")
    peak = np.max(np.abs(full.real), initial=0.0)
    if np.max(np.abs(full.imag), initial=0.0) > REAL_RESIDUE_TOL * max(peak, 1.0):
        raise ValueError("inverse transform is not real")
    return RealSignal(full.real, SignalRole.RAW, 0.0, sigma_s)


def demodulate(signal: RealSignal) -> OfdmFrame:
    """Forward unitary DFT. The result is a soft frame."""
    return OfdmFrame(fft_unitary(np.asarray(signal.samples, dtype=float)))


def papr(signal: RealSignal | np.ndarray) -> float:
    """Peak-to-average power ratio in dB."""
    x = np.asarray(getattr(signal, "samples", signal), dtype=float)
    power = x**2
    mean = power.mean()
    if mean == 0:
        raise ValueError("PAPR of an all-zero signal is undefined")
    return float(10 * np.log10(power.max() / mean))
