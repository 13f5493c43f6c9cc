"""Receivers: iterative sign estimation, clipping DCO-OFDM, SLM and the AWGN bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import awgn
from .constellation import ConstellationSpec
from .frontend import BiasSpec, sign_vector
from .ofdm import OfdmFrame, RealSignal, SignalRole, fft_unitary, hermitian_extend, ifft_real

DETECTORS = ("isea", "clipping", "slm", "lower-bound")
DEFAULT_MAX_ITER = 50
DEFAULT_SLM_CANDIDATES = 128


@dataclass
class DetectionResult:
    """Hard decisions plus the bookkeeping needed by the harness.

    ``soft`` holds the pre-slicer payload estimates of the final pass and
    ``first_pass`` the hard payload of the first ISEA pass (ISEA only).
    """

    hard_frame: OfdmFrame
    iterations: int
    converged: bool
    soft: np.ndarray
    final_signs: np.ndarray | None = None
    first_pass: np.ndarray | None = None

    @property
    def payload(self) -> np.ndarray:
        return self.hard_frame.payload


@dataclass(frozen=True)
class SlmSideInfo:
    phase_vector: np.ndarray
    index: int


def _check_length(y: RealSignal, spec_len: int | None = None):
    n = y.n_fft
    if n < 8 or n & (n - 1):
        raise ValueError(f"signal length must be a power of two >= 8, got {n}")
    if spec_len is not None and n != spec_len:
        raise ValueError(f"length mismatch: {n} != {spec_len}")


def _hard(spec: ConstellationSpec, soft: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = spec.indices(soft)
    return idx, spec.points[idx]


def isea_detect(
    y: RealSignal,
    bias: BiasSpec,
    spec: ConstellationSpec,
    max_iter: int = DEFAULT_MAX_ITER,
    initial_signs: np.ndarray | None = None,
) -> DetectionResult:
    """Recover symbols from folded samples by iterating over sign estimates.

    Each pass undoes the fold with the current signs and removes the bias,
    slices the payload subcarriers of the FFT, and stops when the hard
    decisions repeat. Otherwise new signs come from the Hermitian IFFT of
    the hard frame plus the bias. The all-positive initial guess reproduces
    the algorithm; ``initial_signs`` exists for tests.

    ``iterations`` counts passes, so a correct initial guess converges in 2.
    """
    if max_iter < 2:
        raise ValueError("max_iter must be >= 2")
    _check_length(y)
    samples = np.asarray(y.samples, dtype=float)
    n = len(samples)
    b_dc = bias.b_dc
    z = np.ones(n) if initial_signs is None else np.asarray(initial_signs, dtype=float)
    if z.shape != (n,):
        raise ValueError("initial_signs length mismatch")

    prev_idx = None
    first_pass = None
    for it in range(1, max_iter + 1):
        soft = fft_unitary(z * samples - b_dc)[1 : n // 2]
        idx, hard = _hard(spec, soft)
        if first_pass is None:
            first_pass = hard
        if prev_idx is not None and np.array_equal(idx, prev_idx):
            return DetectionResult(OfdmFrame(hermitian_extend(hard)), it, True, soft, z, first_pass)
        prev_idx = idx
        if it == max_iter:
            break
        theta = hermitian_extend(hard)
        z = sign_vector(ifft_real(theta) + b_dc)
    return DetectionResult(OfdmFrame(hermitian_extend(hard)), max_iter, False, soft, z, first_pass)


def clipping_detect(y: RealSignal, bias: BiasSpec, spec: ConstellationSpec) -> DetectionResult:
    """Standard DCO-OFDM receiver: remove the bias, FFT, slice."""
    _check_length(y)
    n = y.n_fft
    soft = fft_unitary(y.samples - bias.b_dc)[1 : n // 2]
    _, hard = _hard(spec, soft)
    return DetectionResult(OfdmFrame(hermitian_extend(hard)), 1, True, soft)


def slm_phase_vectors(n_fft: int, n_candidates: int, rng: np.random.Generator) -> np.ndarray:
    """Candidate +-1 payload phase rows; row 0 is all ones."""
    if n_candidates < 1:
        raise ValueError("n_candidates must be >= 1")
    phases = np.ones((n_candidates, n_fft // 2 - 1))
    if n_candidates > 1:
        phases[1:] = rng.choice([-1.0, 1.0], size=(n_candidates - 1, n_fft // 2 - 1))
    return phases


def slm_select(
    frame: OfdmFrame, n_candidates: int = DEFAULT_SLM_CANDIDATES, rng: np.random.Generator | None = None
) -> tuple[OfdmFrame, SlmSideInfo]:
    """Pick the lowest-PAPR phase-rotated variant of ``frame``."""
    n = frame.n_fft
    if n_candidates > 1 and rng is None:
        raise ValueError("an rng is required for more than one SLM candidate")
    phases = hermitian_extend(slm_phase_vectors(n, n_candidates, rng)).real
    phases[:, 0] = phases[:, n // 2] = 1.0
    candidates = frame.theta * phases
    x = ifft_real(candidates)
    power = x**2
    ratio = power.max(axis=1) / power.mean(axis=1)
    best = int(np.argmin(ratio))
    return OfdmFrame(candidates[best]), SlmSideInfo(phases[best], best)


def slm_detect(y: RealSignal, side: SlmSideInfo, bias: BiasSpec, spec: ConstellationSpec) -> DetectionResult:
    """Clipping receiver followed by removal of the known SLM phase vector."""
    _check_length(y, len(side.phase_vector))
    n = y.n_fft
    soft = fft_unitary(y.samples - bias.b_dc)[1 : n // 2] * side.phase_vector[1 : n // 2]
    _, hard = _hard(spec, soft)
    return DetectionResult(OfdmFrame(hermitian_extend(hard)), 1, True, soft)


def lower_bound_detect(
    s: RealSignal, sigma_v: float, spec: ConstellationSpec, rng: np.random.Generator
) -> DetectionResult:
    """Detect on an unconstrained AWGN channel: no bias, no fold."""
    s.require(SignalRole.RAW)
    y = awgn(s, sigma_v, rng)
    n = y.n_fft
    soft = fft_unitary(y.samples)[1 : n // 2]
    _, hard = _hard(spec, soft)
    return DetectionResult(OfdmFrame(hermitian_extend(hard)), 1, True, soft)

