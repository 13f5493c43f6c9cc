"""Deterministic Monte-Carlo experiments: SER sweeps, thresholds, iteration stats.

Each frame is generated once from its own seeded streams and then pushed
through every sweep point and every selected detector, so detectors and
points are compared on identical payloads and noise. Per-frame outcomes are
reassembled in frame order, which makes results independent of ``workers``.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytics import folding_probability
from .channel import apply_dispersion, awgn, snr_to_sigma_v
from .constellation import ConstellationKind, ConstellationSpec, build_constellation, draw_symbols
from .detectors import (
    DEFAULT_MAX_ITER,
    DEFAULT_SLM_CANDIDATES,
    DETECTORS,
    clipping_detect,
    isea_detect,
    lower_bound_detect,
    slm_detect,
    slm_select,
)
from .frontend import BiasSpec, absval, add_bias, bias_index_db, clip
from .ofdm import RealSignal, assemble_frame, check_n_fft, modulate
from .records import ScatterRow, SweepRecord, ThresholdRecord
from .seeding import Stream, frame_rng, frame_seed

log = logging.getLogger(__name__)

KAPPA_STEP = 0.05


@dataclass
class SimConfig:
    n_fft: int = 1024
    constellation: str = "qpsk"
    kappa: list[float] = field(default_factory=lambda: [1.2])
    snr_db: list[float] = field(default_factory=lambda: [math.inf])
    dispersion: list[float] = field(default_factory=lambda: [0.0])
    frames: int = 2000
    detectors: list[str] = field(default_factory=lambda: list(DETECTORS))
    seed: int = 0
    max_iter: int = DEFAULT_MAX_ITER
    slm_candidates: int = DEFAULT_SLM_CANDIDATES
    workers: int = 1

    def __post_init__(self):
        self.kappa = [float(k) for k in np.atleast_1d(self.kappa)]
        self.snr_db = [float(s) for s in np.atleast_1d(self.snr_db)]
        self.dispersion = [float(d) for d in np.atleast_1d(self.dispersion)]
        self.detectors = list(self.detectors)
        self.validate()

    def validate(self) -> None:
        check_n_fft(self.n_fft)
        ConstellationKind(self.constellation)
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        for name in ("kappa", "snr_db", "dispersion", "detectors"):
            if not getattr(self, name):
                raise ValueError(f"{name} sweep is empty")
        if any(not math.isfinite(k) or k < 0 for k in self.kappa):
            raise ValueError("kappa values must be finite and non-negative")
        if any(math.isnan(s) for s in self.snr_db):
            raise ValueError("snr_db values must not be NaN")
        if any(not math.isfinite(d) or d < 0 for d in self.dispersion):
            raise ValueError("dispersion values must be finite and non-negative")
        unknown = set(self.detectors) - set(DETECTORS)
        if unknown:
            raise ValueError(f"unknown detectors: {sorted(unknown)}")
        if self.max_iter < 2:
            raise ValueError("max_iter must be >= 2")
        if self.slm_candidates < 1:
            raise ValueError("slm_candidates must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def replace(self, **changes) -> SimConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> SimConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @property
    def payload_size(self) -> int:
        return self.n_fft // 2 - 1


@dataclass(frozen=True)
class SweepPoint:
    kappa: float
    snr_db: float = math.inf
    dispersion: float = 0.0


def sweep_points(config: SimConfig) -> list[SweepPoint]:
    return [SweepPoint(k, s, d) for k, s, d in itertools.product(config.kappa, config.snr_db, config.dispersion)]


@dataclass
class FrameOutcome:
    errors: int
    iterations: int
    converged: bool
    first_errors: int | None = None


@dataclass
class _Frame:
    """Everything about one frame that does not depend on the sweep point."""

    payload: np.ndarray
    s: RealSignal
    slm_s: RealSignal | None
    slm_side: object
    noise_seed: np.random.SeedSequence


def _prepare_frame(config: SimConfig, spec: ConstellationSpec, frame_index: int) -> _Frame:
    payload = draw_symbols(spec, config.payload_size, frame_rng(config.seed, frame_index, Stream.PAYLOAD))
    frame = assemble_frame(payload, config.n_fft)
    s = modulate(frame)
    slm_s = side = None
    if "slm" in config.detectors:
        rng = frame_rng(config.seed, frame_index, Stream.SLM)
        slm_frame, side = slm_select(frame, config.slm_candidates, rng)
        slm_s = modulate(slm_frame)
    return _Frame(payload, s, slm_s, side, frame_seed(config.seed, frame_index, Stream.NOISE))


def _detect(config, spec, fr: _Frame, point: SweepPoint, detector: str):
    bias = BiasSpec(point.kappa)
    sigma_v = snr_to_sigma_v(point.snr_db)
    noise_rng = np.random.default_rng(fr.noise_seed)
    if detector == "lower-bound":
        x = apply_dispersion(fr.s, point.dispersion)
        return lower_bound_detect(x, sigma_v, spec, noise_rng)
    if detector == "isea":
        x = absval(add_bias(fr.s, bias))
    elif detector == "clipping":
        x = clip(add_bias(fr.s, bias))
    else:
        x = clip(add_bias(fr.slm_s, bias))
    y = awgn(apply_dispersion(x, point.dispersion), sigma_v, noise_rng)
    if detector == "isea":
        return isea_detect(y, bias, spec, config.max_iter)
    if detector == "clipping":
        return clipping_detect(y, bias, spec)
    return slm_detect(y, fr.slm_side, bias, spec)


def _outcome(result, payload) -> FrameOutcome:
    first = None if result.first_pass is None else int(np.count_nonzero(result.first_pass != payload))
    return FrameOutcome(int(np.count_nonzero(result.payload != payload)), result.iterations, result.converged, first)


def run_frame(config: SimConfig, point: SweepPoint, frame_index: int) -> dict[str, FrameOutcome]:
    """Run one frame through every configured detector at one sweep point."""
    spec = build_constellation(config.constellation, config.n_fft)
    fr = _prepare_frame(config, spec, frame_index)
    return {d: _outcome(_detect(config, spec, fr, point, d), fr.payload) for d in config.detectors}


# Field order of the per-frame arrays returned by the chunk worker.
_FIELDS = ("errors", "iterations", "converged", "first_errors", "folded")


def _run_chunk(config: SimConfig, points: list[SweepPoint], start: int, stop: int) -> np.ndarray:
    spec = build_constellation(config.constellation, config.n_fft)
    out = np.zeros((len(points), len(config.detectors), len(_FIELDS), stop - start), dtype=np.int64)
    for j, frame_index in enumerate(range(start, stop)):
        fr = _prepare_frame(config, spec, frame_index)
        for p, point in enumerate(points):
            folded = int(np.count_nonzero(fr.s.samples + point.kappa < 0))
            for d, det in enumerate(config.detectors):
                o = _outcome(_detect(config, spec, fr, point, det), fr.payload)
                first = o.errors if o.first_errors is None else o.first_errors
                out[p, d, :, j] = (o.errors, o.iterations, o.converged, first, folded)
    return out


def _run_frames(config: SimConfig, points: list[SweepPoint]) -> np.ndarray:
    """Per-frame outcomes shaped (point, detector, field, frame)."""
    log.info("running %d frames x %d points: %s", config.frames, len(points), config.to_dict())
    if config.workers == 1:
        return _run_chunk(config, points, 0, config.frames)
    n_chunks = min(config.frames, 4 * config.workers)
    bounds = np.linspace(0, config.frames, n_chunks + 1).astype(int)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        parts = list(
            pool.map(_run_chunk, itertools.repeat(config), itertools.repeat(points), bounds[:-1], bounds[1:])
        )
    return np.concatenate(parts, axis=-1)


def _records(config: SimConfig, points, raw: np.ndarray) -> list[SweepRecord]:
    records = []
    total = config.frames * config.payload_size
    for p, point in enumerate(points):
        for d, det in enumerate(config.detectors):
            errors, iterations, converged = raw[p, d, 0], raw[p, d, 1], raw[p, d, 2]
            n_err = int(errors.sum())
            rec = SweepRecord(
                detector=det,
                constellation=config.constellation,
                n_fft=config.n_fft,
                kappa=point.kappa,
                beta_db=bias_index_db(point.kappa),
                snr_db=point.snr_db,
                dispersion=point.dispersion,
                frames=config.frames,
                symbols_total=total,
                symbol_errors=n_err,
                ser=n_err / total,
                frame_errors=errors.copy(),
            )
            if det == "isea":
                rec.iter_mean = float(iterations.mean())
                rec.iter_std = float(iterations.std())
                rec.iter_max = int(iterations.max())
                rec.converged_fraction = float(converged.mean())
            records.append(rec)
    return records


def run_sweep(config: SimConfig) -> list[SweepRecord]:
    """Every (kappa, snr, dispersion) point for every detector, in point order."""
    config.validate()
    points = sweep_points(config)
    return _records(config, points, _run_frames(config, points))


def _require_single(config: SimConfig, *names: str) -> None:
    for name in names:
        if len(getattr(config, name)) != 1:
            raise ValueError(f"this experiment needs a single {name} value")


def run_ser_vs_snr(config: SimConfig) -> list[SweepRecord]:
    _require_single(config, "kappa", "dispersion")
    return run_sweep(config)


def run_ser_vs_kappa(config: SimConfig) -> list[SweepRecord]:
    _require_single(config, "snr_db", "dispersion")
    return run_sweep(config)


def run_dispersion_sweep(config: SimConfig) -> list[SweepRecord]:
    _require_single(config, "kappa", "snr_db")
    return run_sweep(config)


def run_iteration_stats(config: SimConfig) -> list[SweepRecord]:
    """Noiseless ISEA iteration statistics across the kappa grid."""
    return run_sweep(config.replace(detectors=["isea"], snr_db=[math.inf], dispersion=[0.0]))


@dataclass
class ThresholdResult:
    records: list[ThresholdRecord]
    kappa_threshold: float | None
    p_th: float | None


def run_noiseless_threshold(config: SimConfig) -> ThresholdResult:
    """Sweep kappa without noise and locate the error-free ISEA region.

    The threshold is the smallest grid kappa from which every larger grid
    point has zero ISEA symbol errors; ``p_th`` is Q(threshold).
    """
    config = config.replace(
        kappa=sorted(config.kappa), detectors=["isea"], snr_db=[math.inf], dispersion=[0.0]
    )
    points = sweep_points(config)
    raw = _run_frames(config, points)
    total = config.frames * config.payload_size
    samples = config.frames * config.n_fft
    records = []
    for p, point in enumerate(points):
        errors, iterations, converged, first, folded = raw[p, 0]
        records.append(
            ThresholdRecord(
                kappa=point.kappa,
                beta_db=bias_index_db(point.kappa),
                frames=config.frames,
                symbols_total=total,
                ser0=int(first.sum()) / total,
                ser_alg=int(errors.sum()) / total,
                symbol_errors=int(errors.sum()),
                p_a_analytic=folding_probability(point.kappa),
                p_a_empirical=int(folded.sum()) / samples,
                iter_mean=float(iterations.mean()),
                iter_std=float(iterations.std()),
                iter_max=int(iterations.max()),
                converged_fraction=float(converged.mean()),
            )
        )
    threshold = None
    for rec in reversed(records):
        if rec.symbol_errors:
            break
        threshold = rec.kappa
    p_th = None if threshold is None else folding_probability(threshold)
    return ThresholdResult(records, threshold, p_th)


def dump_constellation_scatter(config: SimConfig) -> list[ScatterRow]:
    """Pre-slicer soft estimates for every frame, point and detector."""
    config.validate()
    spec = build_constellation(config.constellation, config.n_fft)
    rows = []
    for frame_index in range(config.frames):
        fr = _prepare_frame(config, spec, frame_index)
        for point in sweep_points(config):
            for det in config.detectors:
                soft = _detect(config, spec, fr, point, det).soft
                rows.extend(
                    ScatterRow(det, point.kappa, point.snr_db, frame_index, k + 1, float(v.real), float(v.imag))
                    for k, v in enumerate(soft)
                )
    return rows


def snr_at_ser(snr_db, ser, target: float = 1e-3) -> float:
    """SNR where a SER curve first drops to ``target``, interpolated in log10(SER).

    Returns NaN when the curve never crosses the target on the grid.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    ser = np.asarray(ser, dtype=float)
    order = np.argsort(snr_db)
    snr_db, ser = snr_db[order], ser[order]
    for j in range(1, len(ser)):
        if ser[j - 1] > target >= ser[j]:
            lo = math.log10(ser[j - 1])
            hi = math.log10(max(ser[j], 1e-300))
            frac = (math.log10(target) - lo) / (hi - lo)
            return float(snr_db[j - 1] + frac * (snr_db[j] - snr_db[j - 1]))
    return math.nan


def detector_curve(records: list[SweepRecord], detector: str, axis: str) -> tuple[np.ndarray, np.ndarray]:
    """(x, ser) arrays for one detector along ``axis`` (a SweepRecord field)."""
    rows = sorted((r for r in records if r.detector == detector), key=lambda r: getattr(r, axis))
    return np.array([getattr(r, axis) for r in rows]), np.array([r.ser for r in rows])


def kappa_grid(start: float, stop: float, step: float = KAPPA_STEP) -> list[float]:
    n = int(round((stop - start) / step))
    return [round(start + i * step, 10) for i in range(n + 1)]

