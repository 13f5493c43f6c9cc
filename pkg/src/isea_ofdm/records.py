"""Result records and their CSV encoding."""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np


@dataclass
class SweepRecord:
    """One Monte-Carlo measurement point for one detector."""

    detector: str
    constellation: str
    n_fft: int
    kappa: float
    beta_db: float
    snr_db: float
    dispersion: float
    frames: int
    symbols_total: int
    symbol_errors: int
    ser: float
    iter_mean: float | None = None
    iter_std: float | None = None
    iter_max: int | None = None
    converged_fraction: float | None = None
    frame_errors: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def ser_stderr(self) -> float:
        """Standard error of ``ser`` from the spread of per-frame error counts.

        Errors cluster within frames (a failed ISEA frame carries many), so the
        frame rather than the symbol is the independent unit.
        """
        if self.frame_errors is None or self.frames < 2:
            return math.nan
        per_frame = self.symbols_total / self.frames
        return float(np.std(self.frame_errors, ddof=1) / math.sqrt(self.frames) / per_frame)


SWEEP_COLUMNS = tuple(f.name for f in dataclasses.fields(SweepRecord) if f.name != "frame_errors")
_INT_FIELDS = {"n_fft", "frames", "symbols_total", "symbol_errors", "iter_max"}
_STR_FIELDS = {"detector", "constellation"}


@dataclass
class ThresholdRecord:
    """Noiseless ISEA statistics at one bias level."""

    kappa: float
    beta_db: float
    frames: int
    symbols_total: int
    ser0: float
    ser_alg: float
    symbol_errors: int
    p_a_analytic: float
    p_a_empirical: float
    iter_mean: float
    iter_std: float
    iter_max: int
    converged_fraction: float


@dataclass
class ScatterRow:
    detector: str
    kappa: float
    snr_db: float
    frame: int
    subcarrier: int
    soft_re: float
    soft_im: float


def _encode(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(path, rows: Iterable, columns: tuple[str, ...] | None = None) -> None:
    """Write dataclass rows as CSV with a single header line."""
    rows = list(rows)
    if columns is None:
        if not rows:
            raise ValueError("cannot infer CSV columns from zero rows")
        columns = tuple(f.name for f in dataclasses.fields(rows[0]) if f.name != "frame_errors")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_encode(getattr(row, c)) for c in columns])


def write_records(path, records: Iterable[SweepRecord]) -> None:
    write_rows(path, records, SWEEP_COLUMNS)


def _decode(name: str, text: str):
    if text == "":
        return None
    if name in _STR_FIELDS:
        return text
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def read_records(path) -> list[SweepRecord]:
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        return [SweepRecord(**{k: _decode(k, v) for k, v in row.items()}) for row in reader]
