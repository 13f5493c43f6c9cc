"""Symbol alphabets, uniform symbol drawing and the minimum-distance slicer."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ofdm import check_n_fft


class ConstellationKind(str, Enum):
    QPSK = "qpsk"
    PSK8 = "8psk"
    PSK16 = "16psk"
    QAM16 = "16qam"


def _gray(m: np.ndarray) -> np.ndarray:
    return m ^ (m >> 1)


def _unit_points(kind: ConstellationKind) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled points and their Gray bit labels, in alphabet-index order."""
    if kind is ConstellationKind.QPSK:
        # counter-clockwise from the first quadrant; labels 00, 01, 11, 10
        points = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
        return points, _gray(np.arange(4))
    if kind in (ConstellationKind.PSK8, ConstellationKind.PSK16):
        m = 8 if kind is ConstellationKind.PSK8 else 16
        idx = np.arange(m)
        return np.exp(2j * np.pi * idx / m), _gray(idx)
    levels = np.array([-3.0, -1.0, 1.0, 3.0])
    a, b = np.divmod(np.arange(16), 4)
    points = levels[a] + 1j * levels[b]
    return points, (_gray(a) << 2) | _gray(b)


@dataclass(frozen=True)
class ConstellationSpec:
    """An immutable symbol alphabet.

    ``points`` is scaled so that a Hermitian-symmetric OFDM frame of size
    ``n_fft`` carrying these symbols on its ``n_fft/2 - 1`` payload slots
    has unit time-domain variance.
    """

    kind: ConstellationKind
    points: np.ndarray
    per_symbol_energy: float
    gray_labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.gray_labels.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.size))

    @property
    def d_min(self) -> float:
        diff = np.abs(self.points[:, None] - self.points[None, :])
        return float(diff[~np.eye(self.size, dtype=bool)].min())

    def indices(self, soft) -> np.ndarray:
        """Alphabet index of the nearest point for every soft value.

        Ties go to the lowest index (``np.argmin`` returns the first minimum).
        """
        soft = np.asarray(soft, dtype=complex)
        if not np.all(np.isfinite(soft)):
            raise ValueError("soft estimates must be finite")
        dist = np.abs(soft[..., None] - self.points) ** 2
        return np.argmin(dist, axis=-1)

    def slice(self, soft):
        """Minimum Euclidean distance hard decision (scalar or array)."""
        hard = self.points[self.indices(soft)]
        if np.ndim(soft) == 0:
            return complex(hard)
        return hard


def build_constellation(kind: ConstellationKind | str, n_fft: int) -> ConstellationSpec:
    """Build the alphabet for ``kind`` normalized for an ``n_fft``-point frame.

    The mean symbol energy is ``n_fft / (n_fft - 2)``: only ``n_fft - 2`` of the
    ``n_fft`` subcarriers are loaded, so this makes the time-domain variance 1.
    """
    try:
        kind = ConstellationKind(kind)
    except ValueError:
        choices = ", ".join(k.value for k in ConstellationKind)
        raise ValueError(f"unsupported constellation {kind!r}; expected one of {choices}") from None
    check_n_fft(n_fft)
    points, labels = _unit_points(kind)
    energy = n_fft / (n_fft - 2)
    points = points * np.sqrt(energy / np.mean(np.abs(points) ** 2))
    return ConstellationSpec(
        kind=kind,
        points=points,
        per_symbol_energy=float(np.mean(np.abs(points) ** 2)),
        gray_labels=labels,
    )


def draw_symbols(spec: ConstellationSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. symbols uniformly over the alphabet."""
    if count < 1:
        raise ValueError("count must be positive")
    return spec.points[rng.integers(0, spec.size, size=count)]
