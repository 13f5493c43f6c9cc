"""Per-frame random streams derived from a master seed.

Every frame owns independent streams for its payload, its SLM phase draws and
its channel noise. They depend only on ``(master seed, frame index, stream)``,
so a frame is reproducible on its own and results do not depend on how frames
are split across workers. Every sweep point reuses the same frames and noise
realizations (common random numbers).
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    PAYLOAD = 0
    SLM = 1
    NOISE = 2


def frame_seed(master_seed: int, frame_index: int, stream: Stream) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(frame_index), int(stream)))


def frame_rng(master_seed: int, frame_index: int, stream: Stream) -> np.random.Generator:
    return np.random.default_rng(frame_seed(master_seed, frame_index, stream))
