"""Counter-based random streams.

Philox keyed by (seed, trial) gives every Monte-Carlo trial its own
statistically independent substream, reproducible regardless of how trials
are scheduled across threads.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, trial: int = 0) -> np.random.Generator:
    key = (int(seed) << 64) | int(trial)
    return np.random.Generator(np.random.Philox(key=key))
