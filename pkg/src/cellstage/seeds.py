"""Deterministic random-stream derivation.

Every random draw in the toolkit flows from one master seed through a
documented counter scheme, so that datasets, training runs, and whole
pipelines are reproducible bit for bit and parallel workers never share
a stream. A stream is addressed by ``(stream, index)``:

======================  =====================================================
stream                  index meaning
======================  =====================================================
STREAM_STAGE_LABELS     video number (0-based): stage-sequence sampling
STREAM_FEATURES         video number (0-based): feature-noise sampling
STREAM_SPLIT            always 0: dataset split shuffle
STREAM_PHASE_INIT       training phase (1 or 2): parameter initialization
STREAM_PHASE_SHUFFLE    training phase (1 or 2): epoch batch shuffling
======================  =====================================================

Repeated pipeline runs use consecutive master seeds (``seed + r`` for
repeat ``r``).
"""

from __future__ import annotations

import numpy as np

STREAM_STAGE_LABELS = 1
STREAM_FEATURES = 2
STREAM_SPLIT = 3
STREAM_PHASE_INIT = 4
STREAM_PHASE_SHUFFLE = 5


def derived_rng(master_seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Return the generator for ``(stream, index)`` under ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream, index))
    return np.random.default_rng(ss)
