"""Counter-based random streams keyed by (seed, phase, temperature, offset).

Every batch of samples in the pipeline draws from a Philox generator whose
key is derived from the global seed plus a structural address: a phase tag
(which estimator role the samples serve), the schedule temperature index,
and the replicate offset of the batch.  Streams with distinct keys are
statistically independent, and a batch's content depends only on its key,
never on which worker produced it or in what order.  That is what makes
results bit-identical across worker counts.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _phase_words(phase: str) -> tuple[int, int]:
    # Stable across processes and platforms, unlike hash().
    digest = hashlib.sha256(phase.encode("utf-8")).digest()
    return (
        int.from_bytes(digest[0:4], "little"),
        int.from_bytes(digest[4:8], "little"),
    )


def stream(seed: int, phase: str, temp_index: int, offset: int) -> np.random.Generator:
    """Return the generator for one keyed batch of samples."""
    w0, w1 = _phase_words(phase)
    ss = np.random.SeedSequence(
        entropy=seed, spawn_key=(w0, w1, int(temp_index), int(offset))
    )
    return np.random.Generator(np.random.Philox(ss))
