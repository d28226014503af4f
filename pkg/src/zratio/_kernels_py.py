"""Pure-python (numpy) implementations of the hot kernels.

Drop-in replacements for the compiled extension in ``_kernels.pyx``: given
the same inputs they produce bit-identical outputs, just slower.  The
Glauber kernel vectorizes across chains and loops over steps; the
categorical sampler is ``np.searchsorted``.
"""

from __future__ import annotations

import numpy as np


def sample_categorical(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to level indices via the cumulative weights.

    Returns, for each u, the count of cdf entries <= u (upper-bound search),
    matching ``np.searchsorted(cdf, u, side="right")`` exactly.
    """
    return np.searchsorted(cdf, u, side="right").astype(np.int32)


def sample_alias(prob: np.ndarray, alias: np.ndarray,
                 u: np.ndarray) -> np.ndarray:
    """Walker alias sampling: one uniform per draw, O(1) per draw.

    Each u in [0, 1) is split into a column index floor(u * m) and a coin
    u * m - floor(u * m); the coin picks between the column and its alias.
    """
    x = u * len(prob)
    idx = x.astype(np.int32)
    frac = x - idx
    return np.where(frac < prob[idx], idx, alias[idx]).astype(np.int32)


def run_glauber_chains(indptr: np.ndarray, indices: np.ndarray,
                       degrees: np.ndarray, p_table: np.ndarray,
                       states: np.ndarray, vidx: np.ndarray,
                       u: np.ndarray) -> None:
    """Advance independent single-site chains in place.

    states : (chains, n) uint8, current configurations, updated in place
    vidx   : (chains, steps) int32, vertex picked at each step
    u      : (chains, steps) float64, uniform for each update
    p_table: (maxdeg+1, maxdeg+1) float64, occupation probability indexed by
             (degree of the vertex, number of occupied neighbours)

    Each step resamples the picked vertex from its conditional distribution:
    the new state is 1 iff u < p_table[deg, occupied_neighbours].
    """
    n = len(indptr) - 1
    chains, steps = vidx.shape
    maxdeg = int(degrees.max()) if n > 0 else 0

    # Padded neighbour matrix so one fancy-index gathers all neighbours.
    pad = np.zeros((n, maxdeg), dtype=np.int64)
    mask = np.zeros((n, maxdeg), dtype=np.uint8)
    for v in range(n):
        nb = indices[indptr[v]:indptr[v + 1]]
        pad[v, : len(nb)] = nb
        mask[v, : len(nb)] = 1

    rows = np.arange(chains)
    degrees = degrees.astype(np.int64)
    for t in range(steps):
        v = vidx[:, t]
        if maxdeg > 0:
            nb = pad[v]  # (chains, maxdeg)
            a1 = (states[rows[:, None], nb] * mask[v]).sum(axis=1)
        else:
            a1 = np.zeros(chains, dtype=np.int64)
        p = p_table[degrees[v], a1]
        states[rows, v] = (u[:, t] < p).astype(np.uint8)
