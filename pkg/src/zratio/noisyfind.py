"""Noisy binary search for the excited-probability crossing index.

The monotone statistic is p_j = Pr[H(X) >= 1] for X ~ pi at the j-th
schedule temperature; it is non-increasing in j because it equals
1 - c_0/Z(beta_j).  Given a band [tau - eps, tau + eps], the search returns
an index j in {0, .., l} such that, with probability at least 1 - delta:

* j = 0    implies p_1 <= tau + eps,
* 0 < j < l implies p_j >= tau - eps and p_{j+1} <= tau + eps,
* j = l    implies p_l >= tau - eps.

Each probe compares an empirical mean of 1[H >= 1] against tau on a batch
of s samples, with s sized by Hoeffding so that a single probe lands on the
wrong side of tau while the true p_j is outside the band with probability
at most delta / P, P being the number of probes.  The search always makes
exactly P = ceil(log2 l) + 1 probes: it bisects a virtual index range of
size 2^P, clamping virtual positions beyond l onto l (repeated probes of a
temperature consume fresh, disjoint sample slices, so every probe keeps its
own Hoeffding budget).  A fixed probe count is what lets the whole search
ride on one precomputed oracle round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import ceil_log2
from .oracles import OracleRequest, SamplingOracle
from .schedule import CoolingSchedule

PHASE_NOISYFIND = "noisyfind"


@dataclass(frozen=True)
class NoisyFindConfig:
    tau: float = 0.5
    eps: float = 0.25
    delta: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if not 0.0 < self.eps < min(self.tau, 1.0 - self.tau):
            raise ValueError("eps must keep the band inside (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


def probe_count(l: int) -> int:
    """ceil(log2 l) + 1 probes cover all l + 1 outcomes."""
    if l < 1:
        raise ValueError("schedules have at least one temperature")
    return ceil_log2(l) + 1


def batch_size(l: int, config: NoisyFindConfig) -> int:
    """Hoeffding batch: a union bound over all probes at slack eps."""
    p = probe_count(l)
    return math.ceil(math.log(2.0 * p / config.delta)
                     / (2.0 * config.eps ** 2))


def precompute_requests(schedule: CoolingSchedule, config: NoisyFindConfig,
                        *, phase: str = PHASE_NOISYFIND) -> list:
    """One request per temperature, sized for every probe the search could
    spend there; lets the search run against a single prefetched round."""
    l = len(schedule)
    total = batch_size(l, config) * probe_count(l)
    return [OracleRequest(temp_index=i, count=total, phase=phase)
            for i in range(l)]


def noisy_find(schedule: CoolingSchedule, oracle: SamplingOracle,
               config: NoisyFindConfig, *, batches=None,
               phase: str = PHASE_NOISYFIND) -> int:
    """Locate the band crossing of p_j; see the module docstring.

    ``batches`` (mapping temperature index -> H array from
    ``precompute_requests``) switches to eager mode: the search touches no
    oracle and only consumes slices.  Without it each probe issues its own
    single-request round (lazy mode, exactly ``probe_count(l)`` rounds).
    """
    l = len(schedule)
    p = probe_count(l)
    s = batch_size(l, config)

    lo, hi = 0, 1 << p
    probe = 0
    while hi - lo > 1:
        virtual = (lo + hi) // 2
        idx = min(virtual, l)  # 1-based temperature index
        if batches is not None:
            window = batches[idx - 1][probe * s:(probe + 1) * s]
            if len(window) < s:
                raise ValueError("prefetched batch too small for probe")
        else:
            req = OracleRequest(temp_index=idx - 1, count=s, phase=phase,
                                offset=probe * s)
            window = oracle.request_round([req])[0].hamiltonian_values
        excited = float(np.mean(window >= 1))
        if excited >= config.tau:
            lo = virtual
        else:
            hi = virtual
        probe += 1
    return min(lo, l)
