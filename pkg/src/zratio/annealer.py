"""The end-to-end ratio estimator.

Pipeline: build the refined non-adaptive schedule for (q_bar, h), truncate
it to [beta_min, beta_max], locate the excited-probability crossing with a
noisy binary search at (tau, eps, delta) = (0.5, 0.25, 0.01), then branch:

* crossing at the left end (j = 0): the whole range is nearly cold, a
  two-point product estimator with ceil(320 / eps^2) replicates suffices;
* crossing at the right end (j = L): the whole range is warm enough for the
  paired-product estimator on the full schedule, ceil(720 / eps^2);
* interior crossing: paired-product over the warm prefix (beta_1 .. beta_j)
  with ceil(12960 / eps^2) and a three-point product estimator over
  (beta_j, beta_{j+1}, beta_L) with ceil(4320 / eps^2), multiplied.

Those replicate constants are part of the guarantee: together with the
search's confidence they give P[(1 - eps) Q <= Q_hat <= (1 + eps) Q] >= 3/4,
which the median trick amplifies to any 1 - delta.

In eager mode every sample the search or either branch could possibly need
is requested in one non-adaptive oracle round and consumed as slices, so
``oracle_rounds`` is exactly 1.  Lazy mode spends one round per search
probe plus one estimator round: ceil(log2 L) + 2 rounds but far fewer
samples, since only the chosen branch is drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .core import CostMetrics, RatioEstimate, validate_beta
from .estimators import (PHASE_PE, PHASE_PPE_X, PHASE_PPE_Y, ceil_log2,
                         pe_combine, ppe_combine)
from .noisyfind import (PHASE_NOISYFIND, NoisyFindConfig, batch_size,
                        noisy_find, precompute_requests, probe_count)
from .oracles import OracleRequest
from .schedule import (CoolingSchedule, ScheduleParameters,
                       build_refined_schedule, truncate_schedule)

NF_TAU, NF_EPS, NF_DELTA = 0.5, 0.25, 0.01

PE_DIRECT_FACTOR = 320
PPE_FULL_FACTOR = 720
PPE_SPLIT_FACTOR = 12960
PE_SPLIT_FACTOR = 4320

MODE_EAGER = "eager"
MODE_LAZY = "lazy"


@dataclass(frozen=True)
class AnnealConfig:
    beta_min: float
    beta_max: float
    eps: float
    q_bar: float
    h: int
    mode: str = MODE_LAZY
    seed: int = 0
    boost_delta: float | None = None
    workers: int = 1

    def __post_init__(self):
        validate_beta(self.beta_min, name="beta_min")
        validate_beta(self.beta_max, name="beta_max")
        if not self.beta_min < self.beta_max:
            raise ValueError("beta_min must be < beta_max")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.h < 0:
            raise ValueError("h must be >= 0")
        if self.q_bar <= 0 or not math.isfinite(self.q_bar):
            raise ValueError("q_bar must be positive and finite")
        if self.mode not in (MODE_EAGER, MODE_LAZY):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.boost_delta is not None and not 0.0 < self.boost_delta < 1.0:
            raise ValueError("boost_delta must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def replicate_counts(eps: float) -> dict:
    inv = eps ** -2
    return {
        "pe_direct": math.ceil(PE_DIRECT_FACTOR * inv),
        "ppe_full": math.ceil(PPE_FULL_FACTOR * inv),
        "ppe_split": math.ceil(PPE_SPLIT_FACTOR * inv),
        "pe_split": math.ceil(PE_SPLIT_FACTOR * inv),
    }


def build_truncated_schedule(config: AnnealConfig) -> CoolingSchedule:
    """The refined schedule for (q_bar, h), restricted to the config range.

    h below 2 is padded and q_bar below 1 is clamped; both only tighten the
    schedule's gap guarantees.
    """
    params = ScheduleParameters(q_bar=max(config.q_bar, 1.0),
                                h=max(config.h, 2))
    return truncate_schedule(build_refined_schedule(params),
                             config.beta_min, config.beta_max)


@dataclass(frozen=True)
class RoundPlan:
    """Everything the single eager round must request.

    Since the crossing index is unknown before any sample is drawn, every
    temperature gets the maximum any branch could consume there: the
    search's full probe budget, both paired-product roles, and the larger
    product-estimator count.
    """

    schedule: CoolingSchedule
    noisyfind_per_temp: int
    r_ppe: int
    r_pe: int
    requests: tuple

    @property
    def total_requested(self) -> int:
        return sum(r.count for r in self.requests)


def one_round_plan(config: AnnealConfig) -> RoundPlan:
    if config.mode != MODE_EAGER:
        raise ValueError("one-round plans exist only in eager mode")
    sched = build_truncated_schedule(config)
    nf = NoisyFindConfig(NF_TAU, NF_EPS, NF_DELTA)
    rs = replicate_counts(config.eps)
    requests = list(precompute_requests(sched, nf))
    for temp in range(len(sched)):
        requests.append(OracleRequest(temp, rs["ppe_split"], PHASE_PPE_X))
        requests.append(OracleRequest(temp, rs["ppe_split"], PHASE_PPE_Y))
        requests.append(OracleRequest(temp, rs["pe_split"], PHASE_PE))
    per_temp = batch_size(len(sched), nf) * probe_count(len(sched))
    return RoundPlan(schedule=sched, noisyfind_per_temp=per_temp,
                     r_ppe=rs["ppe_split"], r_pe=rs["pe_split"],
                     requests=tuple(requests))


# ---------------------------------------------------------------------------


class _Prefetched:
    """Slice view over the eager round's results."""

    def __init__(self, requests, results):
        self._data = {(req.phase, req.temp_index): res.hamiltonian_values
                      for req, res in zip(requests, results)}

    def take(self, phase: str, temp: int, count: int):
        values = self._data[(phase, temp)]
        if len(values) < count:
            raise ValueError("eager allocation smaller than consumption")
        return values[:count]


class _Lazy:
    """Collects the chosen branch's needs into one oracle round."""

    def __init__(self, oracle):
        self._oracle = oracle
        self._needs: list = []

    def take(self, phase: str, temp: int, count: int):
        self._needs.append(OracleRequest(temp, count, phase))
        return None  # filled after the round

    def run(self):
        results = self._oracle.request_round(self._needs)
        return {(req.phase, req.temp_index): res.hamiltonian_values
                for req, res in zip(self._needs, results)}


def _branch_estimate(sched: CoolingSchedule, j: int, rs: dict, source,
                     lazy: bool):
    """Assemble the branch's sample needs, then combine.

    Returns (LogValue, depth).  ``source.take`` either yields samples
    directly (eager) or registers needs to be served by one round (lazy).
    """
    betas = sched.betas
    big_l = len(sched)

    def gather(spec_list):
        # spec_list: (phase, temp, count); in lazy mode run the round once
        # all needs are known, then look everything up.
        if lazy:
            for phase, temp, count in spec_list:
                source.take(phase, temp, count)
            data = source.run()
            return [data[(phase, temp)][:count]
                    for phase, temp, count in spec_list]
        return [source.take(phase, temp, count)
                for phase, temp, count in spec_list]

    if j == 0:
        r = rs["pe_direct"]
        (batch,) = gather([(PHASE_PE, 0, r)])
        return pe_combine((betas[0], betas[-1]), [batch], r)

    if j == big_l:
        r = rs["ppe_full"]
        needs = [(PHASE_PPE_X, t, r) for t in range(big_l - 1)]
        needs += [(PHASE_PPE_Y, t, r) for t in range(1, big_l)]
        batches = gather(needs)
        return ppe_combine(betas, batches[: big_l - 1], batches[big_l - 1:], r)

    # interior crossing: PPE over the warm prefix, PE across the remainder
    r_ppe = rs["ppe_split"]
    r_pe = rs["pe_split"]
    pe_temps = [j - 1] if j + 1 == big_l else [j - 1, j]
    pe_betas = tuple(betas[t] for t in pe_temps) + (betas[-1],)
    needs = [(PHASE_PPE_X, t, r_ppe) for t in range(j - 1)]
    needs += [(PHASE_PPE_Y, t, r_ppe) for t in range(1, j)]
    needs += [(PHASE_PE, t, r_pe) for t in pe_temps]
    batches = gather(needs)
    x_batches = batches[: j - 1]
    y_batches = batches[j - 1: 2 * (j - 1)]
    pe_batches = batches[2 * (j - 1):]

    q_pe, d_pe = pe_combine(pe_betas, pe_batches, r_pe)
    if j == 1:
        # the warm prefix is a single temperature: its telescoping product
        # is empty and equals 1 exactly
        return q_pe, d_pe
    q_ppe, d_ppe = ppe_combine(betas[:j], x_batches, y_batches, r_ppe)
    return q_ppe * q_pe, max(d_pe, d_ppe) + 1


def estimate_ratio(config: AnnealConfig, oracle_factory, *,
                   namespace: str = "") -> RatioEstimate:
    """One run of the main algorithm: 3/4-confidence (1 +- eps) estimate.

    ``oracle_factory(schedule, namespace)`` must yield a sampling oracle
    serving the truncated schedule; the namespace keeps boosted replicas'
    random streams disjoint.
    """
    if config.h == 0:
        # constant energy: Z does not depend on beta, the ratio is exactly 1
        return RatioEstimate(0.0, CostMetrics())

    sched = build_truncated_schedule(config)
    big_l = len(sched)
    oracle = oracle_factory(sched, namespace)
    nf = NoisyFindConfig(NF_TAU, NF_EPS, NF_DELTA)
    rs = replicate_counts(config.eps)

    if config.mode == MODE_EAGER:
        plan = one_round_plan(config)
        results = oracle.request_round(list(plan.requests))
        prefetched = _Prefetched(plan.requests, results)
        nf_batches = {t: prefetched.take(PHASE_NOISYFIND, t,
                                         plan.noisyfind_per_temp)
                      for t in range(big_l)}
        j = noisy_find(sched, oracle, nf, batches=nf_batches)
        q, depth = _branch_estimate(sched, j, rs, prefetched, lazy=False)
    else:
        j = noisy_find(sched, oracle, nf)
        q, depth = _branch_estimate(sched, j, rs, _Lazy(oracle), lazy=True)

    metrics = CostMetrics(total_samples=oracle.total_samples,
                          oracle_rounds=oracle.oracle_rounds,
                          reduction_depth=depth, schedule_length=big_l)
    return RatioEstimate(log_q_hat=q.log, metrics=metrics)


def boost_runs(boost_delta: float) -> int:
    """Median-trick replication: 2 * ceil(ln(1/delta)) + 1 independent runs."""
    return 2 * math.ceil(math.log(1.0 / boost_delta)) + 1


def estimate_ratio_boosted(config: AnnealConfig,
                           oracle_factory) -> RatioEstimate:
    """Median of independent runs; failure probability drops to boost_delta.

    Runs use disjoint stream namespaces and may execute concurrently; the
    median is taken over log Q_hat.  Cost metrics: samples add up, rounds
    and depth are the parallel maxima, the median combine adds its own
    log-depth.
    """
    if config.boost_delta is None:
        raise ValueError("boost_delta is not set")
    m = boost_runs(config.boost_delta)
    runs = [estimate_ratio(replace(config, boost_delta=None), oracle_factory,
                           namespace=f"boost{k}/")
            for k in range(m)]
    logs = sorted(r.log_q_hat for r in runs)
    median = logs[m // 2]
    metrics = CostMetrics(
        total_samples=sum(r.metrics.total_samples for r in runs),
        oracle_rounds=max(r.metrics.oracle_rounds for r in runs),
        reduction_depth=max(r.metrics.reduction_depth for r in runs)
        + ceil_log2(m),
        schedule_length=runs[0].metrics.schedule_length,
    )
    return RatioEstimate(log_q_hat=median, metrics=metrics)
