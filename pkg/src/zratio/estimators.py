"""The product estimator (PE) and paired-product estimator (PPE).

Both telescope the ratio Z(beta_l)/Z(beta_1) over a cooling schedule using
one non-adaptive round of samples.

* PE averages, per step i, the weights W_ij = exp[(b_i - b_{i+1}) H(X_ij)]
  with X_ij ~ pi_{b_i}, then multiplies the step means.  Unbiased; its
  variance is governed by the per-step relative second moments (the
  B-Chebyshev condition).
* PPE splits every step at its midpoint and forms per-replicate products
  across all steps for the two half-step weight families W and V; the
  estimate is mean(W_j) / mean(V_j).  Biased in general, but its variance
  is governed by kappa = sum_i [z(b_i) + z(b_{i+1}) - 2 z(mid_i)], which a
  fine schedule keeps bounded.

Numerical layout: per-step means stay in linear space (those weights never
exceed 1); everything multiplied across steps, and the V side whose factors
exceed 1, lives in shifted log space.  All reductions use fixed balanced
shapes so results are bit-identical regardless of how work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import (CostMetrics, HamiltonianHistogram, LogValue, RatioEstimate,
                   z_exact_many)
from .oracles import OracleRequest, SamplingOracle
from .schedule import CoolingSchedule

PHASE_PE = "pe"
PHASE_PPE_X = "ppe-x"
PHASE_PPE_Y = "ppe-y"

PE_KIND = "pe"
PPE_KIND = "ppe"

NEG_INF = float("-inf")


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("ceil_log2 needs a positive integer")
    return (x - 1).bit_length()


def tree_reduce(values, op):
    """Combine a sequence with a fixed midpoint-split tree.

    Returns (result, depth); the shape depends only on len(values), which
    pins the floating-point result independently of execution order.
    """
    if not values:
        raise ValueError("cannot reduce an empty sequence")

    def rec(lo: int, hi: int):
        if hi - lo == 1:
            return values[lo], 0
        mid = (lo + hi) // 2
        left, dl = rec(lo, mid)
        right, dr = rec(mid, hi)
        return op(left, right), max(dl, dr) + 1

    return rec(0, len(values))


def _pairwise_vector_sum(vectors):
    """Sum r-vectors with the binary-counter pairwise schedule.

    Fixed combine shape for a fixed operand count; O(log n) live partials.
    Returns (sum_vector, depth).
    """
    stack: list = []  # (rank, vector)
    count = 0
    for vec in vectors:
        count += 1
        rank = 0
        while stack and stack[-1][0] == rank:
            _, other = stack.pop()
            vec = other + vec
            rank += 1
        stack.append((rank, vec))
    if not stack:
        raise ValueError("cannot sum zero vectors")
    total = None
    for _, vec in reversed(stack):  # merge smallest partials first
        total = vec if total is None else total + vec
    return total, ceil_log2(count) if count > 1 else 0


# ---------------------------------------------------------------------------
# Step weights


def log_w_weights(H: np.ndarray, beta_lo: float, beta_hi: float, *,
                  half: bool) -> np.ndarray:
    """ln of exp[(beta_lo - beta_hi)(/2) * H]; these are always <= 0.

    A +inf upper temperature makes the weight the ground-state indicator.
    """
    if math.isinf(beta_hi):
        return np.where(H == 0, 0.0, NEG_INF)
    d = beta_lo - beta_hi
    if half:
        d *= 0.5
    return d * np.asarray(H, dtype=np.float64)


def log_v_weights(H: np.ndarray, beta_lo: float, beta_hi: float) -> np.ndarray:
    """ln of exp[(beta_hi - beta_lo)/2 * H]; these are always >= 0.

    With beta_hi = +inf the samples come from pi_inf, so H = 0 and the
    weight is 1; any stray H > 0 is pinned to +inf rather than NaN.
    """
    if math.isinf(beta_hi):
        return np.where(H == 0, 0.0, math.inf)
    return 0.5 * (beta_hi - beta_lo) * np.asarray(H, dtype=np.float64)


# ---------------------------------------------------------------------------
# Plans


@dataclass(frozen=True)
class EstimatorPlan:
    schedule: CoolingSchedule
    replicates: int
    kind: str

    def __post_init__(self):
        if self.kind not in (PE_KIND, PPE_KIND):
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if len(self.schedule) < 2:
            raise ValueError("estimator schedules need at least two points")


def pe_sample_needs(temp_indices, r: int, *, phase: str = PHASE_PE) -> list:
    """One request per sampled temperature (every schedule point except the
    last)."""
    return [OracleRequest(temp_index=i, count=r, phase=phase)
            for i in temp_indices]


def ppe_sample_needs(x_temp_indices, y_temp_indices, r: int) -> list:
    xs = [OracleRequest(temp_index=i, count=r, phase=PHASE_PPE_X)
          for i in x_temp_indices]
    ys = [OracleRequest(temp_index=i, count=r, phase=PHASE_PPE_Y)
          for i in y_temp_indices]
    return xs + ys


# ---------------------------------------------------------------------------
# Combination (pure given the sampled H values)


def pe_combine(betas, batches, r: int):
    """PE from per-step H batches: per-step linear means, log-space product.

    Returns (LogValue of Q_hat, reduction depth).
    """
    if len(betas) < 2 or len(batches) != len(betas) - 1:
        raise ValueError("need one batch per schedule step")
    factors = []
    for i, H in enumerate(batches):
        w = np.exp(log_w_weights(H[:r], betas[i], betas[i + 1], half=False))
        factors.append(LogValue.of(float(w.mean())))
    product, tree_depth = tree_reduce(factors, lambda a, b: a * b)
    return product, ceil_log2(r) + tree_depth


def ppe_combine(betas, x_batches, y_batches, r: int):
    """PPE from per-step X and Y batches.

    Per-replicate products across steps are log-sums accumulated pairwise;
    the W mean is linear (W_j <= 1), the V mean max-shifted (V_j >= 1).
    Returns (LogValue of Q_hat, reduction depth).
    """
    steps = len(betas) - 1
    if steps < 1 or len(x_batches) != steps or len(y_batches) != steps:
        raise ValueError("need X and Y batches for every schedule step")
    log_w, depth_w = _pairwise_vector_sum(
        log_w_weights(x_batches[i][:r], betas[i], betas[i + 1], half=True)
        for i in range(steps))
    log_v, _ = _pairwise_vector_sum(
        log_v_weights(y_batches[i][:r], betas[i], betas[i + 1])
        for i in range(steps))
    w_mean = LogValue.of(float(np.exp(log_w).mean()))
    log_v_mean = float(logsumexp(log_v)) - math.log(r)
    q = w_mean / LogValue.from_log(log_v_mean)
    return q, depth_w + ceil_log2(r)


# ---------------------------------------------------------------------------
# One-shot estimators (single oracle round each)


def pe_estimate(plan: EstimatorPlan, oracle: SamplingOracle) -> RatioEstimate:
    """Run the product estimator: one round of r samples at each of the
    first l-1 temperatures."""
    if plan.kind != PE_KIND:
        raise ValueError("plan is not a PE plan")
    l = len(plan.schedule)
    needs = pe_sample_needs(range(l - 1), plan.replicates)
    batches = [res.hamiltonian_values
               for res in oracle.request_round(needs)]
    q, depth = pe_combine(plan.schedule.betas, batches, plan.replicates)
    metrics = CostMetrics(total_samples=plan.replicates * (l - 1),
                          oracle_rounds=1, reduction_depth=depth,
                          schedule_length=l)
    return RatioEstimate(log_q_hat=q.log, metrics=metrics)


def ppe_estimate(plan: EstimatorPlan, oracle: SamplingOracle) -> RatioEstimate:
    """Run the paired-product estimator: one round with fresh X samples at
    temperatures 1..l-1 and fresh Y samples at 2..l (never shared)."""
    if plan.kind != PPE_KIND:
        raise ValueError("plan is not a PPE plan")
    l = len(plan.schedule)
    needs = ppe_sample_needs(range(l - 1), range(1, l), plan.replicates)
    results = oracle.request_round(needs)
    x_batches = [res.hamiltonian_values for res in results[: l - 1]]
    y_batches = [res.hamiltonian_values for res in results[l - 1:]]
    q, depth = ppe_combine(plan.schedule.betas, x_batches, y_batches,
                           plan.replicates)
    metrics = CostMetrics(total_samples=2 * plan.replicates * (l - 1),
                          oracle_rounds=1, reduction_depth=depth,
                          schedule_length=l)
    return RatioEstimate(log_q_hat=q.log, metrics=metrics)


# ---------------------------------------------------------------------------
# Exact-moment diagnostics (test-side, needs the histogram)


@dataclass(frozen=True)
class KappaReport:
    """Exact Bregman gaps of a schedule against a known histogram.

    kappa_i = z(b_i) + z(b_{i+1}) - 2 z(midpoint); e^kappa_i is exactly the
    relative second moment of both half-step PPE weights, and e^kappa that
    of the per-replicate products.
    """

    kappa_i: np.ndarray
    kappa: float

    @property
    def srel_steps(self) -> np.ndarray:
        return np.exp(self.kappa_i)

    @property
    def srel_path(self) -> float:
        return math.exp(self.kappa)


def kappa_diagnostics(schedule_betas, hist: HamiltonianHistogram) -> KappaReport:
    betas = np.asarray(schedule_betas, dtype=np.float64)
    if betas.size < 2:
        return KappaReport(kappa_i=np.zeros(0), kappa=0.0)
    mids = 0.5 * (betas[:-1] + betas[1:])  # +inf midpoint for the +inf step
    z = z_exact_many(hist, betas)
    z_mid = z_exact_many(hist, mids)
    kappa_i = z[:-1] + z[1:] - 2.0 * z_mid
    kappa_i = np.maximum(kappa_i, 0.0)  # convexity guarantees >= 0
    return KappaReport(kappa_i=kappa_i, kappa=float(kappa_i.sum()))
