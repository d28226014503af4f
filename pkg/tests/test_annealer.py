import math
from dataclasses import replace

import numpy as np
import pytest

from zratio.annealer import (AnnealConfig, boost_runs,
                             build_truncated_schedule, estimate_ratio,
                             estimate_ratio_boosted, one_round_plan,
                             replicate_counts, _branch_estimate, _Lazy)
from zratio.core import HamiltonianHistogram, z_exact
from zratio.estimators import ceil_log2
from zratio.models import Graph, ModelSpec, enumerate_histogram, reduce_model
from zratio.noisyfind import NoisyFindConfig, batch_size, noisy_find, probe_count
from zratio.oracles import SamplingOracle, histogram_oracle_factory
from zratio.schedule import CoolingSchedule


def p3_instance():
    graph = Graph(3, ((0, 1), (1, 2)))
    spec = ModelSpec("hardcore", lam=0.5)
    hist = enumerate_histogram(graph, spec)
    red = reduce_model(graph, spec)
    true_log_q = z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min)
    config = AnnealConfig(beta_min=red.beta_min, beta_max=red.beta_max,
                          eps=0.1, q_bar=max(graph.n * math.log(2), 1.0),
                          h=red.h)
    return hist, config, true_log_q


class BernoulliOracle(SamplingOracle):
    def __init__(self, schedule, p_values, seed=0, namespace=""):
        super().__init__(schedule, seed, namespace=namespace)
        self.p_values = p_values

    @property
    def h(self):
        return 1

    def _draw(self, req):
        gen = self._stream(req)
        p = self.p_values[req.temp_index]
        return (gen.random(req.count) < p).astype(np.int32)


def test_config_validation():
    with pytest.raises(ValueError):
        AnnealConfig(beta_min=1.0, beta_max=1.0, eps=0.1, q_bar=1.0, h=3)
    with pytest.raises(ValueError):
        AnnealConfig(beta_min=0.0, beta_max=1.0, eps=1.0, q_bar=1.0, h=3)
    with pytest.raises(ValueError):
        AnnealConfig(beta_min=0.0, beta_max=1.0, eps=0.1, q_bar=0.0, h=3)
    with pytest.raises(ValueError):
        AnnealConfig(beta_min=0.0, beta_max=1.0, eps=0.1, q_bar=1.0, h=3,
                     mode="bulk")


def test_replicate_constants():
    rs = replicate_counts(0.1)
    assert rs == {"pe_direct": 32_000, "ppe_full": 72_000,
                  "ppe_split": 1_296_000, "pe_split": 432_000}


def test_constant_energy_fast_path():
    config = AnnealConfig(beta_min=0.0, beta_max=math.inf, eps=0.3,
                          q_bar=1.0, h=0)

    def refuse(schedule, namespace=""):
        raise AssertionError("fast path must not build an oracle")

    res = estimate_ratio(config, refuse)
    assert res.log_q_hat == 0.0
    assert res.metrics.total_samples == 0
    assert res.metrics.oracle_rounds == 0


def test_end_to_end_accuracy_small():
    hist, config, true_log_q = p3_instance()
    good = 0
    trials = 40
    for seed in range(trials):
        res = estimate_ratio(config, histogram_oracle_factory(hist, seed))
        good += abs(math.exp(res.log_q_hat - true_log_q) - 1.0) <= 0.1
    assert good >= math.floor(0.72 * trials)


def test_lazy_round_formula():
    hist, config, _ = p3_instance()
    sched_len = len(build_truncated_schedule(config))
    res = estimate_ratio(config, histogram_oracle_factory(hist, 5))
    assert res.metrics.oracle_rounds == ceil_log2(sched_len) + 2
    assert res.metrics.schedule_length == sched_len


def test_eager_one_round_and_allocation():
    hist, config, true_log_q = p3_instance()
    config = replace(config, mode="eager", eps=0.4)
    plan = one_round_plan(config)
    res = estimate_ratio(config, histogram_oracle_factory(hist, 5))
    assert res.metrics.oracle_rounds == 1
    big_l = len(plan.schedule)
    rs = replicate_counts(config.eps)
    formula = big_l * (plan.noisyfind_per_temp + 2 * rs["ppe_split"]
                       + rs["pe_split"])
    assert res.metrics.total_samples == plan.total_requested
    assert abs(res.metrics.total_samples - formula) <= big_l
    assert abs(math.exp(res.log_q_hat - true_log_q) - 1.0) <= config.eps


def test_one_round_plan_requires_eager():
    _, config, _ = p3_instance()
    with pytest.raises(ValueError):
        one_round_plan(config)  # lazy config


def test_reduction_depth_bound():
    hist, config, _ = p3_instance()
    sched_len = len(build_truncated_schedule(config))
    rs = replicate_counts(config.eps)
    cap = ceil_log2(max(rs.values())) + ceil_log2(sched_len) + 4
    for seed in (0, 1, 2):
        res = estimate_ratio(config, histogram_oracle_factory(hist, seed))
        assert res.metrics.reduction_depth <= cap


# ---------------------------------------------------------------------------
# branch logic on a two-point schedule with prescribed probabilities


def two_point_oracle(p_values, seed=0):
    sched = CoolingSchedule((0.3, 0.9), ("linear", "linear"))
    return sched, BernoulliOracle(sched, p_values, seed=seed)


@pytest.mark.parametrize("p_values,expect_j", [
    ((0.02, 0.01), 0),   # cold everywhere: direct two-point PE
    ((0.98, 0.97), 2),   # warm everywhere: full-schedule PPE
    ((0.98, 0.02), 1),   # crossing inside: PPE prefix degenerates, PE remains
])
def test_two_point_branches(p_values, expect_j):
    nf = NoisyFindConfig()
    rs = replicate_counts(0.5)
    for seed in range(5):
        sched, oracle = two_point_oracle(p_values, seed=seed)
        j = noisy_find(sched, oracle, nf)
        assert j == expect_j
        q, depth = _branch_estimate(sched, j, rs, _Lazy(oracle), lazy=True)
        # Bernoulli H in {0,1}: every branch estimates a mean of weights
        # exp(-0.6 H) <= 1, so the value stays in (0, 1]
        assert 0.0 < q.to_float() <= 1.0
        assert depth >= 0
        # the chosen branch drew exactly its own allocation
        nf_draws = batch_size(2, nf) * probe_count(2)
        draws = oracle.total_samples - nf_draws
        if j == 0:
            assert draws == rs["pe_direct"]
        elif j == 2:
            assert draws == 2 * rs["ppe_full"]
        else:
            assert draws == rs["pe_split"]  # single-point PPE prefix is free


def test_j1_prefix_is_exact_identity():
    # with j = 1 the warm prefix holds one temperature; the branch must
    # behave exactly like the remaining product estimator alone
    nf = NoisyFindConfig()
    rs = replicate_counts(0.5)
    sched, oracle = two_point_oracle((0.98, 0.02), seed=9)
    j = noisy_find(sched, oracle, nf)
    assert j == 1
    q, _ = _branch_estimate(sched, j, rs, _Lazy(oracle), lazy=True)

    # reconstruct the same estimate from the identical stream
    from zratio.estimators import PHASE_PE, pe_combine
    from zratio.oracles import OracleRequest

    sched2, oracle2 = two_point_oracle((0.98, 0.02), seed=9)
    noisy_find(sched2, oracle2, nf)
    batch = oracle2.request_round(
        [OracleRequest(0, rs["pe_split"], PHASE_PE)])[0].hamiltonian_values
    q2, _ = pe_combine((sched2.betas[0], sched2.betas[1]), [batch],
                       rs["pe_split"])
    assert q.log == q2.log


# ---------------------------------------------------------------------------
# boosting


def test_boost_run_counts():
    assert boost_runs(0.25) == 5
    assert boost_runs(0.05) == 7


def test_boosted_median_and_metrics():
    hist, config, true_log_q = p3_instance()
    config = replace(config, eps=0.3, boost_delta=0.25)
    factory = histogram_oracle_factory(hist, 123)
    res = estimate_ratio_boosted(config, factory)

    inner = [estimate_ratio(replace(config, boost_delta=None), factory,
                            namespace=f"boost{k}/") for k in range(5)]
    assert res.log_q_hat == sorted(r.log_q_hat for r in inner)[2]
    assert res.metrics.total_samples == sum(r.metrics.total_samples
                                            for r in inner)
    assert res.metrics.oracle_rounds == max(r.metrics.oracle_rounds
                                            for r in inner)
    assert res.metrics.reduction_depth == max(r.metrics.reduction_depth
                                              for r in inner) + ceil_log2(5)
    assert abs(math.exp(res.log_q_hat - true_log_q) - 1.0) <= config.eps


def test_boost_requires_delta():
    hist, config, _ = p3_instance()
    with pytest.raises(ValueError):
        estimate_ratio_boosted(config, histogram_oracle_factory(hist, 1))


def test_boost_median_of_identical_runs():
    # an oracle whose every sample is H = 0 makes all inner runs identical,
    # so the median equals the common value exactly
    flat = HamiltonianHistogram.from_counts([3, 0, 0])
    config = AnnealConfig(beta_min=0.0, beta_max=2.0, eps=0.5,
                          q_bar=max(flat.q, 1.0), h=flat.h, boost_delta=0.25,
                          seed=6)
    factory = histogram_oracle_factory(flat, 6)
    res = estimate_ratio_boosted(config, factory)
    assert res.log_q_hat == 0.0


def test_determinism_across_workers():
    hist, config, _ = p3_instance()
    config = replace(config, eps=0.4)
    values = set()
    for workers in (1, 4, 16):
        factory = histogram_oracle_factory(hist, 42, workers=workers)
        res = estimate_ratio(config, factory)
        values.add((res.log_q_hat, res.metrics))
    assert len(values) == 1
