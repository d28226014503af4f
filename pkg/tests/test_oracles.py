import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from zratio.core import HamiltonianHistogram, gibbs_pmf
from zratio.errors import SamplingBudgetError, StreamKeyConflictError
from zratio.models import Graph, ModelSpec, enumerate_histogram, reduce_model
from zratio.oracles import (McmcConfig, OracleRequest, oracle_from_histogram,
                            oracle_from_model)
from zratio.schedule import CoolingSchedule


def simple_schedule(*betas):
    return CoolingSchedule(tuple(betas), tuple("linear" for _ in betas))


HIST = HamiltonianHistogram.from_counts([1, 0, 1])


def test_request_validation():
    with pytest.raises(ValueError):
        OracleRequest(temp_index=0, count=0, phase="pe")
    with pytest.raises(ValueError):
        OracleRequest(temp_index=-1, count=3, phase="pe")


def test_round_accounting_exact():
    oracle = oracle_from_histogram(HIST, simple_schedule(0.0, 1.0, math.inf), 5)
    assert oracle.oracle_rounds == 0
    assert oracle.request_round([]) == []
    assert oracle.oracle_rounds == 0  # empty rounds do not count
    for k in range(1, 4):
        oracle.request_round([OracleRequest(0, 10, "pe", offset=10 * k)])
        assert oracle.oracle_rounds == k
    assert oracle.total_samples == 30


def test_support_and_infinite_endpoint():
    oracle = oracle_from_histogram(HIST, simple_schedule(0.0, math.inf), 5)
    res = oracle.request_round([OracleRequest(0, 5, "pe")])[0]
    assert set(np.unique(res.hamiltonian_values)) <= {0, 2}
    res_inf = oracle.request_round([OracleRequest(1, 7, "pe")])[0]
    assert (res_inf.hamiltonian_values == 0).all()


def test_overlapping_keys_rejected():
    oracle = oracle_from_histogram(HIST, simple_schedule(0.0, 1.0), 5)
    reqs = [OracleRequest(0, 10, "pe", offset=0),
            OracleRequest(0, 10, "pe", offset=5)]
    with pytest.raises(StreamKeyConflictError):
        oracle.request_round(reqs)
    # same span under different phases or temperatures is fine
    oracle.request_round([OracleRequest(0, 10, "pe"),
                          OracleRequest(0, 10, "ppe-x"),
                          OracleRequest(1, 10, "pe")])


def test_out_of_range_temperature():
    oracle = oracle_from_histogram(HIST, simple_schedule(0.0, 1.0), 5)
    with pytest.raises(ValueError):
        oracle.request_round([OracleRequest(2, 5, "pe")])


def test_determinism_across_workers_and_interleaving():
    sched = simple_schedule(0.0, 0.5, 1.0, math.inf)
    reqs = [OracleRequest(t, 1000, phase, offset=off)
            for t in range(3)
            for phase in ("pe", "ppe-x")
            for off in (0, 1000)]
    outs = []
    for workers in (1, 4, 16):
        oracle = oracle_from_histogram(HIST, sched, 99, workers=workers)
        res = oracle.request_round(list(reqs))
        outs.append([r.hamiltonian_values for r in res])
    for other in outs[1:]:
        assert all(np.array_equal(a, b) for a, b in zip(outs[0], other))
    # order of requests within the round does not change per-key results
    oracle = oracle_from_histogram(HIST, sched, 99)
    res_rev = oracle.request_round(list(reversed(reqs)))
    assert all(np.array_equal(a, b)
               for a, b in zip(outs[0], reversed([r.hamiltonian_values
                                                  for r in res_rev])))


def test_disjoint_keys_give_independent_samples():
    # chi-square independence test on paired draws at the same temperature
    sched = simple_schedule(0.0, 1.0)
    oracle = oracle_from_histogram(HIST, sched, 7)
    n = 100_000
    res = oracle.request_round([OracleRequest(0, n, "pe", offset=0),
                                OracleRequest(0, n, "pe", offset=n)])
    a = res[0].hamiltonian_values // 2  # values in {0, 2} -> {0, 1}
    b = res[1].hamiltonian_values // 2
    table = np.array([[((a == i) & (b == j)).sum() for j in (0, 1)]
                      for i in (0, 1)])
    assert chi2_contingency(table).pvalue >= 1e-3


def test_namespace_changes_streams():
    sched = simple_schedule(0.0, 1.0)
    a = oracle_from_histogram(HIST, sched, 7, namespace="boost0/")
    b = oracle_from_histogram(HIST, sched, 7, namespace="boost1/")
    ra = a.request_round([OracleRequest(0, 500, "pe")])[0].hamiltonian_values
    rb = b.request_round([OracleRequest(0, 500, "pe")])[0].hamiltonian_values
    assert not np.array_equal(ra, rb)


def test_histogram_backend_exactness_tv():
    counts = (np.exp(-0.12 * np.arange(65)) * 2000).astype(int)
    hist = HamiltonianHistogram.from_counts(counts.tolist())
    sched = simple_schedule(0.0, 0.3)
    oracle = oracle_from_histogram(hist, sched, 13)
    for temp, beta in ((0, 0.0), (1, 0.3)):
        vals = oracle.request_round(
            [OracleRequest(temp, 100_000, "pe")])[0].hamiltonian_values
        emp = np.bincount(vals, minlength=hist.h + 1) / len(vals)
        tv = 0.5 * np.abs(emp - gibbs_pmf(hist, beta)).sum()
        assert tv <= 0.01


def test_model_oracle_matches_histogram_backend():
    g = Graph(8, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7),
                  (7, 0), (0, 4)))
    spec = ModelSpec("ising", gamma=1.6)
    red = reduce_model(g, spec)
    hist = enumerate_histogram(g, spec)
    beta = red.beta_max
    sched = simple_schedule(0.0, beta)
    n = 100_000
    model_oracle = oracle_from_model(red, sched, 17)
    vals = model_oracle.request_round(
        [OracleRequest(1, n, "pe")])[0].hamiltonian_values
    hist_oracle = oracle_from_histogram(hist, sched, 17)
    ref = hist_oracle.request_round(
        [OracleRequest(1, n, "pe")])[0].hamiltonian_values
    emp_a = np.bincount(vals, minlength=hist.h + 1) / n
    emp_b = np.bincount(ref, minlength=hist.h + 1) / n
    assert 0.5 * np.abs(emp_a - emp_b).sum() <= 0.02


def test_model_oracle_k2_uniform_independent_sets():
    # K2 at lambda = 1, beta = 0: the three independent sets are uniform,
    # so Pr[H = 0] = 1/3
    red = reduce_model(Graph(2, ((0, 1),)), ModelSpec("hardcore", lam=1.0))
    sched = simple_schedule(0.0, math.inf)
    oracle = oracle_from_model(red, sched, 23)
    vals = oracle.request_round(
        [OracleRequest(0, 60_000, "pe")])[0].hamiltonian_values
    assert (vals == 0).mean() == pytest.approx(1.0 / 3.0, abs=0.01)


def test_model_oracle_infinite_endpoint_rejection():
    g = Graph(4, ((0, 1), (1, 2), (2, 3)))
    red = reduce_model(g, ModelSpec("hardcore", lam=1.0))
    sched = simple_schedule(0.0, math.inf)
    oracle = oracle_from_model(red, sched, 3)
    vals = oracle.request_round(
        [OracleRequest(1, 200, "pe")])[0].hamiltonian_values
    assert (vals == 0).all()


def test_model_oracle_budget_error():
    g = Graph(4, ((0, 1), (1, 2), (2, 3)))
    red = reduce_model(g, ModelSpec("hardcore", lam=1.0))
    sched = simple_schedule(0.0, math.inf)
    # a hostile margin makes cold samples excited, exhausting the budget
    mcmc = McmcConfig(burn_in=20, attempt_budget=64, cold_beta_margin=-2.0)
    oracle = oracle_from_model(red, sched, 3, mcmc=mcmc, q_bar=0.1)
    with pytest.raises(SamplingBudgetError):
        oracle.request_round([OracleRequest(1, 64, "pe")])
