import math

import numpy as np
import pytest

from zratio import rng
from zratio.core import gibbs_pmf, z_exact
from zratio.errors import (EnumerationBudgetError, InputFormatError,
                           UnsupportedParameterizationError)
from zratio.models import (Graph, ModelSpec, default_burn_in,
                           enumerate_histogram, enumerate_log_z_model,
                           glauber_step, glauber_transition_matrix,
                           reduce_model, run_chains, sample_mcmc)

P3 = Graph(3, ((0, 1), (1, 2)))
K2 = Graph(2, ((0, 1),))
C4 = Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0)))


# ---------------------------------------------------------------------------
# graphs


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(2, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        Graph(2, ((0, 2),))
    g = Graph(4, ((0, 1), (1, 2)))
    assert g.max_degree == 2
    assert list(g.degrees) == [1, 2, 1, 0]


def test_graph_parsing_with_line_numbers():
    g = Graph.from_edge_list_text("3 2\n0 1\n1 2\n")
    assert g.n == 3 and g.edges == ((0, 1), (1, 2))

    with pytest.raises(InputFormatError, match="line 1"):
        Graph.from_edge_list_text("3\n0 1\n")
    with pytest.raises(InputFormatError, match="line 2"):
        Graph.from_edge_list_text("3 1\n0 x\n")
    with pytest.raises(InputFormatError, match="line 3"):
        Graph.from_edge_list_text("3 2\n0 1\n5 1\n")
    with pytest.raises(InputFormatError, match="promises"):
        Graph.from_edge_list_text("3 2\n0 1\n")
    with pytest.raises(InputFormatError):
        Graph.from_edge_list_text("")


# ---------------------------------------------------------------------------
# reductions


def test_reduce_hardcore_k2():
    red = reduce_model(K2, ModelSpec("hardcore", lam=0.5))
    assert red.h == 2
    assert red.beta_min == pytest.approx(math.log(2))
    assert math.isinf(red.beta_max)
    hist = enumerate_histogram(K2, ModelSpec("hardcore", lam=0.5))
    assert hist.counts == (1, 2, 0)
    log_q = z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min)
    assert math.exp(log_q) == pytest.approx(0.5, rel=1e-12)  # Q = 1/Z = 1/2
    assert math.exp(red.log_z_model(log_q)) == pytest.approx(2.0, rel=1e-12)


def test_reduce_ising_k2():
    spec = ModelSpec("ising", gamma=2.0)
    red = reduce_model(K2, spec)
    assert red.h == 1
    assert red.beta_max == pytest.approx(math.log(2))
    hist = enumerate_histogram(K2, spec)
    assert hist.counts == (2, 2, 0)
    # Z_H(ln 2) = 3, Z_H(0) = 4, Q = 3/4
    log_q = z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min)
    assert math.exp(log_q) == pytest.approx(0.75, rel=1e-12)
    assert math.exp(red.log_z_model(log_q)) == pytest.approx(6.0, rel=1e-12)


def test_reduce_trivial_ising():
    red = reduce_model(K2, ModelSpec("ising", gamma=1.0))
    assert red.trivial and red.beta_min == red.beta_max == 0.0
    assert math.exp(red.log_z_model(0.0)) == pytest.approx(4.0)


def test_reduce_antiferro_ising():
    spec = ModelSpec("ising", gamma=0.5)
    red = reduce_model(C4, spec)
    assert red.beta_max == pytest.approx(math.log(2))
    hist = enumerate_histogram(C4, spec)
    log_q = z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min)
    assert red.log_z_model(log_q) == pytest.approx(
        enumerate_log_z_model(C4, spec), rel=1e-12)


def test_unsupported_parameterizations():
    with pytest.raises(UnsupportedParameterizationError):
        reduce_model(K2, ModelSpec("ising", gamma=2.0, lam=0.5))
    with pytest.raises(UnsupportedParameterizationError):
        reduce_model(K2, ModelSpec("hardcore", lam=1.5))


def test_reduction_consistency_random_graphs():
    gen = rng.stream(7, "test/models-consistency", 0, 0)
    for trial in range(12):
        n = int(gen.integers(2, 9))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if gen.random() < 0.45]
        g = Graph(n, tuple(edges))
        if trial % 2 == 0:
            spec = ModelSpec("hardcore", lam=float(gen.uniform(0.1, 1.0)))
        else:
            spec = ModelSpec("ising", gamma=float(gen.uniform(0.3, 3.0)))
        red = reduce_model(g, spec)
        hist = enumerate_histogram(g, spec)
        beta_ref = red.beta_max if spec.kind == "ising" else red.beta_min
        log_z = red.external_factor_log + z_exact(hist, beta_ref)
        assert log_z == pytest.approx(enumerate_log_z_model(g, spec),
                                      rel=1e-10)


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_p3_hardcore():
    hist = enumerate_histogram(P3, ModelSpec("hardcore", lam=0.5))
    assert hist.counts == (1, 3, 1, 0)
    # Z_hc(0.5) = 1 + 3/2 + 1/4
    lam = 0.5
    z = sum(c * lam ** i for i, c in enumerate(hist.counts))
    assert z == pytest.approx(2.75)


def test_enumerate_empty_graph_binomial():
    g = Graph(5, ())
    hist = enumerate_histogram(g, ModelSpec("hardcore", lam=1.0))
    assert hist.counts == (1, 5, 10, 10, 5, 1)


def test_enumeration_budget():
    g = Graph(25, ())
    with pytest.raises(EnumerationBudgetError):
        enumerate_histogram(g, ModelSpec("hardcore", lam=1.0))


def test_uniqueness_diagnostics():
    k4 = Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    assert ModelSpec("ising", gamma=1.5).uniqueness_ok(k4)
    assert not ModelSpec("ising", gamma=5.0).uniqueness_ok(k4)
    # Delta = 3: hard-core threshold is 2^2 / 1^3 = 4
    assert ModelSpec("hardcore", lam=0.5).uniqueness_ok(k4)
    assert not ModelSpec("hardcore", lam=5.0).uniqueness_ok(k4)
    # low-degree graphs are always in range
    assert ModelSpec("ising", gamma=10.0).uniqueness_ok(P3)


# ---------------------------------------------------------------------------
# Glauber dynamics


def test_detailed_balance_explicit_matrices():
    cases = [
        (P3, ModelSpec("hardcore", lam=0.9), 0.6),
        (C4, ModelSpec("ising", gamma=2.0), 0.5),
        (Graph(3, ((0, 1), (1, 2), (0, 2))), ModelSpec("ising", gamma=0.6), 0.3),
    ]
    for graph, spec, beta in cases:
        red = reduce_model(graph, spec)
        _, P, pi = glauber_transition_matrix(red, beta)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
        flow = pi[:, None] * P
        assert np.abs(flow - flow.T).max() <= 1e-10
        assert np.abs(pi @ P - pi).max() <= 1e-10


def test_glauber_step_conditional_support():
    red = reduce_model(K2, ModelSpec("hardcore", lam=1.0))
    gen = rng.stream(8, "test/glauber-step", 0, 0)
    state = np.array([1, 0], dtype=np.uint8)
    for _ in range(50):
        new = glauber_step(state, red, 0.2, gen)
        assert not (new[0] and new[1])  # never both occupied


def test_mcmc_matches_exact_distribution():
    g = Graph(6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)))
    spec = ModelSpec("hardcore", lam=0.8)
    red = reduce_model(g, spec)
    hist = enumerate_histogram(g, spec)
    beta = red.beta_min + 0.2
    gen = rng.stream(9, "test/mcmc-tv", 0, 0)
    states = run_chains(red, beta, default_burn_in(g.n), 30_000, gen)
    vals = red.hamiltonians_of_states(states)
    emp = np.bincount(vals, minlength=hist.h + 1) / len(vals)
    tv = 0.5 * np.abs(emp - gibbs_pmf(hist, beta)).sum()
    assert tv <= 0.05


def test_sample_mcmc_shape_and_validity():
    red = reduce_model(P3, ModelSpec("hardcore", lam=1.0))
    gen = rng.stream(10, "test/mcmc-one", 0, 0)
    state = sample_mcmc(red, 0.5, burn_in=100, rng=gen)
    assert state.shape == (3,)
    assert not (state[0] and state[1]) and not (state[1] and state[2])


def test_default_burn_in_formula():
    assert default_burn_in(12) == 50 * 12 * math.ceil(math.log(12) + 1)
    assert default_burn_in(1) == 50
