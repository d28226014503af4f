#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-python fallback.

Covers the two hot loops: batched Glauber single-site stepping and alias
sampling of the level distribution, plus one end-to-end estimate.  Run after
building the extension:

    python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from zratio import _kernels_py, rng
from zratio.annealer import AnnealConfig, estimate_ratio
from zratio.core import z_exact
from zratio.kernels import BACKEND, build_alias_table
from zratio.models import (Graph, ModelSpec, enumerate_histogram,
                           reduce_model)
from zratio.oracles import histogram_oracle_factory

try:
    from zratio import _kernels as _compiled
except ImportError:
    _compiled = None


def timeit(fn, *args, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def ring_graph(n, extra=()):
    edges = tuple((i, (i + 1) % n) for i in range(n)) + tuple(extra)
    return Graph(n, edges)


def bench_glauber(rows):
    graph = ring_graph(64, extra=((0, 32), (16, 48), (8, 40)))
    red = reduce_model(graph, ModelSpec("hardcore", lam=0.8))
    table = red.conditional_table(0.5)
    indptr, indices = graph.csr
    chains, steps = 4096, 2048
    gen = rng.stream(0, "bench/glauber", 0, 0)
    vidx = gen.integers(0, graph.n, size=(chains, steps), dtype=np.int32)
    u = gen.random((chains, steps))
    total = chains * steps

    def run(impl):
        states = np.zeros((chains, graph.n), dtype=np.uint8)
        impl.run_glauber_chains(indptr, indices, graph.degrees, table,
                                states, vidx, u)
        return states

    t_py = timeit(run, _kernels_py)
    rows.append(("glauber stepping", total, t_py, None))
    if _compiled is not None:
        t_cy = timeit(run, _compiled)
        assert np.array_equal(run(_compiled), run(_kernels_py))
        rows[-1] = ("glauber stepping", total, t_py, t_cy)


def bench_alias(rows):
    gen = rng.stream(0, "bench/alias", 0, 0)
    pmf = np.exp(-0.1 * np.arange(65))
    pmf /= pmf.sum()
    prob, alias = build_alias_table(pmf)
    u = gen.random(20_000_000)

    t_py = timeit(_kernels_py.sample_alias, prob, alias, u)
    rows.append(("alias sampling", len(u), t_py, None))
    if _compiled is not None:
        t_cy = timeit(_compiled.sample_alias, prob, alias, u)
        assert np.array_equal(_compiled.sample_alias(prob, alias, u),
                              _kernels_py.sample_alias(prob, alias, u))
        rows[-1] = ("alias sampling", len(u), t_py, t_cy)


def bench_end_to_end():
    graph = Graph(3, ((0, 1), (1, 2)))
    spec = ModelSpec("hardcore", lam=0.5)
    hist = enumerate_histogram(graph, spec)
    red = reduce_model(graph, spec)
    config = AnnealConfig(beta_min=red.beta_min, beta_max=red.beta_max,
                          eps=0.1, q_bar=graph.n * math.log(2.0), h=red.h)
    t0 = time.perf_counter()
    res = estimate_ratio(config, histogram_oracle_factory(hist, 7))
    elapsed = time.perf_counter() - t0
    true_q = math.exp(z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min))
    print(f"\nend-to-end (hard-core path graph, eps=0.1, backend={BACKEND}):")
    print(f"  {res.metrics.total_samples:,} samples in {elapsed * 1e3:.0f} ms; "
          f"Q_hat={math.exp(res.log_q_hat):.4f} (true {true_q:.4f})")


def main():
    print(f"active backend: {BACKEND}")
    if _compiled is None:
        print("compiled kernels unavailable; timing the fallback only")
    rows = []
    bench_glauber(rows)
    bench_alias(rows)

    print(f"\n{'kernel':<20} {'ops':>12} {'python':>12} {'cython':>12} "
          f"{'speedup':>9}")
    for name, ops, t_py, t_cy in rows:
        py_rate = f"{ops / t_py / 1e6:8.1f} M/s"
        if t_cy is None:
            print(f"{name:<20} {ops:>12,} {py_rate:>12} {'-':>12} {'-':>9}")
        else:
            cy_rate = f"{ops / t_cy / 1e6:8.1f} M/s"
            print(f"{name:<20} {ops:>12,} {py_rate:>12} {cy_rate:>12} "
                  f"{t_py / t_cy:>8.1f}x")
    bench_end_to_end()


if __name__ == "__main__":
    main()
