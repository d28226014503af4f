"""Ising and hard-core models, their integer-energy reductions, exact
enumeration, and Glauber-dynamics sampling.

A model instance (graph + activities) is mapped onto an energy function
H with range 0..h so that one endpoint of the anneal has a trivially known
partition function:

* ferromagnetic Ising (gamma > 1, lambda = 1):  H = m - mono(sigma), so
  Z_model = gamma^m * Z_H(ln gamma) and Z_H(0) = 2^n;
* antiferromagnetic Ising (gamma < 1): H = mono(sigma), Z_model =
  Z_H(-ln gamma), Z_H(0) = 2^n;
* hard-core (lambda <= 1): states are independent sets, H = |sigma|,
  Z_model = Z_H(-ln lambda) and Z_H(+inf) = 1 (the empty set).

In every case the Gibbs distribution of H at inverse temperature beta is
the model's own distribution with rescaled activities, so single-site
Glauber dynamics applies unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .core import HamiltonianHistogram
from .errors import (EnumerationBudgetError, InputFormatError,
                     UnsupportedParameterizationError)

ISING = "ising"
HARDCORE = "hardcore"

ENUMERATION_MAX_VERTICES = 24


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        for (u, v) in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int32)
        for (u, v) in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def csr(self) -> tuple:
        """(indptr int64, indices int32) adjacency in CSR layout."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.empty(max(indptr[-1], 1), dtype=np.int32)
        fill = indptr[:-1].copy()
        for (u, v) in self.edges:
            indices[fill[u]] = v
            fill[u] += 1
            indices[fill[v]] = u
            fill[v] += 1
        return indptr, indices[: indptr[-1]]

    @classmethod
    def from_edge_list_text(cls, text: str) -> "Graph":
        """Parse the "n m" header plus one "u v" line per edge."""
        rows = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
        rows = [(ln, s) for ln, s in rows if s]
        if not rows:
            raise InputFormatError("empty graph file")
        ln, header = rows[0]
        parts = header.split()
        if len(parts) != 2:
            raise InputFormatError('expected header "n m"', line=ln)
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputFormatError('expected integer header "n m"', line=ln)
        if n < 1 or m < 0:
            raise InputFormatError("need n >= 1 and m >= 0", line=ln)
        if len(rows) - 1 != m:
            raise InputFormatError(
                f"header promises {m} edges but file has {len(rows) - 1}",
                line=ln)
        edges = []
        for ln, s in rows[1:]:
            parts = s.split()
            if len(parts) != 2:
                raise InputFormatError('expected edge line "u v"', line=ln)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputFormatError('expected integer vertices "u v"', line=ln)
            try:
                cls(n, ((u, v),))
            except ValueError as exc:
                raise InputFormatError(str(exc), line=ln)
            edges.append((u, v))
        try:
            return cls(n, tuple(edges))
        except ValueError as exc:
            raise InputFormatError(str(exc))


@dataclass(frozen=True)
class ModelSpec:
    """Model kind plus activities; uniqueness is a diagnostic, never a gate."""

    kind: str
    gamma: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in (ISING, HARDCORE):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.gamma <= 0 or self.lam <= 0:
            raise ValueError("activities must be positive")

    def uniqueness_ok(self, graph: Graph) -> bool:
        d = graph.max_degree
        if d < 3:
            return True
        if self.kind == ISING:
            return (d - 2) / d < self.gamma < d / (d - 2)
        return self.lam <= (d - 1) ** (d - 1) / (d - 2) ** d


@dataclass(frozen=True)
class HamiltonianReduction:
    """A model rewritten as an integer-energy Gibbs family.

    ``ln Z_model = external_factor_log + log_trivial_endpoint
    + ratio_sign * ln Q`` where Q = Z_H(beta_max) / Z_H(beta_min).
    ``trivial`` marks the gamma = 1 Ising case where Q = 1 by definition
    and no sampling is needed.
    """

    graph: Graph
    spec: ModelSpec
    h: int
    beta_min: float
    beta_max: float
    external_factor_log: float
    log_trivial_endpoint: float
    ratio_sign: int
    trivial: bool = False

    def log_z_model(self, log_q_hat: float) -> float:
        return (self.external_factor_log + self.log_trivial_endpoint
                + self.ratio_sign * log_q_hat)

    # -- energy and dynamics -------------------------------------------------

    def hamiltonians_of_states(self, states: np.ndarray) -> np.ndarray:
        """H for each row of a (chains, n) 0/1 state matrix."""
        if self.spec.kind == HARDCORE:
            return states.sum(axis=1, dtype=np.int64)
        if not self.graph.edges:
            return np.zeros(states.shape[0], dtype=np.int64)
        eu = np.fromiter((e[0] for e in self.graph.edges), dtype=np.int64)
        ev = np.fromiter((e[1] for e in self.graph.edges), dtype=np.int64)
        mono = (states[:, eu] == states[:, ev]).sum(axis=1, dtype=np.int64)
        if self.spec.gamma > 1.0:
            return self.graph.m - mono
        return mono

    def conditional_table(self, beta: float) -> np.ndarray:
        """Occupation probabilities for single-site resampling at beta.

        Indexed by (vertex degree, occupied-neighbour count); encoding the
        rule as a table lets one kernel serve both models.
        """
        if math.isinf(beta):
            raise ValueError("Glauber dynamics needs finite beta; the +inf "
                             "endpoint is served by rejection from a cold "
                             "finite beta")
        d_max = self.graph.max_degree
        grid = np.arange(d_max + 1)
        if self.spec.kind == HARDCORE:
            lam_eff = math.exp(-beta)
            p_occ = lam_eff / (1.0 + lam_eff)
            table = np.zeros((d_max + 1, d_max + 1))
            table[:, 0] = p_occ
            return table
        # Ising at inverse temperature beta is the model with edge activity
        # gamma_eff = exp(+beta) (ferro reduction) or exp(-beta) (antiferro).
        log_gamma_eff = beta if self.spec.gamma > 1.0 else -beta
        exponent = (grid[:, None] - 2 * grid[None, :]) * log_gamma_eff
        with np.errstate(over="ignore"):
            table = 1.0 / (1.0 + np.exp(exponent))
        return table


def reduce_model(graph: Graph, spec: ModelSpec) -> HamiltonianReduction:
    """Fix the energy function and anneal endpoints for a model instance."""
    if spec.kind == ISING:
        if spec.lam != 1.0:
            raise UnsupportedParameterizationError(
                "Ising is supported only at vertex activity lambda = 1 "
                "(general lambda needs a two-parameter anneal)")
        n_ln2 = graph.n * math.log(2.0)
        if spec.gamma == 1.0:
            return HamiltonianReduction(
                graph, spec, h=graph.m, beta_min=0.0, beta_max=0.0,
                external_factor_log=0.0, log_trivial_endpoint=n_ln2,
                ratio_sign=+1, trivial=True)
        if spec.gamma > 1.0:
            beta_t = math.log(spec.gamma)
            return HamiltonianReduction(
                graph, spec, h=graph.m, beta_min=0.0, beta_max=beta_t,
                external_factor_log=graph.m * beta_t,
                log_trivial_endpoint=n_ln2, ratio_sign=+1)
        beta_t = -math.log(spec.gamma)
        return HamiltonianReduction(
            graph, spec, h=graph.m, beta_min=0.0, beta_max=beta_t,
            external_factor_log=0.0, log_trivial_endpoint=n_ln2,
            ratio_sign=+1)
    # hard-core
    if spec.lam > 1.0:
        raise UnsupportedParameterizationError(
            "hard-core is supported only at fugacity lambda <= 1 "
            "(lambda > 1 would need a negative starting temperature)")
    return HamiltonianReduction(
        graph, spec, h=graph.n, beta_min=-math.log(spec.lam),
        beta_max=math.inf, external_factor_log=0.0,
        log_trivial_endpoint=0.0, ratio_sign=-1)


# ---------------------------------------------------------------------------
# Exact enumeration (ground truth at desk scale)


def _require_enumerable(graph: Graph):
    if graph.n > ENUMERATION_MAX_VERTICES:
        raise EnumerationBudgetError(
            f"enumeration over 2^{graph.n} states exceeds the "
            f"2^{ENUMERATION_MAX_VERTICES} budget; use the Glauber sampler "
            "instead")


def enumerate_histogram(graph: Graph, spec: ModelSpec) -> HamiltonianHistogram:
    """Exact level counts of the reduction's H over the model's state space."""
    _require_enumerable(graph)
    reduce_model(graph, spec)  # reject unsupported parameterizations up front
    idx = np.arange(1 << graph.n, dtype=np.uint32)
    if spec.kind == HARDCORE:
        ok = np.ones(idx.shape, dtype=bool)
        for (u, v) in graph.edges:
            ok &= ((idx >> u) & (idx >> v) & 1) == 0
        occ = np.bitwise_count(idx)
        counts = np.bincount(occ[ok], minlength=graph.n + 1)
    else:
        mono = np.zeros(idx.shape, dtype=np.int16)
        for (u, v) in graph.edges:
            mono += ((((idx >> u) ^ (idx >> v)) & 1) == 0)
        energy = graph.m - mono if spec.gamma > 1.0 else mono
        counts = np.bincount(energy, minlength=graph.m + 1)
    del idx
    return HamiltonianHistogram.from_counts(counts.tolist())


def enumerate_log_z_model(graph: Graph, spec: ModelSpec) -> float:
    """ln Z of the model itself by direct enumeration (independent of the
    reduction; used to cross-check it)."""
    _require_enumerable(graph)
    from scipy.special import logsumexp

    idx = np.arange(1 << graph.n, dtype=np.uint32)
    occ = np.bitwise_count(idx).astype(np.float64)
    if spec.kind == HARDCORE:
        ok = np.ones(idx.shape, dtype=bool)
        for (u, v) in graph.edges:
            ok &= ((idx >> u) & (idx >> v) & 1) == 0
        return float(logsumexp(math.log(spec.lam) * occ[ok]))
    mono = np.zeros(idx.shape, dtype=np.int16)
    for (u, v) in graph.edges:
        mono += ((((idx >> u) ^ (idx >> v)) & 1) == 0)
    logw = math.log(spec.gamma) * mono.astype(np.float64)
    logw += math.log(spec.lam) * occ
    return float(logsumexp(logw))


# ---------------------------------------------------------------------------
# Glauber dynamics


def default_burn_in(n: int) -> int:
    """Tested default: 50 * n * ceil(ln n + 1) single-site steps."""
    return 50 * n * math.ceil(math.log(n) + 1.0) if n > 1 else 50


def run_chains(reduction: HamiltonianReduction, beta: float, steps: int,
               chains: int, rng: np.random.Generator) -> np.ndarray:
    """Advance ``chains`` independent chains ``steps`` single-site updates
    from the all-zero configuration; returns the (chains, n) end states."""
    graph = reduction.graph
    indptr, indices = graph.csr
    table = reduction.conditional_table(beta)
    states = np.zeros((chains, graph.n), dtype=np.uint8)
    if steps > 0 and chains > 0:
        vidx = rng.integers(0, graph.n, size=(chains, steps), dtype=np.int32)
        u = rng.random((chains, steps))
        kernels.run_glauber_chains(indptr, indices, graph.degrees, table,
                                   states, vidx, u)
    return states


def glauber_step(state: np.ndarray, reduction: HamiltonianReduction,
                 beta: float, rng: np.random.Generator) -> np.ndarray:
    """One single-site update of one configuration; returns the new state."""
    graph = reduction.graph
    indptr, indices = graph.csr
    table = reduction.conditional_table(beta)
    out = np.ascontiguousarray(state, dtype=np.uint8).reshape(1, graph.n).copy()
    vidx = rng.integers(0, graph.n, size=(1, 1), dtype=np.int32)
    u = rng.random((1, 1))
    kernels.run_glauber_chains(indptr, indices, graph.degrees, table,
                               out, vidx, u)
    return out[0]


def sample_mcmc(reduction: HamiltonianReduction, beta: float, burn_in: int,
                rng: np.random.Generator) -> np.ndarray:
    """One approximate sample of pi_beta: burn_in steps from all-zero."""
    return run_chains(reduction, beta, burn_in, 1, rng)[0]


def glauber_transition_matrix(reduction: HamiltonianReduction,
                              beta: float) -> tuple:
    """Explicit single-step kernel over the full state space (desk scale).

    Returns (states, P, pi): the list of valid configurations, the
    transition matrix of one Glauber update, and the exact stationary
    distribution.  Used to check detailed balance.
    """
    graph = reduction.graph
    if graph.n > 12:
        raise EnumerationBudgetError("explicit transition matrix needs n <= 12")
    n = graph.n
    masks = range(1 << n)
    if reduction.spec.kind == HARDCORE:
        def valid(mask):
            return all(not ((mask >> u) & (mask >> v) & 1)
                       for (u, v) in graph.edges)
        states = [m for m in masks if valid(m)]
    else:
        states = list(masks)
    index = {m: i for i, m in enumerate(states)}
    nbrs = [[] for _ in range(n)]
    for (u, v) in graph.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    table = reduction.conditional_table(beta)
    size = len(states)
    P = np.zeros((size, size))
    for i, mask in enumerate(states):
        for v in range(n):
            a1 = sum((mask >> w) & 1 for w in nbrs[v])
            p1 = table[len(nbrs[v]), a1]
            m1 = mask | (1 << v)
            m0 = mask & ~(1 << v)
            if p1 > 0.0:
                P[i, index[m1]] += p1 / n
            P[i, index[m0]] += (1.0 - p1) / n

    state_mat = np.array([[(m >> v) & 1 for v in range(n)] for m in states],
                         dtype=np.uint8)
    energy = reduction.hamiltonians_of_states(state_mat).astype(np.float64)
    logpi = -beta * energy
    logpi -= logpi.max()
    pi = np.exp(logpi)
    pi /= pi.sum()
    return states, P, pi
