"""Sampling oracles: batched, non-adaptive access to Gibbs samples.

An oracle serves one cooling schedule.  Callers submit a *round*: a list of
requests, each naming a schedule temperature, a sample count, and a stream
key (phase tag + replicate offset).  All samples of a round are mutually
independent as long as the stream keys are disjoint, and every batch is a
pure function of (seed, namespace, phase, temperature index, offset), so
results do not depend on the number of workers or their interleaving.

Two backends exist: the histogram oracle samples H(X) exactly from the
closed-form level distribution; the model oracle runs Glauber chains and
reports H of the final configurations.  Only the exact backend carries
statistical guarantees; the Glauber backend's bias is controlled by its
burn-in and is quantified by the verification battery, not proven.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels, models, rng
from .core import HamiltonianHistogram, level_alias_table
from .errors import SamplingBudgetError, StreamKeyConflictError
from .schedule import CoolingSchedule

# chains per kernel call are sized so the per-chunk random arrays stay small
_CHUNK_BYTES = 64 * 1024 * 1024
_BYTES_PER_STEP = 12  # 8 (uniform) + 4 (vertex index)


@dataclass(frozen=True)
class OracleRequest:
    """One batch of samples at one schedule temperature.

    ``(phase, temp_index, offset)`` keys the random stream; requests in a
    round must not overlap in replicate range within the same phase and
    temperature, or their samples would be identical rather than
    independent.
    """

    temp_index: int
    count: int
    phase: str
    offset: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("request count must be >= 1")
        if self.temp_index < 0:
            raise ValueError("temperature index must be >= 0")
        if self.offset < 0:
            raise ValueError("replicate offset must be >= 0")


@dataclass(frozen=True)
class OracleBatchResult:
    """Hamiltonian values of one request's samples, in draw order."""

    hamiltonian_values: np.ndarray


class SamplingOracle:
    """Base class: request validation, worker dispatch, cost accounting."""

    def __init__(self, schedule: CoolingSchedule, seed: int, *,
                 workers: int = 1, namespace: str = ""):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.schedule = schedule
        self.seed = int(seed)
        self.workers = workers
        self.namespace = namespace
        self._lock = threading.Lock()
        self.total_samples = 0
        self.oracle_rounds = 0

    # -- subclass hooks ------------------------------------------------------

    @property
    def h(self) -> int:
        raise NotImplementedError

    def _draw(self, req: OracleRequest) -> np.ndarray:
        raise NotImplementedError

    def _stream(self, req: OracleRequest, *, phase_suffix: str = "",
                extra_offset: int = 0) -> np.random.Generator:
        return rng.stream(self.seed, self.namespace + req.phase + phase_suffix,
                          req.temp_index, req.offset + extra_offset)

    def beta_of(self, temp_index: int) -> float:
        return self.schedule.betas[temp_index]

    # -- the round protocol --------------------------------------------------

    def request_round(self, requests) -> list:
        """Serve one non-adaptive round; increments oracle_rounds by one
        (zero for an empty round)."""
        requests = list(requests)
        if not requests:
            return []
        self._validate(requests)

        results: list = [None] * len(requests)

        def serve(i: int):
            values = self._draw(requests[i])
            if values.size and (values.min() < 0 or values.max() > self.h):
                raise AssertionError("backend produced H outside [0, h]")
            results[i] = OracleBatchResult(values)

        if self.workers > 1 and len(requests) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                list(pool.map(serve, range(len(requests))))
        else:
            for i in range(len(requests)):
                serve(i)

        with self._lock:
            self.oracle_rounds += 1
            self.total_samples += sum(r.count for r in requests)
        return results

    def _validate(self, requests):
        by_key: dict = {}
        for req in requests:
            if req.temp_index >= len(self.schedule):
                raise ValueError(
                    f"temperature index {req.temp_index} outside schedule of "
                    f"length {len(self.schedule)}")
            by_key.setdefault((req.phase, req.temp_index), []).append(
                (req.offset, req.offset + req.count))
        for (phase, temp), spans in by_key.items():
            spans.sort()
            for (a0, a1), (b0, _) in zip(spans, spans[1:]):
                if b0 < a1:
                    raise StreamKeyConflictError(
                        f"overlapping replicate ranges for phase {phase!r} at "
                        f"temperature {temp}: [{a0}, {a1}) and [{b0}, ...)")


class HistogramOracle(SamplingOracle):
    """Exact sampler of the level distribution c_i e^(-i beta) / Z(beta)."""

    def __init__(self, hist: HamiltonianHistogram, schedule: CoolingSchedule,
                 seed: int, *, workers: int = 1, namespace: str = ""):
        super().__init__(schedule, seed, workers=workers, namespace=namespace)
        self.hist = hist
        self._tables: dict = {}

    @property
    def h(self) -> int:
        return self.hist.h

    def _table(self, temp_index: int) -> tuple:
        table = self._tables.get(temp_index)
        if table is None:
            table = level_alias_table(self.hist, self.beta_of(temp_index))
            with self._lock:
                self._tables.setdefault(temp_index, table)
        return table

    def _draw(self, req: OracleRequest) -> np.ndarray:
        beta = self.beta_of(req.temp_index)
        gen = self._stream(req)
        if math.isinf(beta):
            if self.hist.counts[0] == 0:
                from .errors import EmptyGroundStateError

                raise EmptyGroundStateError(
                    "cannot serve +inf: histogram has no ground states")
            return np.zeros(req.count, dtype=np.int32)
        prob, alias = self._table(req.temp_index)
        return kernels.sample_alias(prob, alias, gen.random(req.count))


@dataclass(frozen=True)
class McmcConfig:
    """Glauber-backend knobs.

    ``burn_in = None`` selects the default 50 * n * ceil(ln n + 1) steps.
    The +inf endpoint is served by sampling at ``cold_beta_margin`` past
    q_bar and rejecting until H = 0; ``attempt_budget`` caps the total
    chains spent on that rejection before giving up.
    """

    burn_in: int | None = None
    attempt_budget: int = 1_000_000
    cold_beta_margin: float = 40.0


class ModelOracle(SamplingOracle):
    """Glauber-dynamics sampler for a model reduction."""

    def __init__(self, reduction: models.HamiltonianReduction,
                 schedule: CoolingSchedule, seed: int, *,
                 mcmc: McmcConfig | None = None, q_bar: float | None = None,
                 workers: int = 1, namespace: str = ""):
        super().__init__(schedule, seed, workers=workers, namespace=namespace)
        self.reduction = reduction
        self.mcmc = mcmc or McmcConfig()
        n = reduction.graph.n
        self.burn_in = (self.mcmc.burn_in if self.mcmc.burn_in is not None
                        else models.default_burn_in(n))
        self.q_bar = q_bar if q_bar is not None else n * math.log(2.0)

    @property
    def h(self) -> int:
        return self.reduction.h

    def _chunk_rows(self) -> int:
        per_row = max(self.burn_in, 1) * _BYTES_PER_STEP
        return max(1, _CHUNK_BYTES // per_row)

    def _chains(self, beta: float, count: int, req: OracleRequest, *,
                phase_suffix: str = "") -> np.ndarray:
        """H values of ``count`` independent chains at finite beta."""
        out = np.empty(count, dtype=np.int64)
        chunk = self._chunk_rows()
        for start in range(0, count, chunk):
            stop = min(start + chunk, count)
            gen = self._stream(req, phase_suffix=phase_suffix,
                               extra_offset=start)
            states = models.run_chains(self.reduction, beta, self.burn_in,
                                       stop - start, gen)
            out[start:stop] = self.reduction.hamiltonians_of_states(states)
        return out

    def _draw(self, req: OracleRequest) -> np.ndarray:
        beta = self.beta_of(req.temp_index)
        if not math.isinf(beta):
            return self._chains(beta, req.count, req).astype(np.int32)
        # +inf endpoint: ground states via rejection from a very cold beta,
        # where non-ground mass is at most e^(-margin).
        cold = self.q_bar + self.mcmc.cold_beta_margin
        values = self._chains(cold, req.count, req)
        attempts = req.count
        retry = 0
        while (values > 0).any():
            bad = int((values > 0).sum())
            if attempts + bad > self.mcmc.attempt_budget:
                raise SamplingBudgetError(
                    f"+inf rejection exhausted its budget of "
                    f"{self.mcmc.attempt_budget} chains")
            retry += 1
            redraw = self._chains(cold, bad, req,
                                  phase_suffix=f"#retry{retry}")
            values[values > 0] = redraw
            attempts += bad
        return values.astype(np.int32)


def oracle_from_histogram(hist: HamiltonianHistogram,
                          schedule: CoolingSchedule, seed: int, *,
                          workers: int = 1,
                          namespace: str = "") -> HistogramOracle:
    return HistogramOracle(hist, schedule, seed, workers=workers,
                           namespace=namespace)


def histogram_oracle_factory(hist: HamiltonianHistogram, seed: int, *,
                             workers: int = 1):
    """Annealer-shaped factory: (schedule, namespace) -> oracle."""

    def make(schedule: CoolingSchedule, namespace: str = "") -> HistogramOracle:
        return HistogramOracle(hist, schedule, seed, workers=workers,
                               namespace=namespace)

    return make


def model_oracle_factory(reduction: models.HamiltonianReduction, seed: int, *,
                         mcmc: McmcConfig | None = None,
                         q_bar: float | None = None, workers: int = 1):
    """Annealer-shaped factory for the Glauber backend."""

    def make(schedule: CoolingSchedule, namespace: str = "") -> ModelOracle:
        return ModelOracle(reduction, schedule, seed, mcmc=mcmc, q_bar=q_bar,
                           workers=workers, namespace=namespace)

    return make


def oracle_from_model(reduction: models.HamiltonianReduction,
                      schedule: CoolingSchedule, seed: int, *,
                      mcmc: McmcConfig | None = None,
                      q_bar: float | None = None, workers: int = 1,
                      namespace: str = "") -> ModelOracle:
    return ModelOracle(reduction, schedule, seed, mcmc=mcmc, q_bar=q_bar,
                       workers=workers, namespace=namespace)
