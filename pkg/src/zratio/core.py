"""Domain types and exact reference mathematics for Gibbs partition functions.

The central object is an energy histogram: the counts ``c_i`` of states at
each integer energy level ``i`` in ``0..h``.  The histogram determines the
partition function in closed form,

    Z(beta) = sum_i c_i * exp(-i * beta),

which gives both the production log-space arithmetic and the brute-force
oracles that the statistical tests compare against.  All Z arithmetic is
done on ``ln Z`` because Z spans ``e^q`` ranges and q can run to hundreds.

``beta`` is an ordinary float throughout; ``math.inf`` is the fully cold
endpoint and serializes as the token ``"inf"`` in every text format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import EmptyGroundStateError, InputFormatError

Beta = float

NEG_INF = float("-inf")


def validate_beta(beta: float, *, name: str = "beta") -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 0.0:
        raise ValueError(f"{name} must be >= 0 or +inf, got {beta!r}")
    return beta


def format_beta(beta: float):
    """JSON-safe form: finite floats pass through, +inf becomes "inf"."""
    return "inf" if math.isinf(beta) else float(beta)


def parse_beta(token, *, name: str = "beta") -> float:
    if isinstance(token, str):
        if token.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        try:
            token = float(token)
        except ValueError:
            raise ValueError(f"cannot parse {name} from {token!r}") from None
    return validate_beta(token, name=name)


# ---------------------------------------------------------------------------
# Cost accounting


@dataclass(frozen=True)
class CostMetrics:
    """Work/depth accounting for one estimation run.

    ``total_samples`` counts oracle calls, ``oracle_rounds`` counts adaptive
    rounds (batches whose contents may depend on earlier batches), and
    ``reduction_depth`` is the longest chain of dependent combine steps in
    the estimator's reduction trees.
    """

    total_samples: int = 0
    oracle_rounds: int = 0
    reduction_depth: int = 0
    schedule_length: int = 0

    def __post_init__(self):
        for name in ("total_samples", "oracle_rounds", "reduction_depth",
                     "schedule_length"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.total_samples >= 1 and self.oracle_rounds < 1:
            raise ValueError("samples were drawn outside any oracle round")

    def to_json_obj(self) -> dict:
        return {
            "total_samples": self.total_samples,
            "oracle_rounds": self.oracle_rounds,
            "reduction_depth": self.reduction_depth,
            "schedule_length": self.schedule_length,
        }


@dataclass(frozen=True)
class RatioEstimate:
    """An estimate of ln(Z(beta_max) / Z(beta_min)) plus its cost metrics."""

    log_q_hat: float
    metrics: CostMetrics


# ---------------------------------------------------------------------------
# Log-space scalar


@dataclass(frozen=True)
class LogValue:
    """A non-negative quantity stored as its natural log.

    Multiplication and division are addition and subtraction of logs;
    ``sum`` uses max-shifted accumulation.  Exact zero is representable via
    ``is_zero`` so that an estimator whose every weight underflowed stays
    distinguishable from a tiny positive value.
    """

    log: float
    is_zero: bool = False

    @classmethod
    def of(cls, x: float) -> "LogValue":
        if x < 0:
            raise ValueError("LogValue represents non-negative quantities")
        if x == 0:
            return cls(NEG_INF, True)
        return cls(math.log(x))

    @classmethod
    def from_log(cls, log: float) -> "LogValue":
        return cls(float(log))

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.is_zero or other.is_zero:
            return LogValue(NEG_INF, True)
        return LogValue(self.log + other.log)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.is_zero:
            raise ZeroDivisionError("division by exact-zero LogValue")
        if self.is_zero:
            return LogValue(NEG_INF, True)
        return LogValue(self.log - other.log)

    def to_float(self) -> float:
        return 0.0 if self.is_zero else math.exp(self.log)

    @staticmethod
    def sum(values: "list[LogValue]") -> "LogValue":
        logs = [v.log for v in values if not v.is_zero]
        if not logs:
            return LogValue(NEG_INF, True)
        m = max(logs)
        if math.isinf(m):
            return LogValue(m)
        return LogValue(m + math.log(math.fsum(math.exp(x - m) for x in logs)))


# ---------------------------------------------------------------------------
# Energy histogram


def _log_counts(counts) -> np.ndarray:
    out = np.full(len(counts), NEG_INF)
    for i, c in enumerate(counts):
        if c > 0:
            out[i] = math.log(c)  # handles arbitrary-size ints
    return out


@dataclass(frozen=True)
class HamiltonianHistogram:
    """Exact level counts ``c_i = |{x : H(x) = i}|`` for an energy function.

    ``h`` is always at least 2: narrower inputs are padded with zero counts,
    which changes nothing about the distribution but keeps the schedule
    formulas free of ``ln h`` singularities.
    """

    counts: tuple
    log_counts: np.ndarray = field(repr=False, compare=False)
    total: int = field(compare=False)

    @classmethod
    def from_counts(cls, counts) -> "HamiltonianHistogram":
        counts = [int(c) for c in counts]
        if not counts:
            raise ValueError("histogram needs at least one count")
        if any(c < 0 for c in counts):
            raise ValueError("histogram counts must be non-negative")
        total = sum(counts)
        if total < 1:
            raise ValueError("histogram must contain at least one state")
        while len(counts) < 3:  # enforce h >= 2
            counts.append(0)
        counts = tuple(counts)
        return cls(counts=counts, log_counts=_log_counts(counts), total=total)

    @property
    def h(self) -> int:
        return len(self.counts) - 1

    @property
    def q(self) -> float:
        """ln of the total state count."""
        return math.log(self.total)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.h + 1, dtype=np.float64)

    def is_constant(self) -> bool:
        """True when all mass sits at H = 0, i.e. Z(beta) does not move."""
        return self.counts[0] == self.total

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json_text(cls, text: str) -> "HamiltonianHistogram":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON: {exc}", line=exc.lineno)
        if not isinstance(obj, dict) or "counts" not in obj:
            raise InputFormatError('expected a JSON object {"counts": [...]}')
        counts = obj["counts"]
        if (not isinstance(counts, list) or not counts
                or not all(isinstance(c, int) for c in counts)):
            raise InputFormatError('"counts" must be a non-empty integer array')
        try:
            return cls.from_counts(counts)
        except ValueError as exc:
            raise InputFormatError(str(exc))

    def to_json_obj(self) -> dict:
        return {"counts": list(self.counts)}


# ---------------------------------------------------------------------------
# Exact reference mathematics


def z_exact(hist: HamiltonianHistogram, beta: float) -> float:
    """ln Z(beta), computed in log space from the histogram.

    At beta = +inf only ground states survive, so the value is ln c_0;
    a histogram with c_0 = 0 has no cold endpoint and raises.
    """
    beta = validate_beta(beta)
    if math.isinf(beta):
        if hist.counts[0] == 0:
            raise EmptyGroundStateError(
                "Z(+inf) undefined: histogram has no states at H = 0")
        return float(hist.log_counts[0])
    return float(logsumexp(hist.log_counts - beta * hist.levels))


def z_exact_many(hist: HamiltonianHistogram, betas) -> np.ndarray:
    """Vectorized ``z_exact`` over an array of betas (inf entries allowed)."""
    betas = np.asarray(betas, dtype=np.float64)
    out = np.empty(betas.shape, dtype=np.float64)
    finite = np.isfinite(betas)
    if not finite.all():
        if hist.counts[0] == 0:
            raise EmptyGroundStateError(
                "Z(+inf) undefined: histogram has no states at H = 0")
        out[~finite] = hist.log_counts[0]
    if finite.any():
        exponents = hist.log_counts[None, :] \
            - betas[finite, None] * hist.levels[None, :]
        out[finite] = logsumexp(exponents, axis=1)
    return out


def _level_weights(hist: HamiltonianHistogram, beta: float) -> np.ndarray:
    """Gibbs probabilities of each energy level at finite beta."""
    logw = hist.log_counts - beta * hist.levels
    logw -= logsumexp(logw)
    return np.exp(logw)


def gibbs_pmf(hist: HamiltonianHistogram, beta: float) -> np.ndarray:
    """Exact distribution of H(X) for X ~ pi_beta (point mass at 0 for +inf)."""
    beta = validate_beta(beta)
    if math.isinf(beta):
        if hist.counts[0] == 0:
            raise EmptyGroundStateError(
                "pi_inf undefined: histogram has no states at H = 0")
        pmf = np.zeros(hist.h + 1)
        pmf[0] = 1.0
        return pmf
    return _level_weights(hist, beta)


def z_prime_exact(hist: HamiltonianHistogram, beta: float) -> float:
    """z'(beta) = -E[H] under pi_beta; always in [-h, 0]."""
    beta = validate_beta(beta)
    if math.isinf(beta):
        raise ValueError("z' requires finite beta")
    w = _level_weights(hist, beta)
    return float(-(w * hist.levels).sum())


def z_second_exact(hist: HamiltonianHistogram, beta: float) -> float:
    """z''(beta) = Var[H] under pi_beta; always >= 0."""
    beta = validate_beta(beta)
    if math.isinf(beta):
        raise ValueError("z'' requires finite beta")
    w = _level_weights(hist, beta)
    m1 = (w * hist.levels).sum()
    m2 = (w * hist.levels ** 2).sum()
    return float(max(m2 - m1 * m1, 0.0))


def log_srel_exact(hist: HamiltonianHistogram, beta_from: float,
                   beta_to: float) -> float:
    """ln of the relative second moment of the one-step product-estimator
    weight W = exp[(beta_from - beta_to) H(X)], X ~ pi_{beta_from}.

    Equal endpoints give a constant weight, hence exactly 0.
    """
    beta_from = validate_beta(beta_from, name="beta_from")
    beta_to = validate_beta(beta_to, name="beta_to")
    if beta_from > beta_to:
        raise ValueError("beta_from must not exceed beta_to")
    if beta_from == beta_to:
        return 0.0
    mirrored = 2.0 * beta_to - beta_from  # = +inf when beta_to is
    return (z_exact(hist, mirrored) + z_exact(hist, beta_from)
            - 2.0 * z_exact(hist, beta_to))


def srel_exact(hist: HamiltonianHistogram, beta_from: float,
               beta_to: float) -> float:
    """S_rel[W] = Z(2*beta_to - beta_from) * Z(beta_from) / Z(beta_to)^2."""
    return math.exp(log_srel_exact(hist, beta_from, beta_to))


# ---------------------------------------------------------------------------
# Exact sampling of H(X)


def level_alias_table(hist: HamiltonianHistogram, beta: float) -> tuple:
    """Alias table of the level distribution (one uniform per exact draw)."""
    from . import kernels  # deferred: kernels may pull in the extension

    return kernels.build_alias_table(gibbs_pmf(hist, beta))


def sample_hamiltonians(hist: HamiltonianHistogram, beta: float, count: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` values of H(X) with X ~ pi_beta, exactly."""
    from . import kernels

    beta = validate_beta(beta)
    if count < 0:
        raise ValueError("count must be non-negative")
    if math.isinf(beta):
        if hist.counts[0] == 0:
            raise EmptyGroundStateError(
                "cannot sample at +inf: histogram has no states at H = 0")
        return np.zeros(count, dtype=np.int32)
    prob, alias = level_alias_table(hist, beta)
    return kernels.sample_alias(prob, alias, rng.random(count))


def exact_sample(hist: HamiltonianHistogram, beta: float,
                 rng: np.random.Generator) -> int:
    """Single draw of H(X), X ~ pi_beta."""
    return int(sample_hamiltonians(hist, beta, 1, rng)[0])
