"""Non-adaptive cooling schedules.

Construction happens in three pure steps:

1. ``build_base_schedule``: a linear ramp of pitch 1/(h*L) up to k/(h*L),
   then multiplicative steps by gamma = 1 + 1/q_bar, then +inf.  Linear
   steps drop ln Z by at most 1/L, the others by at most 2, where
   L = max(ln h, 1).
2. ``refine_schedule``: extra temperatures inside each multiplicative
   interval so that, by convexity of ln Z, every interior step drops ln Z
   by at most 1/L; only the final jump to +inf keeps the bound of 2.
3. ``truncate_schedule``: restriction to a requested [beta_min, beta_max].

All three depend only on (q_bar, h), never on the histogram itself, and
identical parameters produce bit-identical schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .core import format_beta, validate_beta

TAG_LINEAR = "linear"
TAG_INFINITY = "infinity"
TAG_ENDPOINT = "truncation-endpoint"


def tag_exp_boundary(i: int) -> str:
    return f"exp-boundary:{i}"


def tag_refinement(i: int, j: int) -> str:
    return f"refine:{i}:{j}"


def log_h_floor(h: int) -> float:
    """The clamped log L(h) = max(ln h, 1) used everywhere in place of ln h."""
    return max(math.log(h), 1.0)


@dataclass(frozen=True)
class ScheduleParameters:
    """Inputs of the schedule construction.

    ``q_bar`` is any upper bound on ln|Omega|; every gap bound is monotone
    in it, so overshooting only makes the schedule finer.  Values below 0.5
    are rejected because the first-interval refinement bound needs
    ceil(q_bar)/q_bar <= 2.
    """

    q_bar: float
    h: int

    def __post_init__(self):
        if not (self.q_bar >= 0.5 and math.isfinite(self.q_bar)):
            raise ValueError("q_bar must be finite and >= 0.5")
        if self.h < 2:
            raise ValueError("h must be >= 2 (pad narrower histograms)")

    @property
    def k(self) -> int:
        return math.ceil(self.q_bar)

    @property
    def gamma(self) -> float:
        return 1.0 + 1.0 / self.q_bar

    @property
    def t(self) -> int:
        # ln(h * L(h)) = ln h + ln ln h for h >= 3 and ln h for h = 2; the
        # clamp keeps gamma^t >= h * L(h), which is what guarantees the
        # last finite temperature reaches q_bar and the final jump to +inf
        # drops ln Z by at most 2.
        exponent = math.log(self.h) + max(math.log(math.log(self.h)), 0.0)
        return math.ceil((1.0 + self.q_bar) * exponent)

    @property
    def segments_r(self) -> int:
        return max(math.ceil(2.0 * math.log(self.h)), 2)

    @property
    def log_h(self) -> float:
        return log_h_floor(self.h)

    def length_bound(self) -> float:
        """The guaranteed cap on the refined untruncated length."""
        return 25.0 * self.q_bar * self.log_h ** 2 + 4.0


@dataclass(frozen=True)
class CoolingSchedule:
    """A strictly increasing sequence of inverse temperatures with per-entry
    provenance tags."""

    betas: tuple
    tags: tuple

    def __post_init__(self):
        if len(self.betas) != len(self.tags):
            raise ValueError("betas and tags must align")
        if not self.betas:
            raise ValueError("schedule cannot be empty")
        for b in self.betas:
            validate_beta(b)
        for a, b in zip(self.betas, self.betas[1:]):
            if not a < b:
                raise ValueError("schedule must be strictly increasing")

    def __len__(self) -> int:
        return len(self.betas)

    @cached_property
    def array(self):
        import numpy as np

        return np.asarray(self.betas, dtype=np.float64)

    def to_json_obj(self) -> dict:
        return {
            "betas": [format_beta(b) for b in self.betas],
            "annotations": list(self.tags),
        }


def build_base_schedule(params: ScheduleParameters) -> CoolingSchedule:
    """The linear-then-multiplicative ladder, length k + t + 2."""
    h_l = params.h * params.log_h
    betas = [j / h_l for j in range(params.k + 1)]
    tags = [TAG_LINEAR] * (params.k + 1)
    eta0 = params.k / h_l
    for i in range(1, params.t + 1):
        betas.append(eta0 * params.gamma ** i)
        tags.append(tag_exp_boundary(i))
    betas.append(math.inf)
    tags.append(TAG_INFINITY)
    return CoolingSchedule(tuple(betas), tuple(tags))


def refine_schedule(base: CoolingSchedule,
                    params: ScheduleParameters) -> CoolingSchedule:
    """Insert interpolation points into the multiplicative intervals.

    The first interval gets its midpoint.  For i >= 2 the pitch is inherited
    from the previous interval, delta_i = (eta_{i-1} - eta_{i-2}) / r with
    r = ceil(2 ln h): the previous interval's total drop is at most 2, its
    last segment of length delta therefore drops at most 2/r <= 1/ln h, and
    by convexity every delta-step to the right of it drops no more.
    """
    etas = [base.betas[params.k + i] for i in range(0, params.t + 1)]

    betas = list(base.betas[: params.k + 1])
    tags = list(base.tags[: params.k + 1])
    r = params.segments_r
    for i in range(1, params.t + 1):
        lo, hi = etas[i - 1], etas[i]
        if i == 1:
            inner = [(lo + hi) / 2.0]
        else:
            delta = (etas[i - 1] - etas[i - 2]) / r
            npts = math.ceil((hi - lo) / delta) - 1
            inner = [lo + j * delta for j in range(1, npts + 1)]
            # float guard: arithmetic noise must not push a point onto or
            # past the right boundary
            inner = [b for b in inner if lo < b < hi]
        for j, b in enumerate(inner, start=1):
            betas.append(b)
            tags.append(tag_refinement(i, j))
        betas.append(hi)
        tags.append(tag_exp_boundary(i))
    betas.append(math.inf)
    tags.append(TAG_INFINITY)
    return CoolingSchedule(tuple(betas), tuple(tags))


def build_refined_schedule(params: ScheduleParameters) -> CoolingSchedule:
    """Convenience: base construction plus refinement."""
    return refine_schedule(build_base_schedule(params), params)


def truncate_schedule(sched: CoolingSchedule, beta_min: float,
                      beta_max: float) -> CoolingSchedule:
    """Restrict to [beta_min, beta_max], keeping interior entries.

    The endpoints are always present in the result; an interior entry equal
    to an endpoint is not duplicated.  Comparisons are exact (no epsilon):
    the construction arithmetic is deterministic, so equality is
    well-defined.
    """
    beta_min = validate_beta(beta_min, name="beta_min")
    beta_max = validate_beta(beta_max, name="beta_max")
    if not beta_min < beta_max:
        raise ValueError(
            f"invalid range: beta_min={beta_min!r} must be < beta_max={beta_max!r}")

    interior = [(b, tag) for b, tag in zip(sched.betas, sched.tags)
                if beta_min <= b <= beta_max]
    entries = []
    if not interior or interior[0][0] != beta_min:
        entries.append((beta_min, TAG_ENDPOINT))
    entries.extend(interior)
    if entries[-1][0] != beta_max:
        entries.append((beta_max, TAG_ENDPOINT))
    betas, tags = zip(*entries)
    return CoolingSchedule(betas, tags)
