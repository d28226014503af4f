"""Verification battery: executable form of the package's statistical and
structural guarantees.

Each suite checks one guarantee end to end (schedule gap bounds, exact
moment identities, search bracket validity, end-to-end accuracy, cost
metrics, sampler sanity, determinism) and returns a SuiteResult with one
line per sub-check.  The CLI ``verify`` subcommand and the acceptance test
module both run these; they are the single source of truth for what
"working" means.

Default trial counts are the full gate; pass ``trials`` to scale a suite
down for a quick look or up for more confidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .annealer import (AnnealConfig, boost_runs, build_truncated_schedule,
                       estimate_ratio, estimate_ratio_boosted, one_round_plan,
                       replicate_counts)
from .core import (HamiltonianHistogram, gibbs_pmf, z_exact, z_exact_many,
                   z_prime_exact)
from .estimators import ceil_log2, kappa_diagnostics
from .models import (Graph, ModelSpec, default_burn_in, enumerate_histogram,
                     glauber_transition_matrix, reduce_model, run_chains)
from .noisyfind import NoisyFindConfig, noisy_find, probe_count
from .oracles import histogram_oracle_factory, oracle_from_histogram
from .schedule import ScheduleParameters, build_refined_schedule, log_h_floor

GAP_TOL = 1e-9
MOMENT_RTOL = 1e-10
LEMMA_TOL = 1e-9
KAPPA_CAP = 0.5 + math.log(4.0)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list = field(default_factory=list)

    def line(self, ok: bool, text: str):
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  {text}")
        self.passed = self.passed and ok


def _result(name: str) -> SuiteResult:
    return SuiteResult(name=name, passed=True)


# ---------------------------------------------------------------------------
# Shared instance zoo


def random_histogram(gen: np.random.Generator, *, h_max: int = 64,
                     q_bar_max: float = 14.0, total_max: int = 10 ** 6,
                     require_ground: bool = True):
    """A random level histogram plus a valid construction bound q_bar.

    Shapes vary (flat, decaying, spiky) so the checks see both smooth and
    adversarial level profiles; q never exceeds q_bar.
    """
    h = int(gen.integers(2, h_max + 1))
    q_bar = float(gen.uniform(1.0, q_bar_max))
    cap = min(total_max, int(math.floor(math.exp(q_bar))))
    total = int(gen.integers(1, cap + 1))
    style = int(gen.integers(0, 4))
    if style == 0:
        w = gen.dirichlet(np.ones(h + 1))
    elif style == 1:
        w = np.exp(-gen.uniform(0.05, 2.0) * np.arange(h + 1))
    elif style == 2:
        w = gen.random(h + 1) ** 4  # spiky
    else:
        w = np.ones(h + 1)
    w = w / w.sum()
    counts = gen.multinomial(total, w)
    if require_ground and counts[0] == 0:
        counts[int(np.argmax(counts))] -= 1
        counts[0] += 1
        if counts.sum() == 0:
            counts[0] = 1
    if counts.sum() == 0:
        counts[0] = total = 1
    hist = HamiltonianHistogram.from_counts(counts.tolist())
    q_bar = max(q_bar, hist.q, 1.0)
    return hist, q_bar


RAND4_GRAPH = Graph(4, ((0, 1), (1, 2), (2, 3), (0, 2)))
RAND12_EDGES = ((0, 3), (0, 9), (0, 10), (1, 8), (1, 11), (3, 5), (3, 9),
                (4, 8), (4, 11), (5, 8), (6, 8), (7, 11), (8, 9), (10, 11))
RAND12_GRAPH = Graph(12, RAND12_EDGES)


def end_to_end_instances():
    """(name, graph, spec) for the accuracy gate: the named tiny models plus
    frozen random graphs, covering both models and all three branches of
    the main algorithm."""
    return [
        ("hardcore-P3", Graph(3, ((0, 1), (1, 2))), ModelSpec("hardcore", lam=0.5)),
        ("hardcore-K2", Graph(2, ((0, 1),)), ModelSpec("hardcore", lam=0.5)),
        ("ising-K2", Graph(2, ((0, 1),)), ModelSpec("ising", gamma=2.0)),
        ("ising-C4", Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0))),
         ModelSpec("ising", gamma=2.0)),
        ("hardcore-rand4", RAND4_GRAPH, ModelSpec("hardcore", lam=0.5)),
        ("ising-rand12", RAND12_GRAPH, ModelSpec("ising", gamma=1.2)),
    ]


def exact_instance(graph: Graph, spec: ModelSpec):
    """(histogram, reduction, true log ratio) for an enumerable model."""
    hist = enumerate_histogram(graph, spec)
    red = reduce_model(graph, spec)
    true_log_q = z_exact(hist, red.beta_max) - z_exact(hist, red.beta_min)
    return hist, red, true_log_q


def _metrics_ok(res, config, big_l: int) -> bool:
    """The cost-metric contract every run must satisfy (criterion: rounds
    and depth)."""
    m = res.metrics
    rs = replicate_counts(config.eps)
    r_max = max(rs.values())
    depth_cap = ceil_log2(r_max) + ceil_log2(max(big_l, 1)) + 4
    if config.mode == "eager":
        rounds_ok = m.oracle_rounds == 1
    else:
        rounds_ok = m.oracle_rounds == ceil_log2(big_l) + 2
    return rounds_ok and m.reduction_depth <= depth_cap \
        and m.schedule_length == big_l


# ---------------------------------------------------------------------------
# Suite 1: schedule gap bounds


def suite_schedule_gaps(trials: int | None = None, seed: int = 0) -> SuiteResult:
    trials = trials or 100
    gen = rngmod.stream(seed, "verify/schedule-gaps", 0, 0)
    out = _result("schedule-gaps")
    worst_mid, worst_last = -math.inf, -math.inf
    for _ in range(trials):
        hist, q_bar = random_histogram(gen)
        params = ScheduleParameters(q_bar=q_bar, h=hist.h)
        sched = build_refined_schedule(params)
        z = z_exact_many(hist, sched.array)
        drops = z[:-1] - z[1:]
        cap = 1.0 / log_h_floor(hist.h)
        worst_mid = max(worst_mid, float(drops[:-1].max() - cap))
        worst_last = max(worst_last, float(drops[-1] - 2.0))
        if drops[:-1].max() > cap + GAP_TOL or drops[-1] > 2.0 + GAP_TOL:
            out.line(False, f"gap bound violated: h={hist.h} q_bar={q_bar:.3f} "
                            f"mid_excess={drops[:-1].max() - cap:.3e} "
                            f"last_excess={drops[-1] - 2.0:.3e}")
            return out
    out.line(True, f"{trials} histograms: every interior drop <= 1/L(h) "
                   f"(worst margin {worst_mid:.3e}) and final drop <= 2 "
                   f"(worst margin {worst_last:.3e})")
    return out


# ---------------------------------------------------------------------------
# Suite 2: schedule length bound


def suite_schedule_length(trials: int | None = None, seed: int = 0) -> SuiteResult:
    del trials, seed  # fixed grid
    out = _result("schedule-length")
    for q_bar in (1.0, 2.0, 5.0, 10.0, 50.0, 200.0):
        for h in (2, 3, 8, 64, 1024, 2 ** 20):
            params = ScheduleParameters(q_bar=q_bar, h=h)
            length = len(build_refined_schedule(params))
            bound = params.length_bound()
            if length > bound:
                out.line(False, f"q_bar={q_bar} h={h}: l={length} > {bound:.0f}")
    if out.passed:
        out.line(True, "grid q_bar x h: refined length l <= 25 q_bar L(h)^2 + 4")
    return out


# ---------------------------------------------------------------------------
# Suite 3: exact moment identities


def _brute_weight_moments(hist, beta_lo, beta_hi, *, half: bool):
    """E[W] and E[W^2] of the step weight via direct linear-space sums."""
    pmf = gibbs_pmf(hist, beta_lo)
    lv = hist.levels
    if math.isinf(beta_hi):
        w = (lv == 0).astype(float)
    else:
        d = (beta_lo - beta_hi) * (0.5 if half else 1.0)
        w = np.exp(d * lv)
    return float((pmf * w).sum()), float((pmf * w * w).sum())


def suite_moment_identities(trials: int | None = None, seed: int = 0) -> SuiteResult:
    trials = trials or 1000
    gen = rngmod.stream(seed, "verify/moments", 0, 0)
    out = _result("moment-identities")
    worst = 0.0
    for k in range(trials):
        hist, _ = random_histogram(gen, require_ground=(k % 3 == 0))
        b_lo = float(gen.uniform(0.0, 4.0))
        b_hi = b_lo + float(gen.uniform(1e-6, 2.0))
        if k % 17 == 0 and hist.counts[0] > 0:
            b_hi = math.inf

        # product-estimator step mean: E[W] = Z(b_hi) / Z(b_lo)
        mean_w, second_w = _brute_weight_moments(hist, b_lo, b_hi, half=False)
        expect = math.exp(z_exact(hist, b_hi) - z_exact(hist, b_lo))
        err = abs(mean_w - expect) / expect
        worst = max(worst, err)
        if err > MOMENT_RTOL:
            out.line(False, f"PE mean identity off by {err:.2e} "
                            f"(h={hist.h}, {b_lo:.3f}->{b_hi:.3f})")
            return out

        # S_rel of the full step equals the Definition quantity
        srel_brute = second_w / mean_w ** 2
        if math.isinf(b_hi):
            srel_expect = math.exp(z_exact(hist, b_lo)
                                   - z_exact(hist, math.inf))
        else:
            srel_expect = math.exp(
                z_exact(hist, 2 * b_hi - b_lo) + z_exact(hist, b_lo)
                - 2 * z_exact(hist, b_hi))
        err = abs(srel_brute - srel_expect) / srel_expect
        worst = max(worst, err)
        if err > MOMENT_RTOL:
            out.line(False, f"PE S_rel identity off by {err:.2e}")
            return out

        # paired-product half-step: S_rel[W_ij] = exp(kappa_i)
        mean_hw, second_hw = _brute_weight_moments(hist, b_lo, b_hi, half=True)
        srel_half = second_hw / mean_hw ** 2
        kap = kappa_diagnostics((b_lo, b_hi), hist)
        err = abs(srel_half - kap.srel_steps[0]) / kap.srel_steps[0]
        worst = max(worst, err)
        if err > MOMENT_RTOL:
            out.line(False, f"PPE S_rel vs e^kappa off by {err:.2e}")
            return out
    out.line(True, f"{trials} cases: PE step mean, PE S_rel and PPE "
                   f"e^kappa identities hold to {MOMENT_RTOL:.0e} "
                   f"(worst {worst:.2e})")
    return out


# ---------------------------------------------------------------------------
# Suite 4: log-derivative ratio inequality


def suite_derivative_inequality(trials: int | None = None,
                                seed: int = 0) -> SuiteResult:
    trials = trials or 10_000
    gen = rngmod.stream(seed, "verify/derivative", 0, 0)
    out = _result("derivative-inequality")
    checked = 0
    worst = math.inf
    while checked < trials:
        hist, _ = random_histogram(gen, require_ground=False)
        b1 = float(gen.uniform(0.0, 10.0))
        b2 = b1 + float(gen.uniform(1e-8, 10.0))
        z1 = z_exact(hist, b1)
        z2 = z_exact(hist, b2)
        gap = z1 - z2
        if gap < 1e-12:
            continue
        checked += 1
        kappa_t = z1 + z2 - 2.0 * z_exact(hist, (b1 + b2) / 2.0)
        m1 = -z_prime_exact(hist, b1)
        m2 = -z_prime_exact(hist, b2)
        rhs_log = 2.0 * kappa_t / gap
        if m2 == 0.0:
            continue  # ratio is +inf, inequality trivially holds
        if rhs_log < 700.0:
            ok = m1 / m2 >= math.exp(rhs_log) - LEMMA_TOL
            margin = m1 / m2 - math.exp(rhs_log)
        else:
            ok = math.log(m1) - math.log(m2) >= rhs_log - LEMMA_TOL
            margin = math.log(m1) - math.log(m2) - rhs_log
        worst = min(worst, margin)
        if not ok:
            out.line(False, f"derivative inequality violated by {-margin:.3e} "
                            f"(h={hist.h}, {b1:.4f}->{b2:.4f})")
            return out
    out.line(True, f"{trials} pairs with z-gap >= 1e-12: "
                   f"-z'(b1)/-z'(b2) >= exp(2K/gap) (worst margin {worst:.2e})")
    return out


# ---------------------------------------------------------------------------
# Suite 5: kappa bound on bracket-valid prefixes


def suite_kappa_bound(trials: int | None = None, seed: int = 0) -> SuiteResult:
    trials = trials or 100
    gen = rngmod.stream(seed, "verify/kappa", 0, 0)
    out = _result("kappa-bound")
    done = 0
    worst = -math.inf
    worst_b = 0.0
    while done < trials:
        hist, q_bar = random_histogram(gen, q_bar_max=10.0)
        sched = build_refined_schedule(
            ScheduleParameters(q_bar=q_bar, h=hist.h))
        z = z_exact_many(hist, sched.array)
        log_c0 = math.log(hist.counts[0])
        p = 1.0 - np.exp(log_c0 - z)
        if p[0] < 0.5:
            continue  # crossing would sit at j = 0; not an interior bracket
        j = int(np.nonzero(p >= 0.5)[0][-1]) + 1  # 1-based
        if j >= len(sched):
            continue
        # the returned bracket: p_j >= tau - eps and p_{j+1} <= tau + eps
        assert p[j - 1] >= 0.25 and p[j] <= 0.75
        kappa = kappa_diagnostics(sched.betas[:j], hist).kappa
        worst = max(worst, kappa - KAPPA_CAP)
        if kappa > KAPPA_CAP + GAP_TOL:
            out.line(False, f"kappa={kappa:.6f} exceeds 1/2 + ln 4 on a "
                            f"bracket-valid prefix (h={hist.h})")
            return out
        # the split branch's product-estimator leg (b_j, b_{j+1}, b_L) must
        # be B-Chebyshev with B <= 16 whenever the bracket holds
        from .core import log_srel_exact

        pe_betas = [sched.betas[j - 1], sched.betas[j], sched.betas[-1]]
        if pe_betas[1] == pe_betas[2]:
            pe_betas.pop()
        big_b = max(math.exp(log_srel_exact(hist, a, b))
                    for a, b in zip(pe_betas, pe_betas[1:]))
        worst_b = max(worst_b, big_b)
        if big_b > 16.0:
            out.line(False, f"split-branch PE schedule has B={big_b:.2f} > 16")
            return out
        done += 1
    out.line(True, f"{trials} bracket-valid prefixes: kappa <= 1/2 + ln 4 "
                   f"(worst margin {worst:.3e}); split-branch PE legs are "
                   f"B-Chebyshev with B <= {worst_b:.2f} <= 16")
    return out


# ---------------------------------------------------------------------------
# Suite 6: noisy-search bracket validity


def suite_noisyfind_brackets(trials: int | None = None,
                             seed: int = 0) -> SuiteResult:
    trials = trials or 1000
    gen = rngmod.stream(seed, "verify/noisyfind", 0, 0)
    out = _result("noisyfind-brackets")
    config = NoisyFindConfig()
    hits = 0
    max_l = 0
    for k in range(trials):
        while True:
            hist, q_bar = random_histogram(gen)
            if k % 3 == 0:
                # q_bar may exceed q arbitrarily; large bounds produce the
                # long schedules (l approaching 4096) this suite must cover
                q_bar = max(q_bar, float(gen.uniform(14.0, 80.0)))
            sched = build_refined_schedule(
                ScheduleParameters(q_bar=q_bar, h=hist.h))
            if len(sched) <= 4096:
                break
        max_l = max(max_l, len(sched))
        oracle = oracle_from_histogram(hist, sched, seed=int(gen.integers(2 ** 62)))
        j = noisy_find(sched, oracle, config)
        z = z_exact_many(hist, sched.array)
        p = 1.0 - np.exp(math.log(hist.counts[0]) - z)
        lo_band, hi_band = config.tau - config.eps, config.tau + config.eps
        if j == 0:
            ok = p[0] <= hi_band
        elif j == len(sched):
            ok = p[-1] >= lo_band
        else:
            ok = p[j - 1] >= lo_band and p[j] <= hi_band
        hits += ok
        expected_rounds = probe_count(len(sched))
        if oracle.oracle_rounds != expected_rounds:
            out.line(False, f"lazy search spent {oracle.oracle_rounds} rounds, "
                            f"expected {expected_rounds}")
            return out
    need = math.floor(0.99 * trials)
    out.line(hits >= need,
             f"bracket valid in {hits}/{trials} searches at delta=0.01 "
             f"(need >= {need}; largest schedule l={max_l})")
    return out


# ---------------------------------------------------------------------------
# Suite 7: end-to-end accuracy


def suite_end_to_end(trials: int | None = None, seed: int = 0,
                     eps: float = 0.1) -> SuiteResult:
    trials = trials or 200
    out = _result("end-to-end")
    lo, hi = math.log1p(-eps), math.log1p(eps)
    for name, graph, spec in end_to_end_instances():
        hist, red, true_log_q = exact_instance(graph, spec)
        config = AnnealConfig(
            beta_min=red.beta_min, beta_max=red.beta_max, eps=eps,
            q_bar=max(graph.n * math.log(2.0), 1.0), h=red.h, mode="lazy")
        sched_len = len(build_truncated_schedule(config))
        good = 0
        metrics_fail = 0
        for t in range(trials):
            run_seed = seed * 1_000_003 + t
            res = estimate_ratio(config, histogram_oracle_factory(hist, run_seed))
            err = res.log_q_hat - true_log_q
            good += (lo <= err <= hi)
            metrics_fail += not _metrics_ok(res, config, sched_len)
        need = math.floor(0.72 * trials)
        out.line(good >= need and metrics_fail == 0,
                 f"{name}: {good}/{trials} runs inside (1 +- {eps}) "
                 f"(need >= {need}); metric violations: {metrics_fail}")
    return out


# ---------------------------------------------------------------------------
# Suite 8: median boosting


def suite_median_boosting(trials: int | None = None, seed: int = 0,
                          eps: float = 0.25,
                          boost_delta: float = 0.05) -> SuiteResult:
    trials = trials or 500
    out = _result("median-boosting")
    graph = Graph(3, ((0, 1), (1, 2)))
    spec = ModelSpec("hardcore", lam=0.5)
    hist, red, true_log_q = exact_instance(graph, spec)
    config = AnnealConfig(
        beta_min=red.beta_min, beta_max=red.beta_max, eps=eps,
        q_bar=max(graph.n * math.log(2.0), 1.0), h=red.h, mode="lazy",
        boost_delta=boost_delta)
    lo, hi = math.log1p(-eps), math.log1p(eps)
    rs = replicate_counts(eps)
    failures = 0
    depth_fail = 0
    for t in range(trials):
        run_seed = seed * 7_000_003 + t
        res = estimate_ratio_boosted(config,
                                     histogram_oracle_factory(hist, run_seed))
        err = res.log_q_hat - true_log_q
        failures += not (lo <= err <= hi)
        cap_depth = (ceil_log2(max(rs.values()))
                     + ceil_log2(res.metrics.schedule_length) + 4)
        depth_fail += res.metrics.reduction_depth > cap_depth
    cap = boost_delta + 0.02
    rate = failures / trials
    out.line(rate <= cap and depth_fail == 0,
             f"boosted ({boost_runs(boost_delta)} runs/trial) failure rate "
             f"{rate:.4f} over {trials} trials (cap {cap}); depth-bound "
             f"violations: {depth_fail}")
    return out


# ---------------------------------------------------------------------------
# Suite 9: round and depth metrics


def suite_round_depth(trials: int | None = None, seed: int = 0) -> SuiteResult:
    del trials
    out = _result("round-depth-metrics")
    graph = Graph(3, ((0, 1), (1, 2)))
    spec = ModelSpec("hardcore", lam=0.5)
    hist, red, _ = exact_instance(graph, spec)
    q_bar = max(graph.n * math.log(2.0), 1.0)

    eager = AnnealConfig(beta_min=red.beta_min, beta_max=red.beta_max,
                         eps=0.5, q_bar=q_bar, h=red.h, mode="eager",
                         seed=seed)
    plan = one_round_plan(eager)
    big_l = len(plan.schedule)
    res = estimate_ratio(eager, histogram_oracle_factory(hist, seed))
    out.line(res.metrics.oracle_rounds == 1,
             f"eager mode: oracle_rounds = {res.metrics.oracle_rounds} (want 1)")
    rs = replicate_counts(eager.eps)
    formula = big_l * (plan.noisyfind_per_temp + 2 * rs["ppe_split"]
                       + rs["pe_split"])
    out.line(abs(res.metrics.total_samples - formula) <= big_l,
             f"eager samples {res.metrics.total_samples} match the uniform "
             f"allocation formula {formula} within +-l")

    lazy = AnnealConfig(beta_min=red.beta_min, beta_max=red.beta_max,
                        eps=0.5, q_bar=q_bar, h=red.h, mode="lazy", seed=seed)
    res_l = estimate_ratio(lazy, histogram_oracle_factory(hist, seed))
    want = ceil_log2(big_l) + 2
    out.line(res_l.metrics.oracle_rounds == want,
             f"lazy mode: oracle_rounds = {res_l.metrics.oracle_rounds} "
             f"(want ceil(log2 l) + 2 = {want})")
    out.line(res_l.metrics.total_samples < res.metrics.total_samples,
             "lazy mode draws fewer samples than the eager allocation")

    r_max = max(rs.values())
    cap = ceil_log2(r_max) + ceil_log2(big_l) + 4
    depth_ok = (res.metrics.reduction_depth <= cap
                and res_l.metrics.reduction_depth <= cap)
    out.line(depth_ok, f"reduction depth <= ceil(log2 r) + ceil(log2 l) + 4 "
                       f"= {cap} in both modes")

    flat = HamiltonianHistogram.from_counts([5, 0, 0])
    cfg0 = AnnealConfig(beta_min=0.0, beta_max=math.inf, eps=0.5,
                        q_bar=max(flat.q, 1.0), h=0, mode="lazy", seed=seed)
    res0 = estimate_ratio(cfg0, histogram_oracle_factory(flat, seed))
    out.line(res0.log_q_hat == 0.0 and res0.metrics.total_samples == 0,
             "constant-energy fast path: Q_hat = 1 exactly with zero samples")
    return out


# ---------------------------------------------------------------------------
# Suite 10: Glauber backend sanity


def suite_glauber(trials: int | None = None, seed: int = 0) -> SuiteResult:
    del trials
    out = _result("glauber-sanity")

    db_cases = [
        ("hardcore P3", Graph(3, ((0, 1), (1, 2))),
         ModelSpec("hardcore", lam=0.8), 0.7),
        ("hardcore C5", Graph(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0))),
         ModelSpec("hardcore", lam=1.0), 0.35),
        ("ising ferro C4", Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0))),
         ModelSpec("ising", gamma=2.0), 0.5),
        ("ising antiferro K3", Graph(3, ((0, 1), (1, 2), (0, 2))),
         ModelSpec("ising", gamma=0.6), 0.4),
    ]
    for name, graph, spec, beta in db_cases:
        red = reduce_model(graph, spec)
        _, P, pi = glauber_transition_matrix(red, beta)
        flow = pi[:, None] * P
        asym = float(np.abs(flow - flow.T).max())
        stat = float(np.abs(pi @ P - pi).max())
        out.line(asym <= 1e-10 and stat <= 1e-10,
                 f"detailed balance on {name}: asymmetry {asym:.2e}, "
                 f"stationarity {stat:.2e}")

    tv_cases = [
        ("hardcore rand12", RAND12_GRAPH, ModelSpec("hardcore", lam=0.5),
         math.log(2.0)),
        ("ising rand12", RAND12_GRAPH, ModelSpec("ising", gamma=1.2),
         math.log(1.2)),
    ]
    gen = rngmod.stream(seed, "verify/glauber-tv", 0, 0)
    for name, graph, spec, beta in tv_cases:
        red = reduce_model(graph, spec)
        hist = enumerate_histogram(graph, spec)
        pmf = gibbs_pmf(hist, beta)
        burn = default_burn_in(graph.n)
        chains = 100_000
        states = run_chains(red, beta, burn, chains, gen)
        vals = red.hamiltonians_of_states(states)
        emp = np.bincount(vals, minlength=hist.h + 1) / chains
        tv = 0.5 * float(np.abs(emp - pmf).sum())
        out.line(tv <= 0.05,
                 f"{name}: H-distribution TV {tv:.4f} <= 0.05 at default "
                 f"burn-in {burn} over {chains} chains")
    return out


# ---------------------------------------------------------------------------
# Suite 11: determinism across worker counts


def suite_determinism(trials: int | None = None, seed: int = 0) -> SuiteResult:
    configs = trials or 20
    gen = rngmod.stream(seed, "verify/determinism", 0, 0)
    out = _result("determinism")
    mismatches = 0
    for k in range(configs):
        hist, q_bar = random_histogram(gen, h_max=10, q_bar_max=3.0)
        mode = "eager" if k % 3 == 0 else "lazy"
        boost = 0.2 if k % 5 == 0 else None
        eps = 0.4 if k % 2 == 0 else 0.65
        seeds = int(gen.integers(2 ** 31))
        values = []
        for workers in (1, 4, 16):
            config = AnnealConfig(beta_min=0.0, beta_max=math.inf, eps=eps,
                                  q_bar=q_bar, h=hist.h, mode=mode,
                                  seed=seeds, boost_delta=boost,
                                  workers=workers)
            factory = histogram_oracle_factory(hist, seeds, workers=workers)
            if boost is not None:
                res = estimate_ratio_boosted(config, factory)
            else:
                res = estimate_ratio(config, factory)
            values.append((res.log_q_hat, res.metrics))
        if not (values[0] == values[1] == values[2]):
            mismatches += 1
    out.line(mismatches == 0,
             f"{configs} configurations x workers (1, 4, 16): "
             f"{mismatches} mismatches in (log_q_hat, metrics)")
    return out


SUITES = {
    "schedule-gaps": suite_schedule_gaps,
    "schedule-length": suite_schedule_length,
    "moments": suite_moment_identities,
    "lemma-derivative": suite_derivative_inequality,
    "kappa": suite_kappa_bound,
    "noisyfind": suite_noisyfind_brackets,
    "endtoend": suite_end_to_end,
    "boosting": suite_median_boosting,
    "rounds-depth": suite_round_depth,
    "glauber": suite_glauber,
    "determinism": suite_determinism,
}


def run_suites(names, trials: int | None = None, seed: int = 0):
    """Run the selected suites; returns the list of SuiteResults."""
    return [SUITES[name](trials=trials, seed=seed) for name in names]
