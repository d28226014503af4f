"""zratio: partition-function ratio estimation for Gibbs distributions via
parallel simulated annealing.

The public surface mirrors the pipeline: exact reference math on energy
histograms (``core``), non-adaptive cooling schedules (``schedule``),
graphical models and their reductions (``models``), batched sampling
oracles (``oracles``), the product and paired-product estimators
(``estimators``), noisy binary search (``noisyfind``), and the combined
main algorithm (``annealer``).
"""

from .annealer import (AnnealConfig, estimate_ratio, estimate_ratio_boosted,
                       one_round_plan)
from .core import (CostMetrics, HamiltonianHistogram, LogValue, RatioEstimate,
                   exact_sample, srel_exact, z_exact, z_prime_exact,
                   z_second_exact)
from .estimators import EstimatorPlan, kappa_diagnostics, pe_estimate, ppe_estimate
from .kernels import BACKEND as KERNEL_BACKEND
from .models import (Graph, ModelSpec, enumerate_histogram, reduce_model)
from .noisyfind import NoisyFindConfig, noisy_find
from .oracles import (HistogramOracle, McmcConfig, ModelOracle, OracleRequest,
                      histogram_oracle_factory, model_oracle_factory,
                      oracle_from_histogram, oracle_from_model)
from .schedule import (CoolingSchedule, ScheduleParameters,
                       build_base_schedule, build_refined_schedule,
                       refine_schedule, truncate_schedule)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "CoolingSchedule",
    "CostMetrics",
    "EstimatorPlan",
    "Graph",
    "HamiltonianHistogram",
    "HistogramOracle",
    "KERNEL_BACKEND",
    "LogValue",
    "McmcConfig",
    "ModelOracle",
    "ModelSpec",
    "NoisyFindConfig",
    "OracleRequest",
    "RatioEstimate",
    "ScheduleParameters",
    "build_base_schedule",
    "build_refined_schedule",
    "enumerate_histogram",
    "estimate_ratio",
    "estimate_ratio_boosted",
    "exact_sample",
    "histogram_oracle_factory",
    "kappa_diagnostics",
    "model_oracle_factory",
    "noisy_find",
    "one_round_plan",
    "oracle_from_histogram",
    "oracle_from_model",
    "pe_estimate",
    "ppe_estimate",
    "reduce_model",
    "refine_schedule",
    "srel_exact",
    "truncate_schedule",
    "z_exact",
    "z_prime_exact",
    "z_second_exact",
]
