"""High-probability bounds for importance-weighted bandit play.

The package couples a smoothed Gibbs bandit strategy with the martingale
concentration machinery that certifies its estimates, and ships the exact
enumeration oracles plus a seeded Monte Carlo harness used to check every
bound empirically.
"""

__version__ = "0.1.0"

from .bandit import (
    Environment,
    GameConfig,
    GameTrace,
    PolicyState,
    ScheduleError,
    ScheduleParams,
    gibbs_posterior,
    run_game,
    schedules,
    smooth_policy,
    update_estimates,
    warmup_policy,
    write_trace_csv,
)
from .bounds import (
    BoundConfig,
    GapDriverReport,
    RegretDecomposition,
    expsum_ratio,
    gap_driver_report,
    gibbs_gap_bound,
    gibbs_kl_sandwich,
    gibbs_prior_from_means,
    gibbs_prior_kl_bound,
    kl_budget,
    kl_certificate,
    lambda_opt,
    regret_decomposition,
    regret_envelope,
    reward_gap_radius,
    weighted_gap_bound,
    weighted_gap_bound_opt,
)
from .concentration import (
    BudgetError,
    CertificateResult,
    DependentChainSpec,
    MartingaleBatch,
    MartingaleRange,
    azuma_alt_bound,
    azuma_alt_kl_certificate,
    bernoulli_convex_expectation,
    bernoulli_kl_moment,
    convex_domination_gap,
    convex_test_functions,
    dependent_convex_expectation,
    hoeffding_azuma_bound,
    markov_bound,
    midpoint_convexity_probe,
    random_constant_mean_chain,
    simulate_importance_weighted,
    simulate_profile_walks,
    simulate_sign_walks,
)
from .divergences import (
    SimplexVector,
    bernoulli_kl,
    bernoulli_kl_vec,
    categorical_kl,
    kl_lower_inverse,
    kl_upper_inverse,
    pinsker_gap,
)
from .harness import (
    BoundCoverage,
    CoverageReport,
    ExperimentConfig,
    OracleCheck,
    OracleReport,
    SimulateResult,
    certificate_sweep,
    prediction_regret,
    run_compare_concentration,
    run_oracles,
    run_simulate,
    run_verify_bounds,
    schedule_pi_min,
    trajectory_stream,
)

__all__ = [
    "BoundConfig",
    "BoundCoverage",
    "BudgetError",
    "CertificateResult",
    "CoverageReport",
    "DependentChainSpec",
    "Environment",
    "ExperimentConfig",
    "GameConfig",
    "GameTrace",
    "GapDriverReport",
    "MartingaleBatch",
    "MartingaleRange",
    "OracleCheck",
    "OracleReport",
    "PolicyState",
    "RegretDecomposition",
    "ScheduleError",
    "ScheduleParams",
    "SimplexVector",
    "SimulateResult",
    "azuma_alt_bound",
    "azuma_alt_kl_certificate",
    "bernoulli_convex_expectation",
    "bernoulli_kl",
    "bernoulli_kl_moment",
    "bernoulli_kl_vec",
    "categorical_kl",
    "certificate_sweep",
    "convex_domination_gap",
    "convex_test_functions",
    "dependent_convex_expectation",
    "expsum_ratio",
    "gap_driver_report",
    "gibbs_gap_bound",
    "gibbs_kl_sandwich",
    "gibbs_posterior",
    "gibbs_prior_from_means",
    "gibbs_prior_kl_bound",
    "hoeffding_azuma_bound",
    "kl_budget",
    "kl_certificate",
    "kl_lower_inverse",
    "kl_upper_inverse",
    "lambda_opt",
    "markov_bound",
    "midpoint_convexity_probe",
    "pinsker_gap",
    "prediction_regret",
    "random_constant_mean_chain",
    "regret_decomposition",
    "regret_envelope",
    "reward_gap_radius",
    "run_compare_concentration",
    "run_game",
    "run_oracles",
    "run_simulate",
    "run_verify_bounds",
    "schedule_pi_min",
    "schedules",
    "simulate_importance_weighted",
    "simulate_profile_walks",
    "simulate_sign_walks",
    "smooth_policy",
    "trajectory_stream",
    "update_estimates",
    "warmup_policy",
    "weighted_gap_bound",
    "weighted_gap_bound_opt",
    "write_trace_csv",
]
