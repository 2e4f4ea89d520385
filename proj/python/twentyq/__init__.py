"""Noisy adaptive twenty-questions simulation and analysis toolkit."""

from twentyq._core import (  # noqa: F401
    BudgetPoint,
    CapacityResult,
    ContinuityReport,
    DecodeRule,
    DensityParams,
    ExperimentConfig,
    ExperimentSummary,
    LipschitzFn,
    MdChannel,
    MeanStderr,
    Partition,
    PmStopRule,
    Procedure,
    ProcedureConfig,
    QuerySizeSummary,
    RateCurve,
    RatePoint,
    Rng,
    SortedPmConfig,
    StoppingTimePair,
    Theorem1Report,
    TrialRecord,
    TruthMode,
    __version__,
    alg1_budget_point,
    beta,
    binary_entropy,
    budget_slope,
    capacity_bsc,
    capacity_general,
    check_continuity,
    choose_lambda,
    crossover_epsilon,
    pm_budget_point,
    pm_run,
    rate_curves,
    run_experiment,
    run_trial,
    sorted_pm_rate,
    stopping_time_pair,
    validate_theorem1,
)
