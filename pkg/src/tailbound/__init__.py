"""Model-free tail probability bounds from the sample maximum.

The package computes distribution-based and empirical upper bounds on
extreme tail probabilities, validates them by Monte Carlo simulation,
and compares them against peaks-over-threshold generalized Pareto fits
on financial return data.
"""

from .dists import (
    Exponential,
    HalfNormal,
    InfiniteMomentError,
    InvalidParameterError,
    LocationPareto,
    ParetoI,
    improved_markov_bound,
    markov_error,
    moment_markov_bound,
    quantile_vec,
    sample,
    tail,
    traditional_markov_bound,
)
from .bounds import (
    Q1Equivalence,
    SortedSample,
    TailBoundReport,
    count_exceedances,
    coverage_probability,
    empirical_bound,
    max_cdf_value_distribution,
    np_max_probability,
    partial_mean,
    partial_mean_bound,
    q1_equivalence_check,
    scaled_bound,
)
from .montecarlo import (
    SimulationConfig,
    Table1Row,
    Table2Cell,
    min_n_for_max_exceeding,
    run_table1,
    run_table2,
    simulated_max_exceed_prob,
)
from .evtfit import (
    DegenerateDataError,
    GpdFit,
    ThresholdCandidate,
    ThresholdScan,
    fit_gpd_above,
    fit_gpd_mle,
    fit_hill,
    fitted_q1,
    ks_distance,
    lpd_tail_prob,
    residual_cv,
    return_period,
    select_threshold_clauset,
    select_threshold_cv,
)
from .returns import (
    AnalysisReport,
    GaussianRefutation,
    LossTable,
    ModelRow,
    PriceParseError,
    PriceSeries,
    ReturnsSeries,
    emit_tail_plot_data,
    fit_loss_models,
    full_analysis,
    gaussian_refutation,
    largest_losses,
    load_prices,
    log_returns,
    negative_losses,
    unconditional_bound,
)

__version__ = "0.1.0"
