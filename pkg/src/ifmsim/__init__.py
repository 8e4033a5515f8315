"""Quantum-Zeno interaction-free measurement simulator and analysis toolkit."""

__version__ = "0.1.0"

from .discrimination import (
    DiscriminationPoint,
    SequentialRun,
    StrategySpec,
    min_loss_bound,
    monte_carlo_curve,
    posterior_classical,
    posterior_ifm,
    run_sequential,
)
from .evolution import (
    ContrastPoint,
    OutcomeProbabilities,
    ProbeState,
    SampleSpec,
    SearchBoundWarning,
    SetupSpec,
    ValidityWarning,
    alpha_prime_approx,
    coherent_step,
    contrast_curve,
    coupling_matrix,
    loss_peak,
    n_opt_approx,
    n_opt_numeric,
    opaque_loss_closed_form,
    probability_sweep,
    run_ifm,
    sample_encounter,
)
from .precision import (
    LossBudget,
    expected_loss_clopper_pearson,
    expected_loss_normal_binomial,
    expected_loss_normal_poisson,
    expected_loss_poisson_chi2,
    loss_curve,
    signal_derivative,
    signal_probabilities,
)
from .stats import (
    Interval,
    RngSeed,
    chi_squared_quantile,
    clopper_pearson,
    inverse_regularized_incomplete_beta,
    make_stream,
    normal_quantile,
    normal_width_binomial,
    poisson_interval,
    regularized_incomplete_beta,
    sample_bernoulli,
    sample_categorical3,
    sample_poisson,
)

__all__ = [
    "__version__",
    "ContrastPoint",
    "DiscriminationPoint",
    "Interval",
    "LossBudget",
    "OutcomeProbabilities",
    "ProbeState",
    "RngSeed",
    "SampleSpec",
    "SearchBoundWarning",
    "SequentialRun",
    "SetupSpec",
    "StrategySpec",
    "ValidityWarning",
    "alpha_prime_approx",
    "chi_squared_quantile",
    "clopper_pearson",
    "coherent_step",
    "contrast_curve",
    "coupling_matrix",
    "expected_loss_clopper_pearson",
    "expected_loss_normal_binomial",
    "expected_loss_normal_poisson",
    "expected_loss_poisson_chi2",
    "inverse_regularized_incomplete_beta",
    "loss_curve",
    "loss_peak",
    "make_stream",
    "min_loss_bound",
    "monte_carlo_curve",
    "n_opt_approx",
    "n_opt_numeric",
    "normal_quantile",
    "normal_width_binomial",
    "opaque_loss_closed_form",
    "poisson_interval",
    "posterior_classical",
    "posterior_ifm",
    "probability_sweep",
    "regularized_incomplete_beta",
    "run_ifm",
    "run_sequential",
    "sample_bernoulli",
    "sample_categorical3",
    "sample_encounter",
    "sample_poisson",
    "signal_derivative",
    "signal_probabilities",
]
