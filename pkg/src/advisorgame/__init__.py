"""Equilibrium objects of the advisor-versus-personal-AI recommendation game."""

from .beliefs import BeliefParams, VariancePrior, decision_with_ai, decision_without_ai, from_variances
from .equilibrium import (
    EquilibriumOutcome,
    Scenario,
    counteraction_intensity,
    counteraction_intensity_tform,
    equilibrium_loss,
    equilibrium_loss_tform,
    naive_recommendation,
    optimal_recommendation,
    peak_adoption,
    peak_trust,
)
from .errors import (
    AdvisorGameError,
    BracketingError,
    ConfigError,
    InvalidParameterError,
    NumericalError,
    SweepCheckError,
    SweepSpecError,
)
from .trust import (
    TrustDecision,
    TrustInvestmentProblem,
    alpha_ratio,
    fixed_rec_expected_loss,
    invest_decision,
    threshold_slope_condition,
    trust_threshold,
)

__version__ = "0.1.0"
