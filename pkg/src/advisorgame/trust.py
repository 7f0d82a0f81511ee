"""Binary trust investment with the recommendation held at the target ``r``.

The advisor can stay at its baseline relative precision ``rE`` or pay a fixed
cost to lift it to ``rE_high``.  It invests exactly when the cost does not
exceed the reduction in expected loss, ``threshold = L(rE) - L(rE_high)``.
The threshold is affine in the adoption rate ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .beliefs import BeliefParams
from .equilibrium import Scenario
from .errors import InvalidParameterError


@dataclass(frozen=True)
class TrustInvestmentProblem:
    """Trust upgrade from ``scenario.beliefs.rE`` to ``rE_high`` at ``cost``."""

    scenario: Scenario
    rE_high: float
    cost: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.rE_high) or not self.rE_high > self.rE_base:
            raise InvalidParameterError(
                f"rE_high must exceed the baseline rE={self.rE_base!r}, got {self.rE_high!r}"
            )
        if not math.isfinite(self.cost) or self.cost < 0:
            raise InvalidParameterError(f"cost must be finite and non-negative, got {self.cost!r}")
        if self.scenario.beliefs.uninformative_prior:
            raise InvalidParameterError("trust investment needs an informative prior")

    @property
    def rE_base(self) -> float:
        return self.scenario.beliefs.rE

    def at_adoption(self, p: float) -> "TrustInvestmentProblem":
        """Same problem with the adoption rate replaced by ``p``."""
        return replace(self, scenario=replace(self.scenario, p=p))


@dataclass(frozen=True)
class TrustDecision:
    invest: bool
    threshold: float
    loss_base: float
    loss_high: float


class SlopeCondition(NamedTuple):
    decreasing: bool
    lhs: float
    rhs: float


def fixed_rec_expected_loss(s: Scenario, tau: float) -> float:
    """Expected loss when the advisor recommends ``r`` and is trusted at ``tau``.

    Averages over the consultation coin only; ``sP`` is taken as realized.
    """
    if not math.isfinite(tau) or tau <= 0:
        raise InvalidParameterError(f"tau must be finite and positive, got {tau!r}")
    b = s.beliefs
    bias = s.r - b.mu0
    pulled = bias + b.rP * (s.r - s.sP)
    return (1 - s.p) * bias ** 2 / (1 + tau) ** 2 + s.p * pulled ** 2 / (1 + tau + b.rP) ** 2


def _gains(rE, rE_high, rP):
    no_ai = 1 / (1 + rE) ** 2 - 1 / (1 + rE_high) ** 2
    with_ai = 1 / (1 + rE + rP) ** 2 - 1 / (1 + rE_high + rP) ** 2
    return no_ai, with_ai


def threshold_from_values(p, r, mu0, sP, rE, rE_high, rP):
    """Threshold cost as an explicit function; vectorizes over ``p``."""
    no_ai, with_ai = _gains(rE, rE_high, rP)
    bias = r - mu0
    pulled = bias + rP * (r - sP)
    return (1 - p) * bias ** 2 * no_ai + p * pulled ** 2 * with_ai


def trust_threshold(tp: TrustInvestmentProblem) -> float:
    s = tp.scenario
    b = s.beliefs
    return threshold_from_values(s.p, s.r, b.mu0, s.sP, tp.rE_base, tp.rE_high, b.rP)


def invest_decision(tp: TrustInvestmentProblem) -> TrustDecision:
    threshold = trust_threshold(tp)
    return TrustDecision(
        invest=tp.cost <= threshold,
        threshold=threshold,
        loss_base=fixed_rec_expected_loss(tp.scenario, tp.rE_base),
        loss_high=fixed_rec_expected_loss(tp.scenario, tp.rE_high),
    )


def alpha_ratio(rE: float, rE_high: float, rP: float) -> float:
    """Square root of the ratio of no-AI to with-AI returns on trust; always > 1."""
    BeliefParams(0.0, rE, rP)  # validates rE, rP
    if not math.isfinite(rE_high) or not rE_high > rE:
        raise InvalidParameterError(f"rE_high must exceed rE, got {rE_high!r} <= {rE!r}")
    no_ai, with_ai = _gains(rE, rE_high, rP)
    return math.sqrt(no_ai / with_ai)


def threshold_slope_condition(tp: TrustInvestmentProblem) -> SlopeCondition:
    """Test whether the threshold cost falls as adoption rises.

    The threshold decreases in ``p`` iff the with-AI decision's distance from
    target is small relative to ``alpha/(1+rP)`` times the prior's.
    """
    s = tp.scenario
    b = s.beliefs
    alpha = alpha_ratio(tp.rE_base, tp.rE_high, b.rP)
    lhs = abs(s.r - (b.mu0 + b.rP * s.sP) / (1 + b.rP))
    rhs = alpha / (1 + b.rP) * abs(s.r - b.mu0)
    return SlopeCondition(lhs < rhs, lhs, rhs)
