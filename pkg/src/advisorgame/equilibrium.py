"""Closed-form equilibrium of the advisor-versus-personal-AI game.

The advisor picks a recommendation ``sE`` knowing the adoption probability
``p``, the human's beliefs and the personal AI's recommendation ``sP``; the
human consults the personal AI with probability ``p``.  The optimal
recommendation is

    sE* = r + (r - mu0) / rE + delta * (r - sP)

where ``delta`` is the counteraction intensity.  The ``*_from_ratios``
helpers evaluate the formulas with unchecked arithmetic so they vectorize
over numpy arrays; the scenario-level functions validate first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beliefs import PRECISION_FLOOR, BeliefParams, decision_with_ai, decision_without_ai
from .errors import InvalidParameterError


@dataclass(frozen=True)
class Scenario:
    """One game instance: beliefs, adoption probability, target and AI signal."""

    beliefs: BeliefParams
    p: float
    r: float
    sP: float

    def __post_init__(self):
        if not isinstance(self.beliefs, BeliefParams):
            raise InvalidParameterError("beliefs must be a BeliefParams instance")
        if not (0 <= self.p <= 1):
            raise InvalidParameterError(f"p must lie in [0, 1], got {self.p!r}")
        for name in ("r", "sP"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @classmethod
    def from_values(cls, *, mu0=0.0, rE=1.0, rP=1.0, p=0.5, r=1.0, sP=0.0):
        return cls(BeliefParams(mu0, rE, rP), p, r, sP)

    @property
    def dev_sq(self) -> float:
        """Squared disagreement ``(r - sP)^2`` between target and AI signal."""
        return (self.r - self.sP) ** 2

    @property
    def trust_ratio(self) -> float:
        return self.beliefs.trust_ratio


@dataclass(frozen=True)
class EquilibriumOutcome:
    sE_star: float
    delta: float
    loss: float
    d0: float
    d1: float


def _require_informative(s: Scenario) -> None:
    # The prior-bias correction (r - mu0)/rE has no defined diffuse-prior limit.
    if s.beliefs.uninformative_prior:
        raise InvalidParameterError(
            "equilibrium quantities are undefined for an uninformative prior"
        )


def _check_p(p) -> None:
    if not np.all((np.asarray(p) >= 0) & (np.asarray(p) <= 1)):
        raise InvalidParameterError(f"p must lie in [0, 1], got {p!r}")


def _check_positive(name, value, floor=PRECISION_FLOOR) -> None:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr) & (arr >= floor) & (arr > 0)):
        raise InvalidParameterError(f"{name} must be finite, positive and >= {floor:g}")


# -- vectorizable kernels ---------------------------------------------------

def intensity_from_ratios(p, rE, rP):
    """Counteraction intensity from ``(p, rE, rP)``; no validation."""
    a = (1 + rE) ** 2
    b = (1 + rE + rP) ** 2
    return p * rP * a / (rE * ((1 - p) * b + p * a))


def loss_from_ratios(p, rE, rP, dev_sq):
    """Equilibrium loss from ``(p, rE, rP)`` and ``(r - sP)^2``; no validation."""
    a = (1 + rE) ** 2
    b = (1 + rE + rP) ** 2
    return p * (1 - p) * rP ** 2 * dev_sq / ((1 - p) * b + p * a)


# -- scenario-level operations ----------------------------------------------

def naive_recommendation(r: float) -> float:
    """Best response of an advisor who ignores the personal AI: recommend ``r``."""
    return r


def counteraction_intensity(s: Scenario) -> float:
    _require_informative(s)
    b = s.beliefs
    return intensity_from_ratios(s.p, b.rE, b.rP)


def counteraction_intensity_tform(p, rE, t):
    """Counteraction intensity written in the trust ratio ``t = rP/(1+rE)``.

    Accepts scalars or arrays.
    """
    _check_p(p)
    _check_positive("rE", rE)
    _check_positive("t", t, floor=0.0)
    return (1 + 1 / rE) * p * t / ((1 - p) * (1 + t) ** 2 + p)


def equilibrium_loss(s: Scenario) -> float:
    """Minimized expected squared deviation of the decision from ``r``.

    Does not read ``mu0``: the advisor's prior-bias correction absorbs it.
    """
    _require_informative(s)
    b = s.beliefs
    return loss_from_ratios(s.p, b.rE, b.rP, s.dev_sq)


def equilibrium_loss_tform(p, t, dev_sq):
    _check_p(p)
    _check_positive("t", t, floor=0.0)
    if not np.all(np.asarray(dev_sq) >= 0):
        raise InvalidParameterError("dev_sq must be non-negative")
    return t ** 2 * p * (1 - p) * dev_sq / ((1 - p) * (1 + t) ** 2 + p)


def optimal_recommendation(s: Scenario) -> EquilibriumOutcome:
    """Solve the advisor's problem and report the decisions it induces."""
    _require_informative(s)
    b = s.beliefs
    delta = intensity_from_ratios(s.p, b.rE, b.rP)
    sE_star = s.r + (s.r - b.mu0) / b.rE + delta * (s.r - s.sP)
    return EquilibriumOutcome(
        sE_star=sE_star,
        delta=delta,
        loss=loss_from_ratios(s.p, b.rE, b.rP, s.dev_sq),
        d0=decision_without_ai(b, sE_star),
        d1=decision_with_ai(b, sE_star, s.sP),
    )


def peak_adoption(rE, rP):
    """Adoption rate that maximizes the equilibrium loss."""
    _check_positive("rE", rE)
    _check_positive("rP", rP)
    return (1 + rE + rP) / (2 * (1 + rE) + rP)


def peak_trust(p):
    """Trust ratio ``1/sqrt(1-p)`` that maximizes counteraction intensity."""
    if not (0 <= p < 1):
        raise InvalidParameterError(
            f"peak trust requires p in [0, 1); the maximizer diverges at p=1 (got {p!r})"
        )
    return 1 / math.sqrt(1 - p)
