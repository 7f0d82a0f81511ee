"""Human belief structure and the two Bayesian decision rules.

The human holds a Gaussian prior over the state and treats the advisor's
recommendation (and, when consulted, the personal AI's recommendation) as
noisy signals of it.  Everything downstream depends on the prior only
through its mean and the two relative precisions

    rE = sigma0^2 / sigmaE^2,    rP = sigma0^2 / sigmaP^2.

The decision functions use plain arithmetic so they accept floats,
``fractions.Fraction`` values (exact evaluation) and numpy arrays for the
recommendation arguments alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError

#: Smallest admissible relative precision.
PRECISION_FLOOR = 1e-12


def _check_precision(name: str, value) -> None:
    if not math.isfinite(value) or value < PRECISION_FLOOR:
        raise InvalidParameterError(
            f"{name} must be finite and >= {PRECISION_FLOOR:g}, got {value!r}"
        )


@dataclass(frozen=True)
class BeliefParams:
    """Prior mean plus the relative precisions of the two recommenders.

    ``uninformative_prior`` stands for the diffuse-prior limit; when it is set
    ``mu0`` plays no role in any decision rule.
    """

    mu0: float
    rE: float
    rP: float
    uninformative_prior: bool = False

    def __post_init__(self):
        if not math.isfinite(self.mu0):
            raise InvalidParameterError(f"mu0 must be finite, got {self.mu0!r}")
        _check_precision("rE", self.rE)
        _check_precision("rP", self.rP)

    @property
    def trust_ratio(self) -> float:
        """Relative trust ratio ``t = rP / (1 + rE)``."""
        return self.rP / (1 + self.rE)


@dataclass(frozen=True)
class VariancePrior:
    """Alternative parameterization by the prior and signal-noise variances."""

    sigma0_sq: float
    sigmaE_sq: float
    sigmaP_sq: float

    def __post_init__(self):
        for name in ("sigma0_sq", "sigmaE_sq", "sigmaP_sq"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidParameterError(
                    f"{name} must be finite and positive, got {value!r}"
                )


def from_variances(v: VariancePrior, mu0: float = 0.0) -> BeliefParams:
    """Canonicalize a variance parameterization into relative precisions."""
    if not isinstance(v, VariancePrior):
        v = VariancePrior(*v)
    return BeliefParams(
        mu0=mu0,
        rE=v.sigma0_sq / v.sigmaE_sq,
        rP=v.sigma0_sq / v.sigmaP_sq,
        uninformative_prior=False,
    )


def decision_without_ai(b: BeliefParams, sE):
    """Posterior mean given only the advisor's recommendation ``sE``."""
    if b.uninformative_prior:
        return sE
    return (b.mu0 + b.rE * sE) / (1 + b.rE)


def decision_with_ai(b: BeliefParams, sE, sP):
    """Posterior mean given both the advisor's and the personal AI's signals."""
    if b.uninformative_prior:
        return (b.rE * sE + b.rP * sP) / (b.rE + b.rP)
    return (b.mu0 + b.rE * sE + b.rP * sP) / (1 + b.rE + b.rP)
