"""Numerical oracles for the closed forms.

Nothing here imports :mod:`advisorgame.equilibrium` formulas: the objective is
assembled from the human decision rules alone, then minimized by
golden-section search, a brute-force grid, or estimated by Monte Carlo over
the consultation coin.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .beliefs import BeliefParams, decision_with_ai, decision_without_ai
from .equilibrium import Scenario
from .errors import BracketingError, InvalidParameterError, NumericalError

INV_PHI = (math.sqrt(5) - 1) / 2
MAX_DOUBLINGS = 64
MC_BLOCK = 1 << 16


def raw_loss(s: Scenario, sE):
    """Expected squared miss ``(1-p)(r-D0)^2 + p(r-D1)^2`` at recommendation ``sE``.

    Works for floats, numpy arrays of ``sE`` and exact ``Fraction`` inputs.
    """
    b = s.beliefs
    d0 = decision_without_ai(b, sE)
    d1 = decision_with_ai(b, sE, s.sP)
    return (1 - s.p) * (s.r - d0) ** 2 + s.p * (s.r - d1) ** 2


def exact_scenario(s: Scenario) -> Scenario:
    """Copy of ``s`` with every number converted to an exact ``Fraction``."""
    b = s.beliefs
    beliefs = BeliefParams(
        Fraction(b.mu0), Fraction(b.rE), Fraction(b.rP), b.uninformative_prior
    )
    return Scenario(beliefs, Fraction(s.p), Fraction(s.r), Fraction(s.sP))


@dataclass(frozen=True)
class RawObjective:
    """The advisor's objective as a callable of the recommendation.

    Near the minimum the objective is flat to within ~sqrt(eps) in its
    argument, so float values cannot order nearby points.  ``less`` compares
    two points in floating point when the gap exceeds a rounding bound and
    falls back to exact rational evaluation otherwise.
    """

    scenario: Scenario

    def __post_init__(self):
        # Exact comparisons use the objective multiplied by both decision
        # denominators (constants in sE): w0*u0^2 + w1*u1^2 with u0, u1 affine.
        e = exact_scenario(self.scenario)
        b = e.beliefs
        if b.uninformative_prior:
            n0, n1, a0 = Fraction(1), b.rE + b.rP, Fraction(1)
            c0 = e.r
            c1 = e.r * n1 - b.rP * e.sP
        else:
            n0, n1, a0 = 1 + b.rE, 1 + b.rE + b.rP, b.rE
            c0 = e.r * n0 - b.mu0
            c1 = e.r * n1 - b.mu0 - b.rP * e.sP
        terms = ((1 - e.p) * n1 ** 2, c0, a0, e.p * n0 ** 2, c1, b.rE)
        object.__setattr__(self, "_exact_terms", terms)
        object.__setattr__(self, "_exact_cache", {})

    def __call__(self, sE):
        value = raw_loss(self.scenario, sE)
        if not np.all(np.isfinite(value)):
            raise NumericalError(f"objective is not finite at sE={sE!r}")
        return value

    def exact_scaled(self, sE: float) -> Fraction:
        """Exact objective at ``sE`` times a positive constant independent of ``sE``."""
        if not math.isfinite(sE):
            raise NumericalError(f"non-finite trial point {sE!r}")
        cache = self._exact_cache
        if sE not in cache:
            w0, c0, a0, w1, c1, a1 = self._exact_terms
            x = Fraction(sE)
            cache[sE] = w0 * (c0 - a0 * x) ** 2 + w1 * (c1 - a1 * x) ** 2
        return cache[sE]

    def rounding_bound(self, sE: float, value: float) -> float:
        """Upper bound on the float evaluation error of the objective at ``sE``."""
        s = self.scenario
        b = s.beliefs
        eps = np.finfo(float).eps
        if b.uninformative_prior:
            scale0 = abs(s.r) + abs(sE)
            scale1 = abs(s.r) + (abs(b.rE * sE) + abs(b.rP * s.sP)) / (b.rE + b.rP)
        else:
            scale0 = abs(s.r) + (abs(b.mu0) + abs(b.rE * sE)) / (1 + b.rE)
            scale1 = abs(s.r) + (abs(b.mu0) + abs(b.rE * sE) + abs(b.rP * s.sP)) / (1 + b.rE + b.rP)
        err0 = 8 * eps * scale0
        err1 = 8 * eps * scale1
        e0 = math.sqrt(value / max(1 - s.p, eps)) if s.p < 1 else 0.0
        e1 = math.sqrt(value / max(s.p, eps)) if s.p > 0 else 0.0
        return (
            (1 - s.p) * (2 * min(e0, scale0) * err0 + err0 ** 2)
            + s.p * (2 * min(e1, scale1) * err1 + err1 ** 2)
            + 8 * eps * value
        )

    def less(self, x1: float, f1: float, x2: float, f2: float) -> bool:
        """Whether the objective at ``x1`` is strictly below that at ``x2``."""
        gap = self.rounding_bound(x1, f1) + self.rounding_bound(x2, f2)
        if abs(f1 - f2) > gap:
            return f1 < f2
        return self.exact_scaled(x1) < self.exact_scaled(x2)


def bracket_minimum(s: Scenario) -> tuple[float, float]:
    """Interval around ``r`` whose midpoint beats both ends.

    The half-width starts at a scale set by the disagreements ``|r - mu0|``,
    ``|r - sP|`` and the weights, and doubles until ``L(lo) > L(r) < L(hi)``;
    by convexity the minimizer then lies inside.
    """
    b = s.beliefs
    f = RawObjective(s)
    k = 1 + (1 + b.rP) / b.rE
    half = (1 + abs(s.r - b.mu0) + abs(s.r - s.sP)) * k
    mid = s.r
    f_mid = f(mid)
    for _ in range(MAX_DOUBLINGS + 1):
        lo, hi = mid - half, mid + half
        if f(lo) > f_mid < f(hi):
            return lo, hi
        half *= 2
    raise BracketingError(f"no bracket after {MAX_DOUBLINGS} doublings for {s!r}")


def golden_section_iterations(lo: float, hi: float, tol: float) -> int:
    return max(0, math.ceil(math.log((hi - lo) / tol) / math.log(1 / INV_PHI)))


def golden_section_minimize(
    s: Scenario, lo: float, hi: float, tol: float = 1e-10, exact: bool = True
) -> float:
    """Golden-section search for the minimizer of the raw objective on ``[lo, hi]``.

    Runs a fixed ``golden_section_iterations(lo, hi, tol)`` shrink steps and
    returns the midpoint of the final interval.  ``exact=False`` compares
    plain float values, which stalls at roughly sqrt(eps) accuracy.
    """
    if not lo < hi:
        raise InvalidParameterError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    f = RawObjective(s)
    less = f.less if exact else (lambda x1, f1, x2, f2: f1 < f2)
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(golden_section_iterations(lo, hi, tol)):
        if less(x1, f1, x2, f2):
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def oracle_minimize(s: Scenario, tol: float = 1e-10) -> float:
    """Bracket then golden-section search; never consults a closed form."""
    lo, hi = bracket_minimum(s)
    return golden_section_minimize(s, lo, hi, tol)


def grid_min(s: Scenario, lo: float, hi: float, n: int) -> tuple[float, float]:
    """Brute-force minimum over ``n`` equally spaced points (leftmost on ties)."""
    if n < 3:
        raise InvalidParameterError(f"grid needs at least 3 points, got {n}")
    xs = np.linspace(lo, hi, n)
    values = RawObjective(s)(xs)
    i = int(np.argmin(values))
    return float(xs[i]), float(values[i])


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int


def _stream(seed: int, index: int) -> np.random.Generator:
    # Block i draws from its own Philox stream keyed by (seed, i), so the
    # estimate does not depend on how blocks are spread over workers.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _count_consulted(seed: int, index: int, size: int, p: float) -> int:
    u = _stream(seed, index).random(size)
    return int(np.count_nonzero(u < p))


def mc_expected_loss(
    s: Scenario, sE: float, n: int = 1_000_000, seed: int = 0, workers: int = 1
) -> McEstimate:
    """Monte Carlo estimate of the expected loss at recommendation ``sE``.

    Each draw flips the consultation coin (``u < p`` with ``u`` uniform on
    [0, 1)) and scores ``(D - r)^2``.  A draw's loss takes one of two values,
    so the sample mean and variance follow exactly from the consultation
    count; this keeps the degenerate coins ``p in {0, 1}`` exact.
    """
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
    b = s.beliefs
    loss0 = (decision_without_ai(b, sE) - s.r) ** 2
    loss1 = (decision_with_ai(b, sE, s.sP) - s.r) ** 2

    sizes = [MC_BLOCK] * (n // MC_BLOCK)
    if n % MC_BLOCK:
        sizes.append(n % MC_BLOCK)
    args = [(seed, i, size, s.p) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda a: _count_consulted(*a), args))
    else:
        counts = [_count_consulted(*a) for a in args]
    k = sum(counts)

    w1 = k / n
    w0 = (n - k) / n
    mean = w0 * loss0 + w1 * loss1
    var = n / (n - 1) * w0 * w1 * (loss1 - loss0) ** 2
    return McEstimate(mean=mean, std_error=math.sqrt(var / n), n=n, seed=seed)


def random_scenarios(rng: np.random.Generator, n: int) -> list[Scenario]:
    """Draw scenarios: p ~ U[0,1], rE, rP log-uniform on [0.05, 20], levels ~ U[-10, 10]."""
    lo, hi = math.log(0.05), math.log(20)
    out = []
    for _ in range(n):
        p = float(rng.uniform(0, 1))
        rE, rP = (float(math.exp(v)) for v in rng.uniform(lo, hi, 2))
        mu0, r, sP = (float(v) for v in rng.uniform(-10, 10, 3))
        out.append(Scenario(BeliefParams(mu0, rE, rP), p, r, sP))
    return out
