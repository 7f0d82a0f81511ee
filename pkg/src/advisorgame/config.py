"""JSON scenario configuration documents.

A document names the beliefs either by relative precisions (``rE``, ``rP``)
or by variances (``sigma0_sq``, ``sigmaE_sq``, ``sigmaP_sq``), never both::

    {"mu0": 0, "rE": 1, "rP": 1, "p": 0.5, "r": 1, "sP": 0,
     "trust": {"rE_high": 3, "cost": 0.1},
     "sweep": {"param": "p", "from": 0, "to": 1, "steps": 1001, "quantity": "loss"},
     "mc": {"n": 1000000, "seed": 0}}

Only types and finiteness are checked here; domain checks happen when the
model objects are built.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .beliefs import BeliefParams, VariancePrior, from_variances
from .equilibrium import Scenario
from .errors import ConfigError
from .sweep import SweepSpec
from .trust import TrustInvestmentProblem

RATIO_KEYS = ("rE", "rP")
VARIANCE_KEYS = ("sigma0_sq", "sigmaE_sq", "sigmaP_sq")
SCALAR_DEFAULTS = {"mu0": 0.0, "p": 0.5, "r": 1.0, "sP": 0.0}
RATIO_DEFAULTS = {"rE": 1.0, "rP": 1.0}
BLOCK_KEYS = {
    "trust": {"rE_high", "cost"},
    "sweep": {"param", "from", "to", "steps", "quantity"},
    "mc": {"n", "seed"},
}
TOP_KEYS = set(SCALAR_DEFAULTS) | set(RATIO_KEYS) | set(VARIANCE_KEYS) | set(BLOCK_KEYS) | {
    "uninformative_prior"
}

DEFAULT_MC_N = 1_000_000
DEFAULT_SEED = 0


@dataclass
class ScenarioConfig:
    mu0: float = 0.0
    rE: float = 1.0
    rP: float = 1.0
    p: float = 0.5
    r: float = 1.0
    sP: float = 0.0
    uninformative_prior: bool = False
    variances: Optional[VariancePrior] = None
    trust: Optional[dict] = None
    sweep: Optional[dict] = None
    mc: dict = field(default_factory=lambda: {"n": DEFAULT_MC_N, "seed": DEFAULT_SEED})

    def beliefs(self) -> BeliefParams:
        return BeliefParams(self.mu0, self.rE, self.rP, self.uninformative_prior)

    def scenario(self) -> Scenario:
        return Scenario(self.beliefs(), self.p, self.r, self.sP)

    def trust_problem(self) -> TrustInvestmentProblem:
        if not self.trust or "rE_high" not in self.trust:
            raise ConfigError("trust.rE_high is required for trust computations")
        return TrustInvestmentProblem(
            self.scenario(), self.trust["rE_high"], self.trust.get("cost", 0.0)
        )

    def sweep_spec(self) -> SweepSpec:
        sw = self.sweep or {}
        missing = [k for k in ("param", "from", "to", "steps") if k not in sw]
        if missing:
            raise ConfigError(f"sweep.{missing[0]} is required for a sweep")
        trust = self.trust or {}
        return SweepSpec(
            self.scenario(),
            sw["param"],
            sw["from"],
            sw["to"],
            sw["steps"],
            sw.get("quantity", "loss"),
            rE_high=trust.get("rE_high"),
            cost=trust.get("cost", 0.0),
        )


def _number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    return float(value)


def _integer(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _block(name: str, value) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = sorted(set(value) - BLOCK_KEYS[name])
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown key")
    out = {}
    for key, v in value.items():
        path = f"{name}.{key}"
        if key in ("param", "quantity"):
            if not isinstance(v, str):
                raise ConfigError(f"{path}: expected a string, got {v!r}")
            out[key] = v
        elif key in ("steps", "n", "seed"):
            out[key] = _integer(path, v)
        else:
            out[key] = _number(path, v)
    return out


def parse_config(data) -> ScenarioConfig:
    """Parse a JSON configuration document (bytes or str)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"configuration is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(doc) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")

    ratio = [k for k in RATIO_KEYS if k in doc]
    variance = [k for k in VARIANCE_KEYS if k in doc]
    if ratio and variance:
        raise ConfigError(
            f"{ratio[0]} and {variance[0]}: give either relative precisions or variances, not both"
        )

    cfg = ScenarioConfig()
    for key, default in SCALAR_DEFAULTS.items():
        setattr(cfg, key, _number(key, doc.get(key, default)))
    if "uninformative_prior" in doc:
        if not isinstance(doc["uninformative_prior"], bool):
            raise ConfigError("uninformative_prior: expected true or false")
        cfg.uninformative_prior = doc["uninformative_prior"]

    if variance:
        missing = [k for k in VARIANCE_KEYS if k not in doc]
        if missing:
            raise ConfigError(f"{missing[0]}: required when variances are given")
        cfg.variances = VariancePrior(*(_number(k, doc[k]) for k in VARIANCE_KEYS))
        b = from_variances(cfg.variances, cfg.mu0)
        cfg.rE, cfg.rP = b.rE, b.rP
    else:
        for key, default in RATIO_DEFAULTS.items():
            setattr(cfg, key, _number(key, doc.get(key, default)))

    for name in BLOCK_KEYS:
        if name in doc:
            setattr(cfg, name, _block(name, doc[name]))
    mc = {"n": DEFAULT_MC_N, "seed": DEFAULT_SEED}
    mc.update(cfg.mc if "mc" in doc else {})
    cfg.mc = mc
    return cfg
