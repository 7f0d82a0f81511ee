"""Command-line frontend.

Exit codes: 0 success, 1 domain or configuration error, 2 usage error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import equilibrium, oracle, sweep, trust
from .beliefs import decision_with_ai, decision_without_ai
from .config import ScenarioConfig, parse_config
from .errors import AdvisorGameError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

DEFAULT_TRIALS = 1000
VERIFY_SE_TOL = 1e-8
VERIFY_LOSS_ABS, VERIFY_LOSS_REL = 1e-10, 1e-8
GRID_POINTS = 1_000_000


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="advisorgame", description="Advisor versus personal-AI equilibrium tools")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON scenario document")
    common.add_argument("--json", action="store_true", help="emit a JSON document")
    common.add_argument("--verbose", action="store_true", help="progress on stderr")
    for name in ("mu0", "rE", "rP", "p", "r", "sP"):
        common.add_argument(f"--{name}", type=float, help=f"override {name}")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", parents=[common], help="human decision for a recommendation")
    p.add_argument("--sE", type=float, required=True)
    p.add_argument("--with-ai", action="store_true", help="the human consults the personal AI")

    sub.add_parser("optimal", parents=[common], help="optimal strategic recommendation")
    sub.add_parser("naive", parents=[common], help="naive benchmark recommendation")

    p = sub.add_parser("sweep", parents=[common], help="comparative-statics sweep")
    p.add_argument("--out", help="CSV output file")
    p.add_argument("--svg", help="SVG chart output file")
    p.add_argument("--figures", metavar="DIR", help="write all six figure sweeps to DIR")
    p.add_argument("--param", choices=sweep.PARAMS)
    p.add_argument("--quantity", choices=sweep.QUANTITIES)
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--rE-high", dest="rE_high", type=float)

    p = sub.add_parser("trust", parents=[common], help="trust investment threshold")
    p.add_argument("--rE-high", dest="rE_high", type=float)
    p.add_argument("--cost", type=float)

    p = sub.add_parser("verify", parents=[common], help="check closed forms against oracles")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="Monte Carlo draws")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo expected loss")
    p.add_argument("--sE", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="Monte Carlo draws")
    return parser


def _load_config(args) -> ScenarioConfig:
    if args.config:
        with open(args.config, "rb") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = ScenarioConfig()
    overrides = {
        k: getattr(args, k)
        for k in ("mu0", "rE", "rP", "p", "r", "sP")
        if getattr(args, k) is not None
    }
    cfg = replace(cfg, **overrides)
    mc = dict(cfg.mc)
    for key in ("n", "seed"):
        if getattr(args, key, None) is not None:
            mc[key] = getattr(args, key)
    cfg.mc = mc
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _render(fields: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(fields) + "\n"
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in fields.items())


# -- subcommands -------------------------------------------------------------

def _cmd_decide(args, cfg, log) -> tuple[dict, int]:
    b = cfg.beliefs()
    if args.with_ai:
        return {"decision": float(decision_with_ai(b, args.sE, cfg.sP))}, EXIT_OK
    return {"decision": float(decision_without_ai(b, args.sE))}, EXIT_OK


def _cmd_optimal(args, cfg, log):
    out = equilibrium.optimal_recommendation(cfg.scenario())
    return {
        "sE_star": out.sE_star,
        "delta": out.delta,
        "loss": out.loss,
        "d0": out.d0,
        "d1": out.d1,
    }, EXIT_OK


def _cmd_naive(args, cfg, log):
    return {"sE_star": equilibrium.naive_recommendation(cfg.r)}, EXIT_OK


def _cmd_trust(args, cfg, log):
    block = dict(cfg.trust or {})
    if args.rE_high is not None:
        block["rE_high"] = args.rE_high
    if args.cost is not None:
        block["cost"] = args.cost
    cfg = replace(cfg, trust=block)
    tp = cfg.trust_problem()
    decision = trust.invest_decision(tp)
    slope = trust.threshold_slope_condition(tp)
    return {
        "threshold": decision.threshold,
        "alpha": trust.alpha_ratio(tp.rE_base, tp.rE_high, cfg.rP),
        "invest": decision.invest,
        "cost": tp.cost,
        "loss_base": decision.loss_base,
        "loss_high": decision.loss_high,
        "slope_lhs": slope.lhs,
        "slope_rhs": slope.rhs,
        "decreasing_in_p": slope.decreasing,
    }, EXIT_OK


def _cmd_sweep(args, cfg, log):
    if args.figures:
        results = sweep.write_figures(args.figures)
        fields = {}
        for name, res in results.items():
            log(f"wrote {name}.csv and {name}.svg")
            fields[f"{name}.argmax"] = res.argmax[0]
            fields[f"{name}.max"] = res.argmax[1]
        return fields, EXIT_OK
    if not args.out:
        raise _UsageError("advisorgame sweep: error: one of --out or --figures is required")
    block = dict(cfg.sweep or {})
    for key, attr in (("param", "param"), ("quantity", "quantity"), ("from", "start"),
                      ("to", "stop"), ("steps", "steps")):
        if getattr(args, attr) is not None:
            block[key] = getattr(args, attr)
    trust_block = dict(cfg.trust or {})
    if args.rE_high is not None:
        trust_block["rE_high"] = args.rE_high
    cfg = replace(cfg, sweep=block, trust=trust_block or None)
    res = sweep.run_sweep(cfg.sweep_spec())
    buf = io.BytesIO()
    sweep.emit_csv(res, buf)
    svg = None
    if args.svg:
        svg = io.BytesIO()
        sweep.emit_svg_chart(res, svg)
    with open(args.out, "wb") as fh:
        fh.write(buf.getvalue())
    if svg is not None:
        with open(args.svg, "wb") as fh:
            fh.write(svg.getvalue())
    log(f"wrote {len(res.rows)} rows")
    return {
        "rows": len(res.rows),
        "argmax": res.argmax[0],
        "max": res.argmax[1],
        "argmax_refined": res.argmax_refined[0],
        "argmin": res.argmin[0],
        "min": res.argmin[1],
    }, EXIT_OK


def _cmd_simulate(args, cfg, log):
    est = oracle.mc_expected_loss(cfg.scenario(), args.sE, cfg.mc["n"], cfg.mc["seed"])
    return {"mean": est.mean, "std_error": est.std_error, "n": est.n, "seed": est.seed}, EXIT_OK


def _cmd_verify(args, cfg, log):
    if args.trials < 1:
        raise AdvisorGameError("--trials must be positive")
    seed = cfg.mc["seed"]
    rng = np.random.default_rng(seed)
    max_se_dev = max_loss_dev = 0.0
    failures = 0
    for i, s in enumerate(oracle.random_scenarios(rng, args.trials)):
        out = equilibrium.optimal_recommendation(s)
        x = oracle.oracle_minimize(s)
        se_dev = abs(x - out.sE_star)
        loss_dev = abs(float(oracle.raw_loss(s, x)) - out.loss)
        max_se_dev = max(max_se_dev, se_dev)
        max_loss_dev = max(max_loss_dev, loss_dev)
        if se_dev > VERIFY_SE_TOL or loss_dev > max(VERIFY_LOSS_ABS, VERIFY_LOSS_REL * out.loss):
            failures += 1
        if (i + 1) % 100 == 0:
            log(f"{i + 1}/{args.trials} scenarios checked")

    s = cfg.scenario()
    out = equilibrium.optimal_recommendation(s)
    lo, hi = oracle.bracket_minimum(s)
    grid_x, grid_val = oracle.grid_min(s, lo, hi, GRID_POINTS)
    spacing = (hi - lo) / (GRID_POINTS - 1)
    grid_dev = abs(grid_x - out.sE_star)
    grid_ok = grid_dev <= spacing and grid_val >= out.loss - 1e-12
    est = oracle.mc_expected_loss(s, out.sE_star, cfg.mc["n"], seed)
    mc_z = abs(est.mean - out.loss) / est.std_error if est.std_error > 0 else 0.0
    mc_ok = abs(est.mean - out.loss) <= 3 * est.std_error + 1e-12 * (1 + out.loss)
    ok = failures == 0 and grid_ok and mc_ok
    return {
        "trials": args.trials,
        "seed": seed,
        "max_sE_deviation": max_se_dev,
        "max_loss_deviation": max_loss_dev,
        "failures": failures,
        "grid_argmin_deviation": grid_dev,
        "grid_spacing": spacing,
        "mc_mean": est.mean,
        "mc_std_error": est.std_error,
        "mc_z": mc_z,
        "passed": ok,
    }, EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "decide": _cmd_decide,
    "optimal": _cmd_optimal,
    "naive": _cmd_naive,
    "sweep": _cmd_sweep,
    "trust": _cmd_trust,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
}


def run_cli(argv, stdout=None, stderr=None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        stderr.write(parser.format_usage())
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    def log(msg):
        if args.verbose:
            stderr.write(f"{msg}\n")

    try:
        cfg = _load_config(args)
        fields, code = COMMANDS[args.command](args, cfg, log)
    except _UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (AdvisorGameError, ValueError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    if any(isinstance(v, float) and not math.isfinite(v) for v in fields.values()):
        stderr.write("error: non-finite result\n")
        return EXIT_DOMAIN
    stdout.write(_render(fields, args.json))
    return code


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
