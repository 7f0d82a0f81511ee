"""One-dimensional comparative-statics sweeps with CSV and SVG output."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import BinaryIO, Optional

import numpy as np

from .equilibrium import (
    Scenario,
    intensity_from_ratios,
    loss_from_ratios,
    peak_adoption,
)
from .errors import SweepCheckError, SweepSpecError
from .trust import threshold_from_values

PARAMS = ("p", "t", "rE", "rP")
QUANTITIES = ("delta", "loss", "threshold")
MIN_T = 1e-6

# Shape each quantity must have along each parameter when everything else is
# held fixed.  Combinations not listed carry no shape guarantee.
SHAPES = {
    ("delta", "p"): "increasing",
    ("delta", "t"): "hump",
    ("loss", "p"): "hump",
    ("loss", "t"): "increasing",
    ("loss", "rE"): "decreasing",
    ("loss", "rP"): "increasing",
    ("threshold", "p"): "monotone",
}


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    param: str
    start: float
    stop: float
    steps: int
    quantity: str = "loss"
    rE_high: Optional[float] = None
    cost: float = 0.0

    def __post_init__(self):
        if self.param not in PARAMS:
            raise SweepSpecError(f"param must be one of {PARAMS}, got {self.param!r}")
        if self.quantity not in QUANTITIES:
            raise SweepSpecError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        if not (isinstance(self.steps, int) and self.steps >= 2):
            raise SweepSpecError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise SweepSpecError(f"need finite start < stop, got {self.start!r}, {self.stop!r}")
        if self.param == "p" and not (0 <= self.start and self.stop <= 1):
            raise SweepSpecError("p sweeps must stay within [0, 1]")
        if self.param == "t" and self.start < MIN_T:
            raise SweepSpecError(f"t sweeps must start at or above {MIN_T:g}")
        if self.param in ("rE", "rP") and self.start <= 0:
            raise SweepSpecError(f"{self.param} sweeps must stay positive")
        if self.base.beliefs.uninformative_prior:
            raise SweepSpecError("sweeps need an informative prior")
        if self.quantity == "threshold":
            if self.param != "p":
                raise SweepSpecError("threshold sweeps run over p only")
            if self.rE_high is None or not self.rE_high > self.base.beliefs.rE:
                raise SweepSpecError("threshold sweeps need rE_high above the base rE")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def metadata(self) -> dict:
        b = self.base.beliefs
        meta = {
            "param": self.param,
            "quantity": self.quantity,
            "from": self.start,
            "to": self.stop,
            "steps": self.steps,
            "mu0": b.mu0,
            "rE": b.rE,
            "rP": b.rP,
            "p": self.base.p,
            "r": self.base.r,
            "sP": self.base.sP,
        }
        if self.quantity == "threshold":
            meta["rE_high"] = self.rE_high
            meta["cost"] = self.cost
        # Swept entries are overwritten by the grid; t sweeps derive rP.
        meta[self.param] = "swept"
        if self.param == "t":
            meta["rP"] = "t*(1+rE)"
        meta["seed"] = "none"
        return meta


@dataclass
class SweepResult:
    rows: list
    argmax: Optional[tuple] = None
    argmin: Optional[tuple] = None
    argmax_refined: Optional[tuple] = None
    argmin_refined: Optional[tuple] = None
    metadata: dict = field(default_factory=dict)

    @property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.rows])

    @property
    def ys(self) -> np.ndarray:
        return np.array([y for _, y in self.rows])


def evaluate(spec: SweepSpec, xs: np.ndarray) -> np.ndarray:
    """Quantity values at parameter values ``xs``; elementwise, so chunk-safe."""
    s = spec.base
    b = s.beliefs
    p, rE, rP = s.p, b.rE, b.rP
    if spec.param == "p":
        p = xs
    elif spec.param == "rE":
        rE = xs
    elif spec.param == "rP":
        rP = xs
    else:
        rP = xs * (1 + rE)
    if spec.quantity == "delta":
        values = intensity_from_ratios(p, rE, rP)
    elif spec.quantity == "loss":
        values = loss_from_ratios(p, rE, rP, s.dev_sq)
    else:
        values = threshold_from_values(p, s.r, b.mu0, s.sP, rE, spec.rE_high, rP)
    return np.broadcast_to(np.asarray(values, dtype=float), xs.shape).copy()


def _refine(xs, ys, i):
    # Vertex of the parabola through the grid extremum and its neighbours.
    if i == 0 or i == len(xs) - 1:
        return float(xs[i]), float(ys[i])
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    curv = y0 - 2 * y1 + y2
    if curv == 0:
        return float(xs[i]), float(y1)
    h = xs[i + 1] - xs[i]
    return float(xs[i] + h * (y0 - y2) / (2 * curv)), float(y1 - (y0 - y2) ** 2 / (8 * curv))


def check_shape(shape: str, ys: np.ndarray) -> Optional[str]:
    """Return a description of the first violation of ``shape``, or None.

    Differences within rounding of the curve's scale are tolerated.
    """
    tol = 64 * np.finfo(float).eps * float(np.max(np.abs(ys), initial=0.0))
    d = np.diff(ys)
    if shape == "increasing":
        bad = np.nonzero(d < -tol)[0]
    elif shape == "decreasing":
        bad = np.nonzero(d > tol)[0]
    elif shape == "monotone":
        bad = np.nonzero(d < -tol)[0] if np.all(d >= -tol) else np.nonzero(d > tol)[0]
    elif shape == "hump":
        peak = int(np.argmax(ys))
        bad = np.concatenate(
            [np.nonzero(d[:peak] < -tol)[0], peak + np.nonzero(d[peak:] > tol)[0]]
        )
    else:
        raise ValueError(f"unknown shape {shape!r}")
    if bad.size:
        return f"not {shape} at row {int(bad[0])}"
    return None


def run_sweep(spec: SweepSpec, workers: int = 1, check: bool = True) -> SweepResult:
    xs = spec.grid()
    if workers > 1:
        chunks = np.array_split(xs, workers)
        with ThreadPoolExecutor(workers) as pool:
            ys = np.concatenate(list(pool.map(lambda c: evaluate(spec, c), chunks)))
    else:
        ys = evaluate(spec, xs)
    if not np.all(np.isfinite(ys)):
        raise SweepCheckError("sweep produced non-finite values")

    shape = SHAPES.get((spec.quantity, spec.param))
    if check and shape is not None:
        problem = check_shape(shape, ys)
        if problem:
            raise SweepCheckError(f"{spec.quantity} vs {spec.param}: {problem}")

    imax, imin = int(np.argmax(ys)), int(np.argmin(ys))
    return SweepResult(
        rows=[(float(x), float(y)) for x, y in zip(xs, ys)],
        argmax=(float(xs[imax]), float(ys[imax])),
        argmin=(float(xs[imin]), float(ys[imin])),
        argmax_refined=_refine(xs, ys, imax),
        argmin_refined=_refine(xs, ys, imin),
        metadata=spec.metadata(),
    )


def peak_adoption_dual_check(rE: float, rP: float, steps: int = 100_000) -> tuple[float, float]:
    """Analytic peak adoption next to a grid minimizer of ``B/p + A/(1-p)``.

    The grid is ``i/(steps+1)`` for ``i = 1..steps``, so its resolution is
    ``1/(steps+1)``.
    """
    if steps < 1000:
        raise SweepSpecError(f"steps must be at least 1000, got {steps}")
    a = (1 + rE) ** 2
    b = (1 + rE + rP) ** 2
    ps = np.arange(1, steps + 1) / (steps + 1)
    d = b / ps + a / (1 - ps)
    return float(peak_adoption(rE, rP)), float(ps[int(np.argmin(d))])


# -- output -----------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _extrema_metadata(res: SweepResult) -> dict:
    out = {}
    for name in ("argmax", "argmax_refined", "argmin", "argmin_refined"):
        point = getattr(res, name)
        if point is not None:
            out[name] = f"{_fmt(point[0])};{_fmt(point[1])}"
    return out


def emit_csv(res: SweepResult, destination: BinaryIO) -> None:
    lines = [f"# {k}={_fmt(v)}" for k, v in {**res.metadata, **_extrema_metadata(res)}.items()]
    lines.append("param,value")
    lines.extend(f"{_fmt(x)},{_fmt(y)}" for x, y in res.rows)
    destination.write(("\n".join(lines) + "\n").encode("utf-8"))


def read_csv(source: BinaryIO) -> tuple[dict, list]:
    """Parse the output of :func:`emit_csv` back into metadata and rows."""
    meta, rows = {}, []
    header_seen = False
    for line in source.read().decode("utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif not header_seen:
            if line != "param,value":
                raise ValueError(f"unexpected header {line!r}")
            header_seen = True
        elif line:
            x, y = line.split(",")
            rows.append((float(x), float(y)))
    return meta, rows


SVG_WIDTH, SVG_HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 20, 20, 50


class _Frame:
    """Affine map from data coordinates to SVG pixel coordinates."""

    def __init__(self, xs, ys):
        self.x0, self.x1 = float(np.min(xs)), float(np.max(xs))
        self.y0, self.y1 = float(np.min(ys)), float(np.max(ys))
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 1, self.x1 + 1
        if self.y1 == self.y0:
            pad = abs(self.y0) or 1.0
            self.y0, self.y1 = self.y0 - pad, self.y1 + pad
        self.width = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        self.height = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(self, x):
        return MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * self.width

    def py(self, y):
        return MARGIN_TOP + (1 - (y - self.y0) / (self.y1 - self.y0)) * self.height


def emit_svg_chart(res: SweepResult, destination: BinaryIO) -> None:
    if not res.rows:
        raise ValueError("cannot chart an empty sweep")
    xs, ys = res.xs, res.ys
    fr = _Frame(xs, ys)
    left, right = MARGIN_LEFT, SVG_WIDTH - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, SVG_HEIGHT - MARGIN_BOTTOM
    xlabel = res.metadata.get("param", "x")
    ylabel = res.metadata.get("quantity", "y")
    points = " ".join(f"{fr.px(x):.2f},{fr.py(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{left}" y="{bottom + 18}" font-size="12" text-anchor="middle">{fr.x0:.6g}</text>',
        f'<text x="{right}" y="{bottom + 18}" font-size="12" text-anchor="middle">{fr.x1:.6g}</text>',
        f'<text x="{left - 6}" y="{bottom}" font-size="12" text-anchor="end">{fr.y0:.6g}</text>',
        f'<text x="{left - 6}" y="{top + 10}" font-size="12" text-anchor="end">{fr.y1:.6g}</text>',
        f'<text x="{(left + right) / 2:.2f}" y="{SVG_HEIGHT - 10}" font-size="14" '
        f'text-anchor="middle">{xlabel}</text>',
        f'<text x="16" y="{(top + bottom) / 2:.2f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 16 {(top + bottom) / 2:.2f})">{ylabel}</text>',
        f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>',
    ]
    if res.argmax is not None:
        mx, my = res.argmax
        parts.append(
            f'<circle class="argmax" cx="{fr.px(mx):.2f}" cy="{fr.py(my):.2f}" r="4" fill="firebrick"/>'
        )
    parts.append("</svg>")
    destination.write(("\n".join(parts) + "\n").encode("utf-8"))


# -- figure presets -----------------------------------------------------------

DEFAULT_SCENARIO = dict(mu0=0.0, rE=1.0, rP=1.0, p=0.5, r=1.0, sP=0.0)


def figure_specs(steps: int = 1001, base: Optional[Scenario] = None) -> dict[str, SweepSpec]:
    """The six comparative-statics curves, on artifact-default parameters."""
    base = base or Scenario.from_values(**DEFAULT_SCENARIO)
    return {
        "delta_vs_p": SweepSpec(base, "p", 0.0, 1.0, steps, "delta"),
        "delta_vs_t": SweepSpec(base, "t", MIN_T, 10.0, steps, "delta"),
        "loss_vs_p": SweepSpec(base, "p", 0.0, 1.0, steps, "loss"),
        "loss_vs_t": SweepSpec(base, "t", MIN_T, 10.0, steps, "loss"),
        "loss_vs_rE": SweepSpec(base, "rE", 0.01, 10.0, steps, "loss"),
        "loss_vs_rP": SweepSpec(base, "rP", 0.01, 10.0, steps, "loss"),
    }


def write_figures(outdir: str, steps: int = 1001, base: Optional[Scenario] = None) -> dict:
    """Run every figure sweep and write ``<name>.csv`` and ``<name>.svg``."""
    os.makedirs(outdir, exist_ok=True)
    results = {}
    for name, spec in figure_specs(steps, base).items():
        res = run_sweep(spec)
        with open(os.path.join(outdir, f"{name}.csv"), "wb") as fh:
            emit_csv(res, fh)
        with open(os.path.join(outdir, f"{name}.svg"), "wb") as fh:
            emit_svg_chart(res, fh)
        results[name] = res
    return results
