"""Sweep orchestration over ``n`` and ``(m, n)`` pairs, and report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import __version__
from .berezin import delta_estimate
from .bridge import gamma_estimates, matrix_pair_seminorm
from .distance import Constants, ProxReport, hausdorff_estimate, prox_upper_bound
from .errors import InvalidParameterError
from .sphere import sphere_grid

log = logging.getLogger(__name__)

MAX_N = 16
CSV_COLUMNS = (
    "m", "n", "d_m", "d_n", "delta_m", "delta_n", "gammaA_m", "gammaB_m", "gammaA_n", "gammaB_n",
    "gamma_used", "certified_bound", "empirical_hausdorff", "seed",
)

# incremented once per per-n constant computation; lets tests check reuse
CONSTANT_EVALUATIONS = {"count": 0}


@dataclass(frozen=True)
class SweepConfig:
    """Sweep parameters.  ``pairs=None`` means every ``m <= n`` in the range.

    ``grid_scale`` multiplies every quadrature exactness degree, for density
    doubling checks.  ``time_budget`` (seconds) truncates the pair loop.
    """

    n_min: int = 1
    n_max: int = 8
    pairs: tuple | None = None
    quadrature_margin: int = 2
    family_size: int = 64
    samples: int = 32
    seed: int = 0
    epsilon: float = 0.05
    output_path: str | None = None
    format: str = "csv"
    grid_scale: int = 1
    time_budget: float | None = None

    def __post_init__(self):
        if not 1 <= self.n_min <= self.n_max <= MAX_N:
            raise InvalidParameterError(f"need 1 <= n_min <= n_max <= {MAX_N}")
        if self.format not in ("csv", "json"):
            raise InvalidParameterError("format must be csv or json")
        if self.family_size < 1 or self.samples < 1 or self.quadrature_margin < 0 or self.grid_scale < 1:
            raise InvalidParameterError("family_size, samples and grid_scale must be positive")
        if self.pairs is not None:
            pairs = tuple(sorted({(int(m), int(n)) for m, n in self.pairs}))
            for m, n in pairs:
                if not (1 <= m <= MAX_N and 1 <= n <= MAX_N):
                    raise InvalidParameterError(f"pair ({m}, {n}) outside 1..{MAX_N}")
            object.__setattr__(self, "pairs", pairs)

    def pair_list(self) -> list[tuple[int, int]]:
        if self.pairs is not None:
            return list(self.pairs)
        r = range(self.n_min, self.n_max + 1)
        return [(m, n) for m in r for n in r if m <= n]

    def levels(self) -> list[int]:
        ns = set(range(self.n_min, self.n_max + 1))
        for m, n in self.pair_list():
            ns.update((m, n))
        return sorted(ns)

    def exact_degree(self, total: int) -> int:
        return self.grid_scale * (total + self.quadrature_margin)


@dataclass
class SweepResult:
    config: SweepConfig
    constants: dict
    reports: list
    truncated: bool = False
    elapsed: dict = field(default_factory=dict)


def compute_constants(n: int, config: SweepConfig) -> Constants:
    """``delta^B_n``, ``gamma^A_n`` and ``gamma^B_n`` for one level."""
    CONSTANT_EVALUATIONS["count"] += 1
    grid = sphere_grid(config.exact_degree(2 * n))
    trials = max(1, config.family_size // 8)
    delta = delta_estimate(n, trials=trials, seed=config.seed, grid=grid)
    g = gamma_estimates(n, grid=grid, family_size=config.family_size, seed=config.seed)
    return Constants(n, float(delta), g.gamma_A, g.gamma_B)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Per-level constants once, then one report per pair in lexicographic order."""
    t0 = time.perf_counter()
    constants = {n: compute_constants(n, config) for n in config.levels()}
    elapsed = {"constants": time.perf_counter() - t0}
    reports = []
    truncated = False
    for m, n in config.pair_list():
        if config.time_budget is not None and time.perf_counter() - t0 > config.time_budget:
            truncated = True
            log.warning("time budget exhausted before pair (%d, %d)", m, n)
            break
        base = prox_upper_bound(m, n, constants, seed=config.seed, exact_degree=config.exact_degree(m + n))
        L = matrix_pair_seminorm(m, n, base.gamma_used)
        h = hausdorff_estimate(m, n, L, samples=config.samples, seed=config.seed)
        reports.append(replace(prox_upper_bound(m, n, constants, seed=config.seed, empirical=h.value,
                                                exact_degree=config.exact_degree(m + n)), samples=config.samples))
        reports[-1].details.update({"unconverged": h.unconverged, "from_left": h.from_left,
                                    "from_right": h.from_right})
    elapsed["total"] = time.perf_counter() - t0
    return SweepResult(config, constants, reports, truncated, elapsed)


# -- emission -------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def render_csv(reports: list[ProxReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    cfg = asdict(result.config)
    cfg["pairs"] = [list(p) for p in result.config.pair_list()]
    doc = {
        "version": __version__,
        "config": cfg,
        "truncated": result.truncated,
        "constants": [asdict(c) for _, c in sorted(result.constants.items())],
        "reports": [r.as_dict() for r in result.reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def emit_report(result: SweepResult | list, format: str, path: str | Path) -> None:
    """Write the reports as CSV (fixed columns) or JSON (every field, config and version)."""
    reports = result.reports if isinstance(result, SweepResult) else list(result)
    if not reports:
        raise InvalidParameterError("no reports to emit")
    if format == "csv":
        text = render_csv(reports)
    elif format == "json":
        if not isinstance(result, SweepResult):
            result = SweepResult(SweepConfig(), {}, reports)
        text = render_json(result)
    else:
        raise InvalidParameterError("format must be csv or json")
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InvalidParameterError(f"cannot write {path}: {exc}") from exc


def load_reports(path: str | Path) -> list[ProxReport]:
    """Parse a JSON report file back into :class:`ProxReport` objects."""
    doc = json.loads(Path(path).read_text())
    return [ProxReport(**r) for r in doc["reports"]]


def consistency_violations(reports: list[ProxReport]) -> list[ProxReport]:
    return [r for r in reports if not math.isnan(r.empirical_hausdorff) and not r.consistent]
