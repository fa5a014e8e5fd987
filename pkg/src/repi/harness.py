"""Configuration-driven parameter sweeps over the inequality checks."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from itertools import combinations_with_replacement, product
from pathlib import Path

import numpy as np
import yaml

from repi.densities import discretize_pair, family_from_spec
from repi.errors import ConfigError, ReproError
from repi.quantum import QuantumOrderParams, check_qrepi, random_gaussian_state
from repi.report import EpiCheckCell, ExperimentReport, make_provenance
from repi.young import YoungExponents, check_weighted_repi, search_pinf_violation, solve_exponents, young_norm_check

log = logging.getLogger(__name__)

KINDS = (
    "classical_weighted",
    "classical_unweighted",
    "shannon_limit",
    "young_equality",
    "lemma_search",
    "pinf_search",
    "quantum",
)
THEOREM_KINDS = ("classical_weighted", "classical_unweighted", "quantum")
NEEDS_P = THEOREM_KINDS + ("young_equality",)
NEEDS_T = ("classical_weighted", "shannon_limit", "quantum")
NEEDS_PAIRS = ("classical_weighted", "classical_unweighted", "shannon_limit", "young_equality", "pinf_search")
THREADS_ENV = "REPI_THREADS"


def parse_family(text):
    """``"gaussian:sigma=2,mean=1"`` -> ``{"family": "gaussian", "sigma": 2.0, "mean": 1.0}``."""
    if isinstance(text, dict):
        return dict(text)
    name, _, rest = str(text).partition(":")
    spec = {"family": name.strip().lower()}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value in {text!r}")
        spec[key.strip()] = yaml.safe_load(value)
    return spec


@dataclass
class SweepConfig:
    """Everything needed to reproduce one sweep.  Defaults are listed in ``repi sweep --help``."""

    kind: str
    pairs: list = field(default_factory=list)
    p_grid: list = field(default_factory=list)
    t_grid: list = field(default_factory=list)
    alpha_policy: str = "boundary"
    alpha_value: float | None = None
    alpha_schedule: list | None = None
    n_list: list = field(default_factory=lambda: [4096])
    seed: int = 0
    tol_rel: float = 1e-6
    eps_mass: float = 1e-6
    refine_below: float = 1.05
    ensemble_size: int = 100
    modes: list = field(default_factory=lambda: [1])
    temperature_scale: float = 1.0
    pinf_mode: str = "alpha_one"
    lemma_p_max: float = 10.0
    workers: int = 1
    output_format: str = "json"

    @classmethod
    def from_mapping(cls, data) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a mapping")
        data = dict(data)
        known = {f.name for f in fields(cls)}
        families = data.pop("families", None)
        pairing = data.pop("pairing", "unordered")
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        if "kind" not in data:
            raise ConfigError("kind", "missing")
        if families is not None:
            if not isinstance(families, list) or not families:
                raise ConfigError("families", "must be a non-empty list")
            if pairing == "unordered":
                data["pairs"] = [list(p) for p in combinations_with_replacement(families, 2)]
            elif pairing == "ordered":
                data["pairs"] = [list(p) for p in product(families, repeat=2)]
            elif pairing == "self":
                data["pairs"] = [[f, f] for f in families]
            else:
                raise ConfigError("pairing", f"must be unordered, ordered or self, got {pairing!r}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}, got {self.kind!r}")
        try:
            self.p_grid = [float(p) for p in self.p_grid]
            self.t_grid = [float(t) for t in self.t_grid]
            self.n_list = [int(n) for n in self.n_list]
            self.modes = [int(m) for m in self.modes]
        except (TypeError, ValueError) as exc:
            raise ConfigError("grids", f"non-numeric entry ({exc})") from None
        if self.kind in NEEDS_P and not self.p_grid:
            raise ConfigError("p_grid", "must be non-empty")
        if self.kind in THEOREM_KINDS:
            for i, p in enumerate(self.p_grid):
                if not p > 1:
                    raise ConfigError(f"p_grid[{i}]", f"must exceed 1 for Renyi theorem checks, got {p}")
        if self.kind in NEEDS_T:
            if not self.t_grid:
                raise ConfigError("t_grid", "must be non-empty")
            for i, t in enumerate(self.t_grid):
                if not 0 < t < 1:
                    raise ConfigError(f"t_grid[{i}]", f"must lie in (0, 1), got {t}")
        if self.kind in NEEDS_PAIRS:
            if not self.pairs:
                raise ConfigError("pairs", "must be non-empty")
            parsed = []
            for i, pair in enumerate(self.pairs):
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise ConfigError(f"pairs[{i}]", "must be a two-element list")
                try:
                    specs = [parse_family(x) for x in pair]
                    for s in specs:
                        family_from_spec(s)
                except (ReproError, ValueError, TypeError) as exc:
                    raise ConfigError(f"pairs[{i}]", str(exc)) from None
                parsed.append(specs)
            self.pairs = parsed
        if not self.n_list or any(n < 16 for n in self.n_list):
            raise ConfigError("n_list", "must be non-empty with every N >= 16")
        if self.alpha_policy not in ("boundary", "fixed", "schedule"):
            raise ConfigError("alpha_policy", f"must be boundary, fixed or schedule, got {self.alpha_policy!r}")
        if self.alpha_policy == "fixed":
            if self.alpha_value is None:
                raise ConfigError("alpha_value", "required when alpha_policy is fixed")
            self.alpha_value = float(self.alpha_value)
        if self.alpha_policy == "schedule":
            if not self.alpha_schedule or len(self.alpha_schedule) != len(self.p_grid):
                raise ConfigError("alpha_schedule", "needs one alpha per p_grid entry")
            self.alpha_schedule = [float(a) for a in self.alpha_schedule]
        if self.kind in THEOREM_KINDS:
            for i, p in enumerate(self.p_grid):
                if self.alpha_for(i) < (p + 1) / 2 - 1e-12:
                    where = "alpha_value" if self.alpha_policy == "fixed" else f"alpha_schedule[{i}]"
                    raise ConfigError(where, f"alpha {self.alpha_for(i)} is below (p+1)/2 for p = {p}")
        if self.kind in ("lemma_search", "quantum") and self.ensemble_size < 1:
            raise ConfigError("ensemble_size", "must be positive")
        if self.kind == "lemma_search" and not self.lemma_p_max > 1:
            raise ConfigError("lemma_p_max", "must exceed 1")
        if any(m not in (1, 2) for m in self.modes) or not self.modes:
            raise ConfigError("modes", "entries must be 1 or 2")
        if self.pinf_mode not in ("alpha_one", "alpha_schedule"):
            raise ConfigError("pinf_mode", "must be alpha_one or alpha_schedule")
        if self.workers < 1:
            raise ConfigError("workers", "must be at least 1")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format", "must be json or csv")
        if self.tol_rel < 0:
            raise ConfigError("tol_rel", "must be non-negative")

    def alpha_for(self, i: int) -> float:
        p = self.p_grid[i]
        if self.alpha_policy == "fixed":
            return self.alpha_value
        if self.alpha_policy == "schedule":
            return self.alpha_schedule[i]
        return (p + 1) / 2

    def to_dict(self):
        return asdict(self)


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    return SweepConfig.from_mapping(data)


def _cell_seed(seed, *key):
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def _tasks(cfg: SweepConfig):
    """Yield zero-argument callables, each returning a list of cells, in grid order."""
    kind = cfg.kind
    pairs = [(family_from_spec(a), family_from_spec(b)) for a, b in cfg.pairs]
    common = dict(tol_rel=cfg.tol_rel, refine_below=cfg.refine_below)
    if kind == "classical_weighted":
        for (fx, fy), (i, p), t, n in product(pairs, enumerate(cfg.p_grid), cfg.t_grid, cfg.n_list):
            a = cfg.alpha_for(i)
            yield _labelled(lambda fx=fx, fy=fy, p=p, a=a, t=t, n=n: [check_weighted_repi(fx, fy, p, a, t, n=n, **common)],
                            fx, fy, p=p, alpha=a, t=t, n=n)
    elif kind == "classical_unweighted":
        for (fx, fy), (i, p), n in product(pairs, enumerate(cfg.p_grid), cfg.n_list):
            a = cfg.alpha_for(i)
            yield _labelled(lambda fx=fx, fy=fy, p=p, a=a, n=n: [
                check_weighted_repi(fx, fy, p, a, n=n, unweighted=True, **common)
            ], fx, fy, p=p, alpha=a, n=n)
    elif kind == "shannon_limit":
        for (fx, fy), t, n in product(pairs, cfg.t_grid, cfg.n_list):
            yield _labelled(lambda fx=fx, fy=fy, t=t, n=n: [
                check_weighted_repi(fx, fy, 1.0, 1.0, t, n=n, experiment="shannon_limit", **common)
            ], fx, fy, p=1.0, alpha=1.0, t=t, n=n)
    elif kind == "young_equality":
        for (fx, fy), p, n in product(pairs, cfg.p_grid, cfg.n_list):
            def run(fx=fx, fy=fy, p=p, n=n):
                fg, gg = discretize_pair(fx, fy, n=n)
                cell = young_norm_check(fg, gg, YoungExponents.symmetric(p))
                cell.experiment, cell.tol_rel, cell.n = "young_equality", cfg.tol_rel, n
                return [cell]
            yield _labelled(run, fx, fy, p=p, n=n)
    elif kind == "lemma_search":
        for i in range(cfg.ensemble_size):
            def run(i=i):
                rng = np.random.default_rng(_cell_seed(cfg.seed, i))
                p = 1 + (cfg.lemma_p_max - 1) * (1 - rng.random())
                target = 1 - 1 / p
                a = target * rng.uniform(1e-6, 1 - 1e-6)
                e, best = solve_exponents(a, target - a, p)
                return [EpiCheckCell(
                    "lemma_search", best, target, p=p, alpha=(p + 1) / 2, tol_rel=cfg.tol_rel,
                    extra={"a": a, "b": target - a, "q": e.q, "r": e.r},
                )]
            yield run
    elif kind == "pinf_search":
        for (fx, fy), n in product(pairs, cfg.n_list):
            yield _labelled(lambda fx=fx, fy=fy, n=n: search_pinf_violation([(fx, fy)], cfg.pinf_mode, n=n).cells,
                            fx, fy, n=n)
    elif kind == "quantum":
        for i in range(cfg.ensemble_size):
            modes = cfg.modes[i % len(cfg.modes)]
            def run(i=i, modes=modes):
                x = random_gaussian_state(modes, _cell_seed(cfg.seed, i, 0), cfg.temperature_scale)
                y = random_gaussian_state(modes, _cell_seed(cfg.seed, i, 1), cfg.temperature_scale)
                out = []
                for tau, (j, p) in product(cfg.t_grid, enumerate(cfg.p_grid)):
                    cell = check_qrepi(x, y, tau, QuantumOrderParams(p, cfg.alpha_for(j)), tol_rel=cfg.tol_rel)
                    cell.extra["pair"] = i
                    out.append(cell)
                return out
            yield run


def _labelled(fn, fx=None, fy=None, **context):
    """Attach grid coordinates so a failed task still produces an identifiable cell."""
    if fx is not None:
        context.update(family_x=fx.label, family_y=fy.label)
    fn.context = context
    return fn


def _safe(task, kind):
    try:
        return task()
    except Exception as exc:  # recorded per cell; the sweep continues
        context = getattr(task, "context", {})
        log.warning("cell failed %s: %s: %s", context, type(exc).__name__, exc)
        return [EpiCheckCell.failed(kind, f"{type(exc).__name__}: {exc}", **context)]


def resolve_workers(cfg: SweepConfig, workers: int | None = None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(THREADS_ENV, f"must be an integer, got {env!r}") from None
    return workers or cfg.workers


def run_sweep(cfg: SweepConfig, *, workers: int | None = None) -> ExperimentReport:
    """Evaluate every cell of the configured grid; cells come back in grid order."""
    start = time.perf_counter()
    tasks = list(_tasks(cfg))
    width = resolve_workers(cfg, workers)
    log.info("sweep %s: %d tasks on %d worker(s)", cfg.kind, len(tasks), width)
    if width == 1:
        groups = [_safe(t, cfg.kind) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            groups = list(pool.map(lambda t: _safe(t, cfg.kind), tasks))
    cells = [c for group in groups for c in group]
    for i, c in enumerate(cells):
        c.index = i
    report = ExperimentReport(cfg.to_dict(), cells, make_provenance(cfg.seed))
    report.wall_time = time.perf_counter() - start
    summary = report.summary
    log.info("sweep %s: %d cells, %d violations, min ratio %s",
             cfg.kind, summary["cell_count"], summary["violation_count"], summary["min_ratio"])
    return report


def emit_report(report: ExperimentReport, fmt: str = "json", *, deterministic: bool = False) -> bytes:
    """Serialize a report: ``json`` is the full nested record, ``csv`` one row per cell."""
    if fmt == "json":
        return report.to_json(deterministic=deterministic).encode()
    if fmt == "csv":
        return report.to_csv().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def default_weighted_config(**overrides) -> SweepConfig:
    """The Gaussian-pair weighted sweep: p in {1.5, 2, 3}, t in {0.25, 0.5, 0.75}."""
    data = {
        "kind": "classical_weighted",
        "pairs": [[{"family": "gaussian", "sigma": 1.0}, {"family": "gaussian", "sigma": 1.0}]],
        "p_grid": [1.5, 2.0, 3.0],
        "t_grid": [0.25, 0.5, 0.75],
    }
    data.update(overrides)
    return SweepConfig.from_mapping(data)


__all__ = [
    "SweepConfig",
    "load_config",
    "run_sweep",
    "emit_report",
    "parse_family",
    "default_weighted_config",
]
