"""Parameter sweeps, grid search, canned experiments, and CSV persistence.

Swept parameters are addressed by dotted paths into the scenario, with
1-based tier indices matching the usual tier numbering:

    tiers[2].density            tiers[1].cache.cache_size
    tiers[2].radio.sir_threshold tiers[*].rho
    content.popularity_exponent  costs.cache_unit_cost

``tiers[*]`` applies the value to every tier. Result rows are flattened
metric reports; float cells are printed with 17 significant digits so a
fixed config and seed reproduce byte-identical CSV files. A sidecar
``<out>.meta.json`` records the config hash, seed, and engine versions.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
import re
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analytic import build_coverage_table
from .metrics import MetricReport, analytic_report
from .montecarlo import run_simulation
from .quadrature import QuadratureError
from .scenario import ConfigError, ScenarioConfig

__all__ = [
    "SweepSpec",
    "GridSearchResult",
    "set_parameter",
    "get_parameter",
    "run_experiment",
    "grid_search",
    "run_preset",
    "write_csv",
    "PRESET_NAMES",
    "CSV_SCHEMA_VERSION",
]

CSV_SCHEMA_VERSION = 1

_ENGINES = {"analytic": "analytic", "mc": "mc", "monte-carlo": "mc", "both": "both"}

_METRIC_COLUMNS = [
    "coverage", "bound_value", "p_hit", "p_bh", "p_bh_operational",
    "coverage_all_bs", "ase", "cost", "cost_over_backhaul_unit", "efficiency",
]
_SE_COLUMNS = ["se_coverage", "se_p_hit", "se_p_bh", "se_ase", "se_cost",
               "se_efficiency"]
_ERR_COLUMNS = ["err_coverage", "err_p_hit", "err_p_bh", "err_ase", "err_cost",
                "err_efficiency"]


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: a path into the scenario plus its value grid."""

    parameter_path: str
    grid: tuple
    engine: str = "analytic"

    def __post_init__(self):
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be non-empty")
        if self.engine not in _ENGINES:
            raise ValueError(f"engine must be one of {sorted(_ENGINES)}")


@dataclass(frozen=True)
class GridSearchResult:
    """Argmax point, its efficiency, and the full evaluated surface."""

    best_point: dict
    best_efficiency: float
    surface: tuple


_PATH_RE = re.compile(r"^tiers\[(\d+|\*)\]\.(.+)$")

# Fields that must stay integers when set through a parameter path.
_INT_PARAMS = {"cache_size", "library_size", "num_snapshots", "master_seed",
               "nakagami_los", "nakagami_nlos"}


def _coerce_value(field_name: str, value):
    if field_name in _INT_PARAMS:
        as_float = float(value)
        if not as_float.is_integer():
            raise ConfigError(field_name, "expected an integer value")
        return int(as_float)
    return float(value)


def _replace_tier(scenario: ScenarioConfig, index: int, rest: str, value):
    tier = scenario.tiers[index]
    parts = rest.split(".")
    try:
        if parts[0] in ("density", "rho") and len(parts) == 1:
            new_tier = dataclasses.replace(tier, **{parts[0]: float(value)})
        elif parts[0] == "radio" and len(parts) == 2:
            radio = dataclasses.replace(
                tier.radio, **{parts[1]: _coerce_value(parts[1], value)})
            new_tier = dataclasses.replace(tier, radio=radio)
        elif parts[0] == "cache" and len(parts) == 2:
            cache = dataclasses.replace(
                tier.cache, **{parts[1]: _coerce_value(parts[1], value)})
            new_tier = dataclasses.replace(tier, cache=cache)
        else:
            raise ConfigError(rest, "unknown tier parameter path")
    except TypeError as exc:  # unknown dataclass field
        raise ConfigError(rest, str(exc)) from exc
    tiers = list(scenario.tiers)
    tiers[index] = new_tier
    return dataclasses.replace(scenario, tiers=tuple(tiers))


def set_parameter(scenario: ScenarioConfig, path: str, value) -> ScenarioConfig:
    """Return a copy of ``scenario`` with the addressed parameter replaced."""
    m = _PATH_RE.match(path)
    if m:
        rest = m.group(2)
        if m.group(1) == "*":
            for i in range(scenario.num_tiers):
                scenario = _replace_tier(scenario, i, rest, value)
            return scenario
        index = int(m.group(1)) - 1
        if not 0 <= index < scenario.num_tiers:
            raise ConfigError(path, f"tier index out of range 1..{scenario.num_tiers}")
        return _replace_tier(scenario, index, rest, value)
    parts = path.split(".")
    if len(parts) == 2 and parts[0] in ("content", "costs", "protocol", "integration"):
        section = getattr(scenario, parts[0])
        try:
            replaced = dataclasses.replace(
                section, **{parts[1]: _coerce_value(parts[1], value)})
            return dataclasses.replace(scenario, **{parts[0]: replaced})
        except TypeError as exc:
            raise ConfigError(path, str(exc)) from exc
    if len(parts) == 1 and parts[0] == "rate_log_base":
        return dataclasses.replace(scenario, rate_log_base=float(value))
    raise ConfigError(path, "parameter path does not resolve")


def get_parameter(scenario: ScenarioConfig, path: str):
    """Read the parameter addressed by ``path``."""
    m = _PATH_RE.match(path)
    if m:
        if m.group(1) == "*":
            raise ConfigError(path, "cannot read a wildcard path")
        tier = scenario.tiers[int(m.group(1)) - 1]
        node = tier
        for part in m.group(2).split("."):
            node = getattr(node, part)
        return node
    node = scenario
    try:
        for part in path.split("."):
            node = getattr(node, part)
    except AttributeError as exc:
        raise ConfigError(path, "parameter path does not resolve") from exc
    return node


def _report_cells(report: MetricReport | None) -> dict:
    cells = dict.fromkeys(_METRIC_COLUMNS + _SE_COLUMNS + _ERR_COLUMNS
                          + ["provenance"], "")
    if report is None:
        return cells
    cells["provenance"] = report.provenance
    for name in ("coverage", "p_hit", "p_bh", "ase", "cost", "efficiency"):
        cells[name] = getattr(report, name)
    cells["bound_value"] = report.bound_value
    cells["p_bh_operational"] = report.p_bh_operational
    cells["coverage_all_bs"] = report.coverage_all_bs
    for i, rho in enumerate(report.per_tier_coverage_density, start=1):
        cells[f"rho_{i}"] = rho
    if report.stderr:
        for key, value in report.stderr.items():
            if f"se_{key}" in _SE_COLUMNS:
                cells[f"se_{key}"] = value
    if report.error_estimates:
        for key, value in report.error_estimates.items():
            if f"err_{key}" in _ERR_COLUMNS:
                cells[f"err_{key}"] = value
    return cells


def _evaluate_row(scenario: ScenarioConfig, engine: str, workers: int,
                  table_cache: dict | None = None):
    """One (grid point, engine) evaluation -> row dict."""
    row = {"engine": engine, "status": "ok", "error": ""}
    try:
        if engine == "analytic":
            table = None
            if table_cache is not None:
                table = table_cache.get(scenario.radio_fingerprint())
            if table is None:
                table = build_coverage_table(scenario)
                if table_cache is not None:
                    table_cache[scenario.radio_fingerprint()] = table
            report = analytic_report(scenario, table=table)
        else:
            report = run_simulation(scenario, workers=workers)
        cells = _report_cells(report)
        cells["cost_over_backhaul_unit"] = (
            report.cost / scenario.costs.backhaul_unit_cost)
        row.update(cells)
    except (QuadratureError, ValueError) as exc:
        row["status"] = "error"
        row["error"] = str(exc)
        row.update(_report_cells(None))
    return row


def run_experiment(config: ScenarioConfig, sweep: SweepSpec,
                   engines: str | None = None, out_path=None,
                   workers: int = 1):
    """Evaluate every grid point with the selected engine(s).

    Returns the rows in grid order (one per grid point per engine) and, when
    ``out_path`` is given, persists them as CSV plus a metadata sidecar.
    Rows that fail keep the run going; their status column reads ``error``.
    """
    engine = _ENGINES[engines if engines is not None else sweep.engine]
    engine_list = ["analytic", "mc"] if engine == "both" else [engine]
    table_cache: dict = {}
    rows = []
    for value in sweep.grid:
        scenario = set_parameter(config, sweep.parameter_path, value)
        for eng in engine_list:
            row = {sweep.parameter_path: value}
            row.update(_evaluate_row(scenario, eng, workers, table_cache))
            rows.append(row)
    if out_path is not None:
        write_csv(rows, out_path, config)
    return rows


def grid_search(config: ScenarioConfig, variables: dict,
                engine: str = "analytic", workers: int = 1) -> GridSearchResult:
    """Exhaustive search for the caching-efficiency maximizer.

    ``variables`` maps parameter paths to grids (at most 3 paths). Points
    are visited in lexicographic grid order and ties keep the first (i.e.
    lexicographically smallest) maximizer. Coverage tables are reused
    across points that share radio-side parameters, so cache- and
    content-side searches cost one quadrature pass total.
    """
    if not 1 <= len(variables) <= 3:
        raise ValueError("grid search supports 1 to 3 variables")
    eng = _ENGINES[engine]
    if eng == "both":
        raise ValueError("grid search uses a single engine")
    paths = list(variables)
    grids = [tuple(variables[p]) for p in paths]
    if any(len(g) == 0 for g in grids):
        raise ValueError("grids must be non-empty")
    table_cache: dict = {}
    best_point = None
    best_eta = -np.inf
    surface = []
    for values in itertools.product(*grids):
        scenario = config
        for path, value in zip(paths, values):
            scenario = set_parameter(scenario, path, value)
        row = dict(zip(paths, values))
        row.update(_evaluate_row(scenario, eng, workers, table_cache))
        surface.append(row)
        if row["status"] != "ok":
            raise QuadratureError(
                f"grid point {dict(zip(paths, values))} failed: {row['error']}")
        if row["efficiency"] > best_eta:
            best_eta = row["efficiency"]
            best_point = dict(zip(paths, values))
    return GridSearchResult(best_point=best_point, best_efficiency=best_eta,
                            surface=tuple(surface))


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(rows, out_path, config: ScenarioConfig | None = None) -> None:
    """Persist rows as CSV (stable column order) plus a ``.meta.json`` sidecar."""
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col, "")) for col in columns))
    text = "\n".join(lines) + "\n"
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    meta = {
        "schema_version": CSV_SCHEMA_VERSION,
        "engine_version": __version__,
        "numpy_version": np.__version__,
    }
    if config is not None:
        meta["config_hash"] = config.fingerprint()
        meta["master_seed"] = config.protocol.master_seed
    with open(str(out_path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- canned experiments ------------------------------------------------------

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def _preset_fig1(config, workers):
    """Analytic coverage bound next to Monte Carlo coverage over a threshold grid."""
    sweep = SweepSpec("tiers[2].radio.sir_threshold",
                      (0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0), engine="both")
    return run_experiment(config, sweep, workers=workers)


def _preset_fig2(config, workers):
    """Backhaul use, hit ratio, ASE, cost, and efficiency vs small-cell density."""
    rows = []
    table_cache: dict = {}
    densities = np.logspace(-4, 2, 13)
    for kappa in (0.5, 1.0, 1.5):
        base = set_parameter(config, "content.popularity_exponent", kappa)
        for lam in densities:
            scenario = set_parameter(base, "tiers[2].density", lam)
            row = {"content.popularity_exponent": kappa, "tiers[2].density": lam}
            row.update(_evaluate_row(scenario, "analytic", workers, table_cache))
            rows.append(row)
    return rows


def _preset_fig3(config, workers):
    """Efficiency over the (MPC fraction tier 1, MPC fraction tier 2) grid."""
    rows = []
    table_cache: dict = {}
    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    for kappa in (0.5, 1.0, 1.5):
        base = set_parameter(config, "content.popularity_exponent", kappa)
        for phi1 in grid:
            with_phi1 = set_parameter(base, "tiers[1].cache.mpc_fraction", phi1)
            for phi2 in grid:
                scenario = set_parameter(with_phi1, "tiers[2].cache.mpc_fraction", phi2)
                row = {"content.popularity_exponent": kappa,
                       "tiers[1].cache.mpc_fraction": phi1,
                       "tiers[2].cache.mpc_fraction": phi2}
                row.update(_evaluate_row(scenario, "analytic", workers, table_cache))
                rows.append(row)
    return rows


def _preset_fig4(config, workers):
    """Efficiency vs small-cell cache size for several macro cache sizes."""
    rows = []
    table_cache: dict = {}
    F = config.content.library_size
    s2_grid = range(1, F + 1, 3)
    for lam2 in (1e-1, 1e2):
        with_lam = set_parameter(config, "tiers[2].density", lam2)
        for kappa in (0.5, 1.2):
            with_kappa = set_parameter(with_lam, "content.popularity_exponent", kappa)
            for s1 in (10, 20, 50, 80):
                with_s1 = set_parameter(with_kappa, "tiers[1].cache.cache_size", s1)
                for s2 in s2_grid:
                    scenario = set_parameter(with_s1, "tiers[2].cache.cache_size", s2)
                    row = {"tiers[2].density": lam2,
                           "content.popularity_exponent": kappa,
                           "tiers[1].cache.cache_size": s1,
                           "tiers[2].cache.cache_size": s2}
                    row.update(_evaluate_row(scenario, "analytic", workers, table_cache))
                    rows.append(row)
    return rows


def _preset_fig5(config, workers):
    """Efficiency ratio under macro-favoring bias (rho_1 = 1 - rho_2).

    Cache slots are priced at a tenth of the usual default here, the regime
    where biasing can pay off at moderate densities.
    """
    rows = []
    cheap = set_parameter(config, "costs.cache_unit_cost",
                          0.001 * config.costs.backhaul_unit_cost)
    for lam2 in (1e-2, 1e-1, 1.0, 1e2):
        base = set_parameter(cheap, "tiers[2].density", lam2)
        baseline = _evaluate_row(base, "analytic", workers, None)
        for rho2 in np.arange(0.05, 1.0, 0.05):
            scenario = set_parameter(base, "tiers[1].rho", 1.0 - rho2)
            scenario = set_parameter(scenario, "tiers[2].rho", rho2)
            row = {"tiers[2].density": lam2, "rho_2": round(float(rho2), 10)}
            row.update(_evaluate_row(scenario, "analytic", workers, None))
            if row["status"] == "ok" and baseline["status"] == "ok":
                row["efficiency_ratio"] = row["efficiency"] / baseline["efficiency"]
            else:
                row["efficiency_ratio"] = ""
            rows.append(row)
    return rows


def run_preset(name: str, config: ScenarioConfig, out_path=None, workers: int = 1):
    """Run one canned experiment and optionally persist its rows."""
    runners = {"fig1": _preset_fig1, "fig2": _preset_fig2, "fig3": _preset_fig3,
               "fig4": _preset_fig4, "fig5": _preset_fig5}
    if name not in runners:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    rows = runners[name](config, workers)
    if out_path is not None:
        write_csv(rows, out_path, config)
    return rows
