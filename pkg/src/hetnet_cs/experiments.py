"""Parameter sweeps over load intensity or QoS threshold, with CSV output."""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import all_on, cs_no_qos, sorting_cs
from .errors import ConfigError, OutputError, SweepError
from .metrics import evaluate
from .optimizer import proposed_cs
from .scenario import ScenarioConfig, build_scenario, draw_channel

METHODS = {
    "all-on": all_on,
    "sorting": sorting_cs,
    "no-qos": cs_no_qos,
    "proposed": proposed_cs,
}
METHOD_NAMES = tuple(METHODS)
VARIABLES = {"alpha": "alpha", "pmin": "p_min_dbm"}

DEFAULT_GRIDS = {
    "alpha": tuple(round(0.1 * k, 1) for k in range(1, 10)),
    "pmin": tuple(float(p) for p in range(-90, -54, 5)),
}

COLUMNS = ("variable", "value", "method", "seed", "total_power_w", "served_traffic_qos",
           "offered_traffic", "savings_pct", "outage_count", "lambda_m")
METRIC_COLUMNS = COLUMNS[4:]
MEAN_SEED = "mean"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple
    methods: tuple = METHOD_NAMES
    seeds: tuple = tuple(range(20))
    fixed: ScenarioConfig = field(default_factory=ScenarioConfig)

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ConfigError(f"sweep variable must be one of {sorted(VARIABLES)}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if not self.seeds:
            raise ConfigError("no seeds given")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods: {sorted(unknown)}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def config_for(self, value, seed):
        return self.fixed.replace(**{VARIABLES[self.variable]: value, "seed": seed})


@dataclass(frozen=True)
class SweepRow:
    variable: str
    value: float
    method: str
    seed: object  # int, or "mean" for aggregate rows
    total_power_w: float
    served_traffic_qos: float
    offered_traffic: float
    savings_pct: float
    outage_count: float
    lambda_m: float


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list

    def cells(self):
        return [r for r in self.rows if r.seed != MEAN_SEED]

    def select(self, value=None, method=None, seed=None):
        return [r for r in self.cells()
                if (value is None or r.value == value)
                and (method is None or r.method == method)
                and (seed is None or r.seed == seed)]

    def summary(self):
        """Mean and population std of every metric per (value, method)."""
        out = []
        for value in self.spec.grid:
            for method in self.spec.methods:
                rows = self.select(value=value, method=method)
                entry = {"variable": self.spec.variable, "value": value,
                         "method": method, "n_seeds": len(rows)}
                for col in METRIC_COLUMNS:
                    data = np.array([getattr(r, col) for r in rows], dtype=float)
                    entry[f"mean_{col}"] = float(data.mean())
                    entry[f"std_{col}"] = float(data.std())
                out.append(entry)
        return out


def run_cell(config, methods, step=0):
    """Evaluate ``methods`` on one scenario and one shared channel draw.

    Returns ``{method: (decision, report)}``. A failing method raises
    SweepError naming the cell.
    """
    scenario = build_scenario(config)
    snapshot = draw_channel(scenario, step=step)
    reference = all_on(scenario, snapshot)
    out = {}
    for name in methods:
        try:
            decision = reference if name == "all-on" else METHODS[name](scenario, snapshot)
            out[name] = (decision, evaluate(scenario, decision, reference.total_power_w))
        except Exception as exc:
            raise SweepError(f"method={name}, seed={config.seed}: {exc}") from exc
    return out


def _cell_rows(spec, value, seed):
    try:
        results = run_cell(spec.config_for(value, seed), spec.methods)
    except Exception as exc:
        raise SweepError(f"sweep cell failed at {spec.variable}={value:g}: {exc}") from exc
    rows = []
    for method in spec.methods:
        _, report = results[method]
        rows.append(SweepRow(
            variable=spec.variable, value=value, method=method, seed=seed,
            total_power_w=report.total_power_w,
            served_traffic_qos=report.served_traffic_qos,
            offered_traffic=report.offered_traffic,
            savings_pct=report.savings_vs_all_on,
            outage_count=report.outage_count,
            lambda_m=report.lambda_m,
        ))
    return rows


def _mean_row(rows):
    first = rows[0]
    values = {col: float(np.mean([getattr(r, col) for r in rows])) for col in METRIC_COLUMNS}
    return SweepRow(variable=first.variable, value=first.value, method=first.method,
                    seed=MEAN_SEED, **values)


def run_sweep(spec, workers=1):
    """Run every (value, method, seed) cell and append per-method mean rows.

    Methods in one (value, seed) cell share a scenario and channel draw.
    Row order is (value, method, seed) with methods in ``spec.methods``
    order and the mean row last, whatever the execution order.
    """
    jobs = [(value, seed) for value in spec.grid for seed in spec.seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_cell_rows, [spec] * len(jobs), *zip(*jobs)))
    else:
        chunks = [_cell_rows(spec, value, seed) for value, seed in jobs]

    by_key = {(r.value, r.method, r.seed): r for chunk in chunks for r in chunk}
    rows = []
    for value in spec.grid:
        for method in spec.methods:
            group = [by_key[(value, method, seed)] for seed in sorted(spec.seeds)]
            rows.extend(group)
            rows.append(_mean_row(group))
    return SweepResult(spec=spec, rows=rows)


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.6g}"


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, col)) for col in COLUMNS])
    return buf.getvalue()


def emit_csv(table, path):
    """Write sweep rows (a SweepResult or a row list) as CSV."""
    rows = table.rows if isinstance(table, SweepResult) else list(table)
    text = format_csv(rows)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write sweep CSV to {path}: {exc}") from exc
    return path


def read_csv(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != COLUMNS:
                raise OutputError(f"{path}: unexpected header {reader.fieldnames}")
            rows = []
            for rec in reader:
                seed = rec["seed"]
                rows.append(SweepRow(
                    variable=rec["variable"],
                    value=float(rec["value"]),
                    method=rec["method"],
                    seed=seed if seed == MEAN_SEED else int(seed),
                    **{col: float(rec[col]) for col in METRIC_COLUMNS},
                ))
            return rows
    except OSError as exc:
        raise OutputError(f"cannot read sweep CSV {path}: {exc}") from exc


def emit_summary_csv(result, path):
    summary = result.summary()
    names = ["variable", "value", "method", "n_seeds"]
    for col in METRIC_COLUMNS:
        names += [f"mean_{col}", f"std_{col}"]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for entry in summary:
                writer.writerow([_fmt(entry[n]) for n in names])
    except OSError as exc:
        raise OutputError(f"cannot write summary CSV to {path}: {exc}") from exc
    return path
