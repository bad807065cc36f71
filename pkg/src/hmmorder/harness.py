"""Replicated Monte Carlo experiments over simulation scenarios.

A configuration spans a grid of sample sizes and estimation methods for
one scenario.  Every replicate simulates a fresh path and runs the
requested estimator; seeding is per grid point and per replicate, so
results are reproducible for any degree of parallelism and adding a
grid row never perturbs the others.
"""

import csv
import io
import itertools
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimator import estimate_order, estimate_order_max_univariate
from .gram import DEFAULT_L_MAX
from .kernels import BandwidthRule
from .simulate import GAUSSIAN_NOISE, get_scenario, simulate
from .spectral import SpectralConfig, spectral_order

OPERATOR = "operator"
OPERATOR_MAX = "operator-max"
SPECTRAL_PREFIX = "spectral"

#: scenarios with a known true order (all benchmark scenarios have three states)
KNOWN_ORDER = 3


@dataclass(frozen=True)
class ExperimentConfig:
    """One scenario crossed with sample sizes and estimation methods."""

    scenario: str
    n_list: tuple = (1000,)
    delta: float = 5.0
    nu: float = 0.1
    beta: float | None = None
    dim: int = 1
    noise: str = GAUSSIAN_NOISE
    methods: tuple = (OPERATOR,)
    replicates: int = 20
    base_seed: int = 0
    jobs: int = 1
    l_max: int = DEFAULT_L_MAX

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "methods", tuple(self.methods))
        for method in self.methods:
            parse_method(method)


def parse_method(method: str):
    """Split a method descriptor into an executable form.

    ``operator`` and ``operator-max`` take no arguments; the spectral
    baseline is written ``spectral:<M>:<M_reg>``.
    """
    if method in (OPERATOR, OPERATOR_MAX):
        return method, None
    parts = method.split(":")
    if parts[0] == SPECTRAL_PREFIX and len(parts) == 3:
        return SPECTRAL_PREFIX, SpectralConfig(n_basis=int(parts[1]), n_reg=int(parts[2]))
    raise ValueError(
        f"unknown method {method!r}; expected 'operator', 'operator-max' "
        f"or 'spectral:<M>:<M_reg>'"
    )


@dataclass(frozen=True)
class ReplicateRecord:
    replicate: int
    l_hat: int | None
    tau: float | None
    bandwidth: float | None
    sigma: tuple
    seconds: float
    error: str | None = None


@dataclass(frozen=True, eq=False)
class GridCell:
    """All replicates of one (n, method) grid point."""

    scenario: str
    delta: float
    nu: float
    beta: float | None
    dim: int
    noise: str
    n: int
    method: str
    records: tuple

    @property
    def failed(self) -> bool:
        return any(r.error is not None for r in self.records)

    def counts(self, l_max: int) -> tuple:
        """Counts of selected orders 0..l_max plus an overflow bucket."""
        buckets = [0] * (l_max + 2)
        for rec in self.records:
            if rec.error is not None:
                continue
            if rec.l_hat > l_max:
                buckets[l_max + 1] += 1
            else:
                buckets[rec.l_hat] += 1
        return tuple(buckets)

    def count_of(self, order: int) -> int:
        return sum(1 for r in self.records if r.error is None and r.l_hat == order)

    def mean_seconds(self) -> float:
        ok = [r.seconds for r in self.records if r.error is None]
        return sum(ok) / len(ok) if ok else float("nan")


@dataclass(frozen=True, eq=False)
class ResultTable:
    cells: tuple
    l_max: int
    replicates: int
    true_order: int | None = KNOWN_ORDER

    def cell(self, n: int, method: str) -> GridCell:
        for c in self.cells:
            if c.n == n and c.method == method:
                return c
        raise KeyError(f"no cell for n={n}, method={method!r}")


def _data_seed(config: ExperimentConfig, n: int, replicate: int) -> int:
    """Simulation seed for one replicate of one grid point.

    The method is deliberately excluded: all methods at the same grid
    point see the same simulated path, which pairs the comparisons.
    """
    key = (
        f"{config.scenario}|delta={config.delta!r}|nu={config.nu!r}"
        f"|dim={config.dim}|noise={config.noise}|n={n}"
    )
    return (config.base_seed + replicate + zlib.crc32(key.encode())) % 2**63


def _run_replicate(args) -> ReplicateRecord:
    config, n, method, replicate = args
    kind, spectral_cfg = parse_method(method)
    spec = get_scenario(
        config.scenario,
        noise=config.noise,
        delta=config.delta,
        nu=config.nu,
        dim=config.dim,
    )
    series, _ = simulate(spec, n, _data_seed(config, n, replicate))
    bandwidth = None if config.beta is None else BandwidthRule(beta=config.beta)
    try:
        start = time.perf_counter()
        if kind == OPERATOR:
            est = estimate_order(series, bandwidth=bandwidth, l_max=config.l_max)
            l_hat, tau, h = est.l_hat, est.tau, est.bandwidth
            sigma = tuple(float(x) for x in est.r_values[: config.l_max])
        elif kind == OPERATOR_MAX:
            est = estimate_order_max_univariate(
                series, bandwidth=bandwidth, l_max=config.l_max
            )
            l_hat, tau, h = est.l_hat, est.tau, est.bandwidth
            sigma = tuple(float(x) for x in est.r_values[: config.l_max])
        else:
            res = spectral_order(series, spectral_cfg)
            l_hat, tau, h = res.l_hat, None, None
            sigma = tuple(float(x) for x in res.sigma[: config.l_max])
        seconds = time.perf_counter() - start
        return ReplicateRecord(
            replicate=replicate,
            l_hat=l_hat,
            tau=tau,
            bandwidth=h,
            sigma=sigma,
            seconds=seconds,
        )
    except Exception as exc:  # recorded, not fatal
        return ReplicateRecord(
            replicate=replicate,
            l_hat=None,
            tau=None,
            bandwidth=None,
            sigma=(),
            seconds=0.0,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run every replicate of every grid point.

    Replicates execute concurrently up to ``config.jobs``; records are
    reduced in replicate order so the table does not depend on the
    degree of parallelism.
    """
    tasks = [
        (config, n, method, rep)
        for n, method in itertools.product(config.n_list, config.methods)
        for rep in range(config.replicates)
    ]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_replicate, tasks, chunksize=1))
    else:
        records = [_run_replicate(t) for t in tasks]
    cells = []
    idx = 0
    for n, method in itertools.product(config.n_list, config.methods):
        chunk = tuple(records[idx : idx + config.replicates])
        idx += config.replicates
        cells.append(
            GridCell(
                scenario=config.scenario,
                delta=config.delta,
                nu=config.nu,
                beta=config.beta,
                dim=config.dim,
                noise=config.noise,
                n=n,
                method=method,
                records=chunk,
            )
        )
    return ResultTable(
        cells=tuple(cells), l_max=config.l_max, replicates=config.replicates
    )


def comparison_methods(basis_sizes=(20, 40, 60), reg_rule=(5, "half", "minus5")) -> tuple:
    """The operator method plus the spectral grid used for comparisons:
    M in ``basis_sizes`` crossed with M_reg in {5, M/2, M-5}."""
    methods = [OPERATOR]
    for m in basis_sizes:
        regs = []
        for rule in reg_rule:
            if rule == "half":
                regs.append(m // 2)
            elif rule == "minus5":
                regs.append(m - 5)
            else:
                regs.append(int(rule))
        for reg in dict.fromkeys(regs):
            methods.append(f"{SPECTRAL_PREFIX}:{m}:{reg}")
    return tuple(methods)


def run_method_comparison(config: ExperimentConfig) -> ResultTable:
    """Run the operator method against the spectral grid on one scenario."""
    return run_experiment(replace(config, methods=comparison_methods()))


def success_frequencies(table: ResultTable, order: int | None = None) -> dict:
    """Fraction of replicates selecting the target order, per grid point."""
    target = order if order is not None else table.true_order
    out = {}
    for cell in table.cells:
        ok = [r for r in cell.records if r.error is None]
        out[(cell.n, cell.method)] = (
            sum(1 for r in ok if r.l_hat == target) / len(ok) if ok else float("nan")
        )
    return out


GRID_COLUMNS = ("scenario", "delta", "nu", "beta", "d", "noise", "n", "method")


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def emit_table(table: ResultTable, fmt: str = "csv", include_timing: bool = True) -> str:
    """Render a result table as CSV or markdown.

    Columns: the grid keys, the counts of every selected order from 0 to
    l_max, the overflow bucket, the percentage selecting the true order,
    and (optionally) mean wall seconds.  Timing can be excluded to make
    the output reproducible byte for byte.
    """
    if fmt not in ("csv", "md", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    header = list(GRID_COLUMNS)
    header += [f"L{j}" for j in range(table.l_max + 1)]
    header += [f"gt_L{table.l_max}", "pct_true", "failed"]
    if include_timing:
        header.append("mean_seconds")
    rows = []
    for cell in table.cells:
        counts = cell.counts(table.l_max)
        ok = sum(counts)
        if table.true_order is not None and ok:
            pct = 100.0 * cell.count_of(table.true_order) / ok
            pct_str = repr(round(pct, 6))
        else:
            pct_str = ""
        row = [
            cell.scenario,
            _format_value(cell.delta),
            _format_value(cell.nu),
            _format_value(cell.beta),
            str(cell.dim),
            cell.noise,
            str(cell.n),
            cell.method,
            *[str(c) for c in counts],
            pct_str,
            "1" if cell.failed else "0",
        ]
        if include_timing:
            row.append(f"{cell.mean_seconds():.3f}")
        rows.append(row)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def timing_report(table: ResultTable) -> dict:
    """Mean wall seconds per (n, dim, method) grid point."""
    return {
        (cell.n, cell.dim, cell.method): cell.mean_seconds() for cell in table.cells
    }


# ---------------------------------------------------------------------------
# Flat key/value configuration files
# ---------------------------------------------------------------------------

_LIST_KEYS = {"n_list", "method"}
_INT_KEYS = {"d", "replicates", "base_seed", "jobs", "M", "M_reg", "l_max"}
_FLOAT_KEYS = {"delta", "nu", "beta"}


class ConfigError(ValueError):
    """A configuration file could not be interpreted."""


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse a flat ``key = value`` configuration.

    Lists are comma separated.  Recognized keys: scenario, delta, nu,
    beta, d, n_list, noise, method, M, M_reg, replicates, base_seed,
    jobs, l_max.  ``M``/``M_reg`` turn a bare ``spectral`` method into
    ``spectral:M:M_reg``.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" in stripped:
            key, _, value = stripped.partition("=")
        elif ":" in stripped:
            key, _, value = stripped.partition(":")
        else:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        raw[key.strip()] = value.strip()
    if "scenario" not in raw:
        raise ConfigError("missing required key 'scenario'")
    kwargs: dict = {"scenario": raw.pop("scenario")}
    m = raw.pop("M", None)
    m_reg = raw.pop("M_reg", None)
    for key, value in raw.items():
        if key == "n_list":
            kwargs["n_list"] = tuple(int(v) for v in value.replace(",", " ").split())
        elif key == "method":
            kwargs["methods"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "noise":
            kwargs["noise"] = value
        elif key == "d":
            kwargs["dim"] = int(value)
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    if m is not None:
        reg = m_reg if m_reg is not None else max(2, int(m) // 2)
        methods = kwargs.get("methods", (OPERATOR,))
        kwargs["methods"] = tuple(
            f"{SPECTRAL_PREFIX}:{int(m)}:{int(reg)}" if meth == SPECTRAL_PREFIX else meth
            for meth in methods
        )
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
