"""Replicated simulation studies: average, bias, MSE and asymptotic variance.

Replication ``r`` of a scenario draws its noise from
``numpy.random.SeedSequence(base_seed, spawn_key=(r,))``, the same stream
``SeedSequence(base_seed).spawn(r + 1)[r]`` would give. Each replication
depends only on ``(scenario, r)``, so any number of worker processes
produces the same statistics as a serial run.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .asymptotics import asymptotic_variances
from .core import InvalidArgumentError, ModelSpec, linear_process_c, synthesize
from .estimate import EstimationError, match_components, normalize_method, sequential_fit
from .optimize import OptimizerConfig
from .periodogram import GridSpec, grid_scan

__all__ = [
    "ScenarioError",
    "McScenario",
    "McRow",
    "McStats",
    "replication_seed",
    "run_replication",
    "run_scenario",
    "rate_study",
    "RateStudy",
    "write_stats_csv",
    "write_raw_csv",
    "STATS_COLUMNS",
]

PARAMS = ("A", "B", "alpha", "beta")
STATS_COLUMNS = ("method", "parameter", "true", "average", "bias", "mse", "avar", "reps", "failures")
MAX_FAILURE_RATE = 0.10


class ScenarioError(RuntimeError):
    """Too many replications of a scenario failed."""


@dataclass(frozen=True)
class McScenario:
    model: ModelSpec
    n: int
    reps: int = 100
    methods: tuple[str, ...] = ("ALSE", "LSE")
    base_seed: int = 0
    grid: Optional[GridSpec] = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    noiseless: bool = False
    name: str = ""

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidArgumentError("reps must be >= 1")
        if self.n < 4:
            raise InvalidArgumentError("n must be >= 4")
        methods = tuple(normalize_method(m) for m in self.methods)
        if not methods:
            raise InvalidArgumentError("scenario needs at least one method")
        object.__setattr__(self, "methods", methods)
        if self.grid is None:
            object.__setattr__(self, "grid", GridSpec.default(self.n))

    @property
    def p(self) -> int:
        return self.model.p

    def parameter_names(self) -> list[str]:
        if self.p == 1:
            return list(PARAMS)
        return [f"{name}_{k + 1}" for k in range(self.p) for name in PARAMS]


@dataclass(frozen=True)
class McRow:
    method: str
    parameter: str
    true: float
    average: float
    bias: float
    mse: float
    avar: float
    reps: int
    failures: int

    def as_list(self) -> list:
        return [getattr(self, c) for c in STATS_COLUMNS]


@dataclass
class McStats:
    scenario: McScenario
    rows: list[McRow]
    elapsed: dict[str, float]
    failures: dict[str, int]
    raw: dict[str, np.ndarray] = field(repr=False)

    def row(self, method: str, parameter: str) -> McRow:
        method = normalize_method(method)
        for r in self.rows:
            if r.method == method and r.parameter == parameter:
                return r
        raise KeyError((method, parameter))

    def table(self) -> list[tuple]:
        """Rows without timing, for reproducibility comparisons."""
        return [tuple(r.as_list()) for r in self.rows]


def replication_seed(base_seed: int, r: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(base_seed, spawn_key=(r,))


def run_replication(s: McScenario, r: int) -> dict[str, tuple[np.ndarray, float, bool]]:
    """Estimates for one replication: ``method -> (p x 4 array, seconds, ok)``.

    Estimates are reordered to the model's component order by the scaled
    nearest-(alpha, beta) assignment. Failed fits come back as NaN rows.
    """
    truth = s.model.components
    y = synthesize(s.model, s.n, replication_seed(s.base_seed, r), noiseless=s.noiseless)
    t0 = time.perf_counter()
    start = grid_scan(y, s.grid)
    scan_time = time.perf_counter() - t0

    out = {}
    for method in s.methods:
        est = np.full((s.p, 4), np.nan)
        t0 = time.perf_counter()
        try:
            fit = sequential_fit(y, s.p, method, s.grid, s.optimizer, start=start)
            ok = fit.converged
        except EstimationError:
            fit, ok = None, False
        elapsed = scan_time + time.perf_counter() - t0
        if ok:
            for i, j in enumerate(match_components(fit.components, truth, s.n)):
                if j is not None:
                    est[i] = fit.components[j].as_tuple()
        out[method] = (est, elapsed, ok)
    return out


def _replicate(args):
    s, r = args
    return run_replication(s, r)


def _collect(s: McScenario, workers: int) -> list[dict]:
    jobs = [(s, r) for r in range(s.reps)]
    if workers <= 1:
        return [_replicate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replicate, jobs, chunksize=max(1, s.reps // (4 * workers))))


def run_scenario(s: McScenario, workers: int = 1) -> McStats:
    """Run every replication and aggregate per (method, parameter).

    Raises
    ------
    ScenarioError
        When more than 10% of the replications of any method fail.
    """
    results = _collect(s, workers)
    truth = np.array([c.as_tuple() for c in s.model.components])
    c = linear_process_c(s.model.noise)
    avar = np.array([
        asymptotic_variances(comp, c, s.model.noise.sigma2, s.n).as_array()
        for comp in s.model.components
    ])
    names = s.parameter_names()

    rows, elapsed, failures, raw = [], {}, {}, {}
    for method in s.methods:
        est = np.stack([res[method][0] for res in results])  # reps x p x 4
        ok = np.array([res[method][2] for res in results])
        elapsed[method] = float(sum(res[method][1] for res in results))
        n_fail = int((~ok).sum())
        failures[method] = n_fail
        raw[method] = est
        if n_fail > MAX_FAILURE_RATE * s.reps:
            raise ScenarioError(f"{method}: {n_fail} of {s.reps} replications failed")
        good = est[ok]
        if good.shape[0] == 0:
            raise ScenarioError(f"{method}: no successful replications")
        flat_truth = truth.ravel()
        flat = good.reshape(good.shape[0], -1)
        average = flat.mean(axis=0)
        bias = average - flat_truth
        mse = ((flat - flat_truth) ** 2).mean(axis=0)
        for i, name in enumerate(names):
            rows.append(McRow(method, name, float(flat_truth[i]), float(average[i]), float(bias[i]),
                              float(mse[i]), float(avar.ravel()[i]), int(ok.sum()), n_fail))
    return McStats(s, rows, elapsed, failures, raw)


@dataclass
class RateStudy:
    sizes: list[int]
    mse: dict[str, list[float]]
    slopes: dict[str, float]
    method: str

    def ratio(self, parameter: str, n_small: int, n_large: int) -> float:
        m = self.mse[parameter]
        return m[self.sizes.index(n_small)] / m[self.sizes.index(n_large)]


def rate_study(model: ModelSpec, sizes: Sequence[int], reps: int, method: str,
               base_seed: int = 0, optimizer: Optional[OptimizerConfig] = None,
               workers: int = 1) -> RateStudy:
    """MSE against sample size, with least-squares log-log slopes per parameter.

    Theory predicts slopes of -1 for amplitudes, -3 for alpha and -5 for beta.
    """
    sizes = [int(n) for n in sizes]
    if len(sizes) < 2:
        raise InvalidArgumentError("rate_study needs at least two sample sizes")
    method = normalize_method(method)
    per_size = []
    for n in sizes:
        sc = McScenario(model, n, reps, (method,), base_seed,
                        optimizer=optimizer or OptimizerConfig())
        per_size.append(run_scenario(sc, workers))
    names = per_size[0].scenario.parameter_names()
    mse = {name: [st.row(method, name).mse for st in per_size] for name in names}
    logn = np.log(sizes)
    slopes = {name: float(np.polyfit(logn, np.log(v), 1)[0]) for name, v in mse.items()}
    return RateStudy(sizes, mse, slopes, method)


def _fmt(x):
    if isinstance(x, float):
        return repr(float(x)) if math.isfinite(x) else "nan"
    return x


def write_stats_csv(stats: McStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STATS_COLUMNS)
        for r in stats.rows:
            w.writerow([_fmt(v) for v in r.as_list()])


def write_raw_csv(stats: McStats, path) -> None:
    """One line per (replication, method, component); failed fits are ``nan``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("rep", "method", "component", *PARAMS))
        for method, est in stats.raw.items():
            for r in range(est.shape[0]):
                for k in range(est.shape[1]):
                    w.writerow([r, method, k + 1, *(_fmt(float(v)) for v in est[r, k])])
