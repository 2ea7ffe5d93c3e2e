"""Single-component ALSE/LSE fits, the sequential p-component procedure and BIC.

ALSE: ``(alpha, beta)`` maximise the periodogram-type function and the
amplitudes are the averaging formulas ``A = (2/n) sum y cos``,
``B = (2/n) sum y sin``.

LSE: ``(alpha, beta)`` minimise the profiled residual sum of squares and the
amplitudes come from the exact normal equations.

Both start Nelder-Mead from the same periodogram grid maximum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import ChirpComponent, InvalidArgumentError, Signal, time_index
from .optimize import (
    DegenerateRegressorError,
    OptimizerConfig,
    nelder_mead,
    profiled_sse,
    separable_amplitudes,
)
from .periodogram import GridMax, GridSpec, _as_samples, grid_scan, periodogram_sums, periodogram_value

__all__ = [
    "METHODS",
    "EstimationError",
    "StepDiagnostics",
    "FitResult",
    "OrderSelection",
    "alse_single",
    "lse_single",
    "sequential_fit",
    "bic",
    "select_order",
    "match_components",
    "normalize_method",
]

METHODS = ("ALSE", "LSE")


class EstimationError(RuntimeError):
    """A sequential fit failed; ``step`` is the 1-based extraction step."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"estimation failed at step {step}: {cause}")
        self.step = step
        self.cause = cause


def normalize_method(method: str) -> str:
    m = str(method).upper()
    if m not in METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}; expected one of {METHODS}")
    return m


@dataclass(frozen=True)
class StepDiagnostics:
    grid_start: tuple[float, float]
    grid_value: float
    refined: tuple[float, float]
    objective_value: float
    optimizer_iterations: int
    converged: bool
    duplicate_of: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "grid_start": list(self.grid_start),
            "grid_value": self.grid_value,
            "refined": list(self.refined),
            "objective_value": self.objective_value,
            "optimizer_iterations": self.optimizer_iterations,
            "converged": self.converged,
            "duplicate_of": self.duplicate_of,
        }


@dataclass(frozen=True)
class FitResult:
    """Outcome of a sequential fit.

    ``sse_trajectory[k]`` is the residual energy after ``k`` components have
    been removed, so ``sse_trajectory[0]`` is the signal energy and the list
    has ``p + 1`` entries.
    """

    components: tuple[ChirpComponent, ...]
    steps: tuple[StepDiagnostics, ...]
    sse_trajectory: tuple[float, ...]
    method: str
    n: int
    residual: np.ndarray = field(repr=False, compare=False)
    elapsed: float = field(default=0.0, compare=False)

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.steps)

    def truncated(self, k: int) -> "FitResult":
        """The same fit stopped after ``k`` components."""
        if not 1 <= k <= self.p:
            raise InvalidArgumentError(f"k must be in 1..{self.p}")
        y = self.residual + _waveform_sum(self.components, self.n, range(self.p - 1, k - 1, -1))
        return replace(self, components=self.components[:k], steps=self.steps[:k],
                       sse_trajectory=self.sse_trajectory[: k + 1], residual=y)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "p": self.p,
            "components": [
                {"A": c.A, "B": c.B, "alpha": c.alpha, "beta": c.beta} for c in self.components
            ],
            "steps": [s.to_dict() for s in self.steps],
            "sse_trajectory": list(self.sse_trajectory),
            "elapsed_seconds": self.elapsed,
        }


def _component_wave(c: ChirpComponent, n: int) -> np.ndarray:
    t = time_index(n)
    phase = c.alpha * t + c.beta * (t * t)
    return c.A * np.cos(phase) + c.B * np.sin(phase)


def _waveform_sum(components, n, order):
    y = np.zeros(n)
    for i in order:
        y += _component_wave(components[i], n)
    return y


def _fit_one(y: np.ndarray, method: str, grid: GridSpec, cfg: OptimizerConfig,
             start: Optional[GridMax], workers: int):
    n = y.size
    gm = start if start is not None else grid_scan(y, grid, workers=workers)
    cfg = cfg.with_step((grid.alpha_step, grid.beta_step))
    if method == "ALSE":
        res = nelder_mead(lambda a, b: periodogram_value(y, a, b), (gm.alpha, gm.beta),
                          cfg, sense="maximize")
        alpha, beta = res.x
        sc, ss = periodogram_sums(y, alpha, beta)
        A, B = 2.0 * sc / n, 2.0 * ss / n
    else:
        def objective(a, b):
            try:
                return profiled_sse(y, a, b)
            except DegenerateRegressorError:
                return math.inf

        res = nelder_mead(objective, (gm.alpha, gm.beta), cfg, sense="minimize")
        alpha, beta = res.x
        A, B = separable_amplitudes(y, alpha, beta)
    comp = ChirpComponent(A, B, alpha, beta)
    diag = StepDiagnostics(
        grid_start=(gm.alpha, gm.beta),
        grid_value=gm.value,
        refined=(alpha, beta),
        objective_value=res.value,
        optimizer_iterations=res.iterations,
        converged=res.converged,
    )
    return comp, diag


def sequential_fit(signal, p: int, method: str = "ALSE", grid: Optional[GridSpec] = None,
                   cfg: Optional[OptimizerConfig] = None, start: Optional[GridMax] = None,
                   workers: int = 1) -> FitResult:
    """Extract ``p`` components one at a time.

    Each step fits one component to the current residual and subtracts it.
    ``start`` optionally supplies the grid maximum for the first step (it is
    the same for ALSE and LSE, so callers fitting both can share one scan).
    A component whose ``(alpha, beta)`` falls within one grid cell of an
    earlier one is flagged through ``duplicate_of`` but still returned.
    """
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    method = normalize_method(method)
    y = _as_samples(signal)
    n = y.size
    grid = grid if grid is not None else GridSpec.default(n)
    cfg = cfg if cfg is not None else OptimizerConfig()

    t0 = time.perf_counter()
    residual = y.copy()
    comps: list[ChirpComponent] = []
    steps: list[StepDiagnostics] = []
    trajectory = [float(residual @ residual)]
    for k in range(p):
        try:
            comp, diag = _fit_one(residual, method, grid, cfg, start if k == 0 else None, workers)
        except (DegenerateRegressorError, InvalidArgumentError) as exc:
            raise EstimationError(k + 1, exc) from exc
        for i, prev in enumerate(comps):
            if (abs(prev.alpha - comp.alpha) <= grid.alpha_step
                    and abs(prev.beta - comp.beta) <= grid.beta_step):
                diag = replace(diag, duplicate_of=i)
                break
        residual = residual - _component_wave(comp, n)
        comps.append(comp)
        steps.append(diag)
        trajectory.append(float(residual @ residual))
    return FitResult(tuple(comps), tuple(steps), tuple(trajectory), method, n,
                     residual, time.perf_counter() - t0)


def alse_single(signal, grid: Optional[GridSpec] = None, cfg: Optional[OptimizerConfig] = None,
                start: Optional[GridMax] = None, workers: int = 1) -> FitResult:
    """One-component approximate least squares fit."""
    return sequential_fit(signal, 1, "ALSE", grid, cfg, start, workers)


def lse_single(signal, grid: Optional[GridSpec] = None, cfg: Optional[OptimizerConfig] = None,
               start: Optional[GridMax] = None, workers: int = 1) -> FitResult:
    """One-component least squares fit."""
    return sequential_fit(signal, 1, "LSE", grid, cfg, start, workers)


def bic(sse_k: float, k: int, n: int) -> float:
    """``n ln(SSE(k)) + 2 (4k + 1) ln(n)``."""
    if not sse_k > 0:
        raise InvalidArgumentError(f"BIC needs SSE > 0, got {sse_k}")
    if k < 0 or n < 1:
        raise InvalidArgumentError("BIC needs k >= 0 and n >= 1")
    return n * math.log(sse_k) + 2 * (4 * k + 1) * math.log(n)


@dataclass(frozen=True)
class OrderSelection:
    p_hat: int
    bic: tuple[float, ...]
    fit: FitResult
    full_fit: FitResult = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "bic": {str(k + 1): v for k, v in enumerate(self.bic)},
            "fit": self.fit.to_dict(),
        }


def select_order(signal, k_max: int, method: str = "ALSE", grid: Optional[GridSpec] = None,
                 cfg: Optional[OptimizerConfig] = None, workers: int = 1) -> OrderSelection:
    """Pick the number of components in ``1..k_max`` minimising BIC (ties: smaller k)."""
    if k_max < 1:
        raise InvalidArgumentError(f"k_max must be >= 1, got {k_max}")
    full = sequential_fit(signal, k_max, method, grid, cfg, workers=workers)
    n = full.n
    values = []
    for k in range(1, k_max + 1):
        s = full.sse_trajectory[k]
        values.append(bic(s, k, n) if s > 0 else -math.inf)
    p_hat = 1 + int(np.argmin(values))
    return OrderSelection(p_hat, tuple(values), full.truncated(p_hat), full)


def match_components(estimated: Sequence[ChirpComponent], truth: Sequence[ChirpComponent],
                     n: int) -> list[Optional[int]]:
    """For each true component, the index of its estimate (or ``None``).

    Assignment minimises the total of ``n |d alpha| + n^2 |d beta|``.
    """
    if not estimated or not truth:
        return [None] * len(truth)
    cost = np.array([
        [n * abs(e.alpha - t.alpha) + n * n * abs(e.beta - t.beta) for e in estimated]
        for t in truth
    ])
    rows, cols = linear_sum_assignment(cost)
    out: list[Optional[int]] = [None] * len(truth)
    for r, c in zip(rows, cols):
        out[r] = int(c)
    return out
