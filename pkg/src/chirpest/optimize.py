"""Nelder-Mead on ``[0, pi]^2`` and the least-squares pieces of the chirp fit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import ChirpComponent, InvalidArgumentError, chirp_waveform, time_index
from .periodogram import _as_samples

__all__ = [
    "DegenerateRegressorError",
    "OptimizerConfig",
    "NelderMeadResult",
    "nelder_mead",
    "sse",
    "separable_amplitudes",
    "profiled_sse",
]

PI = math.pi
BOX = ((0.0, PI), (0.0, PI))
# relative determinant below which the 2x2 normal matrix counts as singular
SINGULAR_RTOL = 1e-12


class DegenerateRegressorError(ArithmeticError):
    """The cos/sin regressors at (alpha, beta) are (numerically) collinear or zero."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Stopping rules and simplex size for :func:`nelder_mead`.

    ``initial_step`` is the per-coordinate offset of the two non-start
    vertices. ``None`` lets the caller supply a scale; the estimators use one
    grid cell in each direction.
    """

    param_tol: float = 1e-9
    value_tol: float = 1e-12
    max_iters: int = 2000
    initial_step: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not (self.param_tol > 0 and self.value_tol > 0):
            raise InvalidArgumentError("optimizer tolerances must be > 0")
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be >= 1")
        if self.initial_step is not None:
            step = tuple(float(s) for s in self.initial_step)
            if len(step) != 2 or not all(s > 0 for s in step):
                raise InvalidArgumentError("initial_step must be two positive numbers")
            object.__setattr__(self, "initial_step", step)

    def with_step(self, step: tuple[float, float]) -> "OptimizerConfig":
        if self.initial_step is not None:
            return self
        return OptimizerConfig(self.param_tol, self.value_tol, self.max_iters, step)

    def to_dict(self) -> dict:
        return {
            "param_tol": self.param_tol,
            "value_tol": self.value_tol,
            "max_iters": self.max_iters,
            "initial_step": None if self.initial_step is None else list(self.initial_step),
        }


@dataclass(frozen=True)
class NelderMeadResult:
    x: tuple[float, float]
    value: float
    iterations: int
    converged: bool


def _initial_simplex(start: np.ndarray, step: Sequence[float]) -> np.ndarray:
    simplex = [start.copy()]
    for i, h in enumerate(step):
        vertex = start.copy()
        # step inwards when the outward vertex would leave the box
        vertex[i] = start[i] + h if start[i] + h <= BOX[i][1] else start[i] - h
        simplex.append(vertex)
    return np.array(simplex)


def nelder_mead(
    objective: Callable[[float, float], float],
    start: Sequence[float],
    cfg: OptimizerConfig = OptimizerConfig(),
    sense: str = "minimize",
) -> NelderMeadResult:
    """Optimise a function of ``(alpha, beta)`` over ``[0, pi]^2``.

    Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
    shrink 0.5) with trial points projected onto the box. Stops when both the
    simplex extent (``param_tol``, absolute) and the spread of vertex values
    (``value_tol``, relative to ``max(1, |objective(start)|)``) are small, or
    after ``max_iters`` iterations with ``converged=False``. The start is a simplex vertex, so the result is never
    worse than the start.
    """
    if sense not in ("minimize", "maximize"):
        raise InvalidArgumentError(f"sense must be 'minimize' or 'maximize', got {sense!r}")
    x0 = np.asarray(start, dtype=float)
    if x0.shape != (2,) or not np.all(np.isfinite(x0)):
        raise InvalidArgumentError(f"start must be two finite numbers, got {start!r}")
    if not all(lo <= v <= hi for v, (lo, hi) in zip(x0, BOX)):
        raise InvalidArgumentError(f"start {tuple(x0)} outside [0, pi]^2")
    f0 = objective(x0[0], x0[1])
    if not math.isfinite(f0):
        raise InvalidArgumentError(f"objective is not finite at start {tuple(x0)}")
    # value spread is judged on the objective scaled by its magnitude at the start
    scale = max(1.0, abs(f0))
    sign = (1.0 if sense == "minimize" else -1.0) / scale

    step = cfg.initial_step
    if step is None:
        step = tuple(max(abs(v) * 0.05, 2.5e-4) for v in x0)

    res = minimize(
        lambda x: sign * objective(x[0], x[1]),
        x0,
        method="Nelder-Mead",
        bounds=BOX,
        options={
            "xatol": cfg.param_tol,
            "fatol": cfg.value_tol,
            "maxiter": cfg.max_iters,
            "maxfev": 1_000_000,
            "initial_simplex": _initial_simplex(x0, step),
            "adaptive": False,
        },
    )
    x = (float(res.x[0]), float(res.x[1]))
    value = float(objective(x[0], x[1]))
    if sign * value > sign * f0:
        # the start vertex can only be displaced by a strictly better point
        x, value = (float(x0[0]), float(x0[1])), float(f0)
    return NelderMeadResult(x=x, value=value, iterations=int(res.nit), converged=res.status == 0)


def sse(signal, components: Sequence[ChirpComponent]) -> float:
    """Residual sum of squares of ``signal`` against a set of components."""
    y = _as_samples(signal)
    r = y - chirp_waveform(components, y.size)
    return float(r @ r)


def _regressors(n: int, alpha: float, beta: float):
    t = time_index(n)
    phase = alpha * t + beta * (t * t)
    return np.cos(phase), np.sin(phase)


def _solve_amplitudes(y, c, s):
    cc, ss, cs = c @ c, s @ s, c @ s
    det = cc * ss - cs * cs
    if not det > SINGULAR_RTOL * max(cc * ss, 1e-300):
        raise DegenerateRegressorError(
            f"normal matrix singular (cc={cc:.3g}, ss={ss:.3g}, cs={cs:.3g})")
    yc, ys = y @ c, y @ s
    return (ss * yc - cs * ys) / det, (cc * ys - cs * yc) / det


def separable_amplitudes(signal, alpha: float, beta: float) -> tuple[float, float]:
    """Least-squares ``(A, B)`` at fixed ``(alpha, beta)`` from the 2x2 normal equations.

    Raises
    ------
    DegenerateRegressorError
        If the cosine and sine regressors are linearly dependent, e.g. at
        ``alpha = beta = 0`` where the sine regressor vanishes.
    """
    y = _as_samples(signal)
    if y.size < 2:
        raise InvalidArgumentError("need at least 2 samples")
    c, s = _regressors(y.size, alpha, beta)
    A, B = _solve_amplitudes(y, c, s)
    return float(A), float(B)


def profiled_sse(signal, alpha: float, beta: float) -> float:
    """SSE at ``(alpha, beta)`` with the amplitudes profiled out."""
    y = _as_samples(signal)
    c, s = _regressors(y.size, alpha, beta)
    A, B = _solve_amplitudes(y, c, s)
    r = y - A * c - B * s
    return float(r @ r)
