"""Periodogram-type objective ``I(alpha, beta)`` and its grid maximisation.

    I(alpha, beta) = (2/n) |sum_t y(t) exp(-i (alpha t + beta t^2))|^2

For a fixed ``beta`` the inner sum is a DFT of the demodulated sequence
``y(t) exp(-i beta t^2)``, so a whole row of the alpha grid costs one FFT.

For real ``y`` the objective has an exact mirror symmetry,
``I(alpha, beta) == I(pi - alpha, pi - beta)``, because ``pi t (t + 1)`` is
a multiple of ``2 pi`` at integer ``t``. On a mirror-symmetric grid the
smallest-``(k, j)`` tie-break therefore always lands in the half with
``beta <= pi / 2``, and the scan only visits that half.
"""

from __future__ import annotations

import math
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft as sfft

from .core import InvalidArgumentError, Signal, time_index

__all__ = [
    "GridSpec",
    "GridMax",
    "periodogram_value",
    "periodogram_sums",
    "demodulated_dft_row",
    "alpha_grid",
    "grid_scan",
    "surface",
]

PI = math.pi
# rows of the beta grid evaluated per FFT batch
ROW_CHUNK = 512
# largest phase table held as a single lookup array (complex entries)
_SINGLE_TABLE_LIMIT = 1 << 22


def _as_samples(signal) -> np.ndarray:
    if isinstance(signal, Signal):
        return signal.samples
    y = np.asarray(signal, dtype=float).ravel()
    if y.size == 0:
        raise InvalidArgumentError("signal is empty")
    return y


@dataclass(frozen=True)
class GridSpec:
    """Fourier-type grid ``(pi j / alpha_count, pi k / beta_count)``.

    Only interior points are used: ``1 <= j < alpha_count`` and
    ``1 <= k < beta_count``, further restricted to ``alpha_range`` and
    ``beta_range``. With ``beta_decimation = d > 1`` the first pass visits
    every d-th beta row and a second pass rescans the ``2d - 1`` full-resolution
    rows centred on the coarse winner.
    """

    alpha_count: int
    beta_count: int
    alpha_range: tuple[float, float] = (0.0, PI)
    beta_range: tuple[float, float] = (0.0, PI)
    beta_decimation: int = 1

    def __post_init__(self):
        if self.alpha_count < 2 or self.beta_count < 2:
            raise InvalidArgumentError("grid needs alpha_count >= 2 and beta_count >= 2")
        if self.beta_decimation < 1:
            raise InvalidArgumentError("beta_decimation must be >= 1")
        for name in ("alpha_range", "beta_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= PI):
                raise InvalidArgumentError(f"{name}={getattr(self, name)} not inside [0, pi]")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if not self.j_bounds()[0] <= self.j_bounds()[1]:
            raise InvalidArgumentError("alpha_range contains no grid points")
        if not self.k_bounds()[0] <= self.k_bounds()[1]:
            raise InvalidArgumentError("beta_range contains no grid points")

    @classmethod
    def default(cls, n: int, beta_decimation: Optional[int] = None) -> "GridSpec":
        """The ``(pi j / n, pi k / n^2)`` grid; rows decimated by 8 above n = 250."""
        if beta_decimation is None:
            beta_decimation = 1 if n <= 250 else 8
        return cls(alpha_count=n, beta_count=n * n, beta_decimation=beta_decimation)

    @property
    def alpha_step(self) -> float:
        return PI / self.alpha_count

    @property
    def beta_step(self) -> float:
        return PI / self.beta_count

    def j_bounds(self) -> tuple[int, int]:
        lo, hi = self.alpha_range
        return (max(1, math.ceil(lo / PI * self.alpha_count - 1e-9)),
                min(self.alpha_count - 1, math.floor(hi / PI * self.alpha_count + 1e-9)))

    def k_bounds(self) -> tuple[int, int]:
        lo, hi = self.beta_range
        return (max(1, math.ceil(lo / PI * self.beta_count - 1e-9)),
                min(self.beta_count - 1, math.floor(hi / PI * self.beta_count + 1e-9)))

    def mirror_symmetric(self) -> bool:
        """True when the grid maps onto itself under the mirror symmetry."""
        j_lo, j_hi = self.j_bounds()
        k_lo, k_hi = self.k_bounds()
        return j_lo + j_hi == self.alpha_count and k_lo + k_hi == self.beta_count

    def to_dict(self) -> dict:
        return {
            "alpha_count": self.alpha_count,
            "beta_count": self.beta_count,
            "alpha_range": list(self.alpha_range),
            "beta_range": list(self.beta_range),
            "beta_decimation": self.beta_decimation,
        }


@dataclass(frozen=True)
class GridMax:
    alpha: float
    beta: float
    value: float
    j: int
    k: int


def periodogram_sums(signal, alpha: float, beta: float) -> tuple[float, float]:
    """``(sum y cos(phase), sum y sin(phase))`` with ``phase = alpha t + beta t^2``."""
    y = _as_samples(signal)
    t = time_index(y.size)
    phase = alpha * t + beta * (t * t)
    return float(y @ np.cos(phase)), float(y @ np.sin(phase))


def periodogram_value(signal, alpha: float, beta: float) -> float:
    """Direct O(n) evaluation of ``I(alpha, beta)``."""
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise InvalidArgumentError("alpha and beta must be finite")
    y = _as_samples(signal)
    sc, ss = periodogram_sums(y, alpha, beta)
    return 2.0 / y.size * (sc * sc + ss * ss)


def alpha_grid(alpha_count: int) -> np.ndarray:
    """alpha values ``pi j / alpha_count`` for ``j = 1..alpha_count-1``."""
    return PI * np.arange(1, alpha_count) / alpha_count


def _fold(z: np.ndarray, length: int) -> np.ndarray:
    """Alias the last axis onto ``length`` bins (index ``t`` goes to ``t mod length``).

    Column 0 of ``z`` holds ``t = 1``; the constant shift by one sample only
    multiplies each DFT bin by a unit-modulus factor, which ``I`` ignores.
    """
    n = z.shape[-1]
    if n <= length:
        return z
    blocks = -(-n // length)
    padded = np.zeros(z.shape[:-1] + (blocks * length,), dtype=z.dtype)
    padded[..., :n] = z
    return padded.reshape(z.shape[:-1] + (blocks, length)).sum(axis=-2)


def _row_power(demod: np.ndarray, alpha_count: int, j_lo: int, j_hi: int, n: int) -> np.ndarray:
    """I over alpha bins ``j_lo..j_hi`` for each demodulated row."""
    length = 2 * alpha_count
    spec = sfft.fft(_fold(demod, length), n=length, axis=-1)
    spec = spec[..., j_lo : j_hi + 1]
    return (2.0 / n) * (spec.real**2 + spec.imag**2)


def demodulated_dft_row(signal, beta: float, alpha_count: int) -> np.ndarray:
    """``I(pi j / alpha_count, beta)`` for ``j = 1..alpha_count-1`` via one FFT.

    Any ``alpha_count >= 2`` works: when ``2 * alpha_count < n`` the
    demodulated sequence is folded before the transform, which leaves the
    bin values exact.
    """
    if alpha_count < 2:
        raise InvalidArgumentError("alpha_count must be >= 2")
    y = _as_samples(signal)
    n = y.size
    t = time_index(n)
    demod = y * np.exp(-1j * beta * (t * t))
    return _row_power(demod, alpha_count, 1, alpha_count - 1, n)


class _PhaseTable:
    """Exact ``exp(-i pi k t^2 / N)`` for integer k via integer reduction mod 2N."""

    def __init__(self, n: int, beta_count: int):
        self.modulus = 2 * beta_count
        t = np.arange(1, n + 1, dtype=np.int64)
        self.t2 = (t * t) % self.modulus
        # k * t2 must not overflow int64
        self.exact = self.modulus < 3_000_000_000
        if not self.exact:
            self.t2f = time_index(n) ** 2
            self.beta_count = beta_count
            return
        m = np.arange(self.modulus)
        if self.modulus <= _SINGLE_TABLE_LIMIT:
            self.split = None
            self.table = np.exp(-1j * PI * m / beta_count)
        else:
            self.split = math.isqrt(self.modulus) + 1
            step = np.arange(self.split)
            self.lo = np.exp(-1j * PI * step / beta_count)
            self.hi = np.exp(-1j * PI * (step * self.split) / beta_count)

    def rows(self, ks: np.ndarray) -> np.ndarray:
        if not self.exact:
            return np.exp(-1j * np.outer(PI * ks / self.beta_count, self.t2f))
        m = (ks.astype(np.int64)[:, None] * self.t2[None, :]) % self.modulus
        if self.split is None:
            return self.table[m]
        q, r = np.divmod(m, self.split)
        return self.hi[q] * self.lo[r]


@lru_cache(maxsize=2)
def _phase_table(n: int, beta_count: int) -> _PhaseTable:
    return _PhaseTable(n, beta_count)


def _scan_rows(y, table, ks, alpha_count, j_lo, j_hi):
    """Best (value, k, j) over the given beta rows; ties keep smallest (k, j)."""
    power = _row_power(y * table.rows(ks), alpha_count, j_lo, j_hi, y.size)
    flat = int(np.argmax(power))
    r, c = divmod(flat, power.shape[1])
    return float(power[r, c]), int(ks[r]), j_lo + c


def _best(candidates):
    # larger value wins; equal values resolved by smallest (k, j)
    return min(candidates, key=lambda v: (-v[0], v[1], v[2]))


def _scan(y, table, ks, grid, j_lo, j_hi, workers):
    chunks = [ks[i : i + ROW_CHUNK] for i in range(0, ks.size, ROW_CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda c: _scan_rows(y, table, c, grid.alpha_count, j_lo, j_hi), chunks))
    else:
        results = [_scan_rows(y, table, c, grid.alpha_count, j_lo, j_hi) for c in chunks]
    return _best(results)


def grid_scan(signal, grid: GridSpec, workers: int = 1) -> GridMax:
    """Maximise ``I`` over the grid.

    Rows are independent and may be evaluated on ``workers`` threads; the
    reduction is by value then ``(k, j)`` index, so the result does not depend
    on scheduling.
    """
    y = _as_samples(signal)
    n = y.size
    j_lo, j_hi = grid.j_bounds()
    k_lo, k_hi = grid.k_bounds()
    if grid.mirror_symmetric():
        k_hi = min(k_hi, grid.beta_count // 2)
    table = _phase_table(n, grid.beta_count)

    d = grid.beta_decimation
    best = _scan(y, table, np.arange(k_lo, k_hi + 1, d), grid, j_lo, j_hi, workers)
    if d > 1:
        k_star = best[1]
        fine = np.arange(max(k_lo, k_star - d + 1), min(k_hi, k_star + d - 1) + 1)
        best = _best([best, _scan(y, table, fine, grid, j_lo, j_hi, workers)])

    value, k, j = best
    return GridMax(alpha=PI * j / grid.alpha_count, beta=PI * k / grid.beta_count,
                   value=value, j=j, k=k)


def surface(signal, alphas, betas) -> np.ndarray:
    """``I`` on the outer product of ``alphas`` (columns) and ``betas`` (rows)."""
    y = _as_samples(signal)
    t = time_index(y.size)
    alphas = np.asarray(alphas, dtype=float)
    out = np.empty((len(betas), alphas.size))
    for r, beta in enumerate(np.asarray(betas, dtype=float)):
        phase = np.outer(alphas, t) + beta * (t * t)
        sc = np.cos(phase) @ y
        ss = np.sin(phase) @ y
        out[r] = 2.0 / y.size * (sc * sc + ss * ss)
    return out
