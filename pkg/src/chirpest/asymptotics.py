"""Asymptotic covariance of the chirp estimators.

For one component with amplitudes ``(A, B)`` the limiting covariance of
``(theta_hat - theta0) D^{-1}`` is proportional to the 4x4 matrix returned by
:func:`sigma`, with ``D = diag(n^-1/2, n^-1/2, n^-3/2, n^-5/2)`` and the
parameters ordered ``(A, B, alpha, beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ChirpComponent, InvalidArgumentError

__all__ = [
    "AVAR_SCALE",
    "THEOREM_SCALE",
    "AvarReport",
    "sigma",
    "sigma_inverse",
    "rate_scaling",
    "asymptotic_variances",
]

# Multiplier on c * sigma2 * Sigma used for reported variances. The published
# limit theorem states 2 * c * sigma2 * Sigma, but every tabulated Avar in the
# simulation study equals c * sigma2 * Sigma * D^2; the tables are followed.
AVAR_SCALE = 1.0
THEOREM_SCALE = 2.0

PARAMETERS = ("A", "B", "alpha", "beta")


def _check(A: float, B: float) -> float:
    energy = A * A + B * B
    if not energy > 0:
        raise InvalidArgumentError("sigma needs A^2 + B^2 > 0")
    return energy


def sigma(A: float, B: float) -> np.ndarray:
    """Per-component asymptotic covariance block ``Sigma_k``."""
    e = _check(A, B)
    m = np.array([
        [0.5 * (A * A + 9 * B * B), -4 * A * B, -18 * B, 15 * B],
        [-4 * A * B, 0.5 * (9 * A * A + B * B), 18 * A, -15 * A],
        [-18 * B, 18 * A, 96.0, -90.0],
        [15 * B, -15 * A, -90.0, 90.0],
    ])
    return (2.0 / e) * m


def sigma_inverse(A: float, B: float) -> np.ndarray:
    """Closed-form inverse of :func:`sigma`."""
    e = _check(A, B)
    return np.array([
        [1.0, 0.0, B / 2, B / 3],
        [0.0, 1.0, -A / 2, -A / 3],
        [B / 2, -A / 2, e / 3, e / 4],
        [B / 3, -A / 3, e / 4, e / 5],
    ])


def rate_scaling(n: int) -> np.ndarray:
    """Diagonal of ``D``."""
    n = float(n)
    return np.array([n**-0.5, n**-0.5, n**-1.5, n**-2.5])


@dataclass(frozen=True)
class AvarReport:
    A: float
    B: float
    alpha: float
    beta: float
    c: float
    sigma2: float
    n: int

    def __getitem__(self, name: str) -> float:
        if name not in PARAMETERS:
            raise KeyError(name)
        return getattr(self, name)

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.alpha, self.beta])


def asymptotic_variances(component: ChirpComponent, c: float, sigma2: float, n: int,
                         scale: float = AVAR_SCALE) -> AvarReport:
    """Per-parameter asymptotic variances ``scale * c * sigma2 * Sigma_ii * d_i^2``."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if not (c > 0 and sigma2 > 0):
        raise InvalidArgumentError("c and sigma2 must be > 0")
    diag = np.diag(sigma(component.A, component.B))
    var = scale * c * sigma2 * diag * rate_scaling(n) ** 2
    return AvarReport(*map(float, var), c=float(c), sigma2=float(sigma2), n=int(n))
