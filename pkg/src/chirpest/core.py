"""Chirp model types, signal synthesis and stationary linear-process noise.

Time is indexed from ``t = 1``; every phase in the package is
``alpha * t + beta * t**2`` with that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "InvalidArgumentError",
    "AssumptionError",
    "ChirpComponent",
    "Signal",
    "NoiseSpec",
    "ModelSpec",
    "time_index",
    "chirp_waveform",
    "synthesize",
    "generate_noise",
    "linear_process_c",
    "make_rng",
]

AR1_BURN_IN = 500
MIN_SAMPLES = 4

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


class InvalidArgumentError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class AssumptionError(InvalidArgumentError):
    """A model violates one of the identifiability assumptions (2 or 3)."""


@dataclass(frozen=True)
class ChirpComponent:
    """One chirp ``A cos(alpha t + beta t^2) + B sin(alpha t + beta t^2)``.

    ``alpha`` (frequency, rad/sample) and ``beta`` (frequency rate,
    rad/sample^2) must lie in ``[0, pi]``.
    """

    A: float
    B: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("A", "B", "alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= math.pi:
                raise InvalidArgumentError(f"{name}={value} outside [0, pi]")

    @property
    def energy(self) -> float:
        """Squared amplitude ``A^2 + B^2``."""
        return self.A**2 + self.B**2

    @property
    def amplitude(self) -> float:
        return math.hypot(self.A, self.B)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.A, self.B, self.alpha, self.beta)


@dataclass(frozen=True)
class Signal:
    """Real samples ``y(1), ..., y(n)``."""

    samples: np.ndarray

    def __post_init__(self):
        y = np.array(self.samples, dtype=float, copy=True).ravel()
        if y.size == 0:
            raise InvalidArgumentError("signal is empty")
        if not np.all(np.isfinite(y)):
            raise InvalidArgumentError("signal contains non-finite samples")
        y.setflags(write=False)
        object.__setattr__(self, "samples", y)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    @property
    def energy(self) -> float:
        return float(self.samples @ self.samples)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class NoiseSpec:
    """Stationary linear process ``X(t) = sum_j a(j) e(t - j)``.

    ``e(t)`` are i.i.d. Gaussian with variance ``sigma2``. Build instances with
    :meth:`iid`, :meth:`ma1`, :meth:`ar1` or :meth:`explicit`.
    """

    kind: str
    sigma2: float
    coeffs: Mapping[int, float] = field(default_factory=dict)
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("iid", "ma1", "ar1", "explicit"):
            raise InvalidArgumentError(f"unknown noise kind {self.kind!r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise InvalidArgumentError(f"sigma2 must be > 0, got {self.sigma2!r}")
        if self.kind == "ar1" and not abs(self.param) < 1:
            raise InvalidArgumentError(f"ar1 needs |phi| < 1, got {self.param}")
        coeffs = {int(j): float(a) for j, a in dict(self.coeffs).items()}
        if not coeffs:
            raise InvalidArgumentError("noise coefficient window is empty")
        if not all(math.isfinite(a) for a in coeffs.values()):
            raise InvalidArgumentError("noise coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def iid(cls, sigma2: float = 1.0) -> "NoiseSpec":
        return cls("iid", sigma2, {0: 1.0})

    @classmethod
    def ma1(cls, rho: float, sigma2: float = 1.0) -> "NoiseSpec":
        return cls("ma1", sigma2, {0: 1.0, 1: float(rho)}, float(rho))

    @classmethod
    def ar1(cls, phi: float, sigma2: float = 1.0) -> "NoiseSpec":
        if not abs(phi) < 1:
            raise InvalidArgumentError(f"ar1 needs |phi| < 1, got {phi}")
        # MA(infinity) expansion truncated once |phi|^j drops below 1e-17
        if phi == 0:
            terms = 1
        else:
            terms = max(1, int(math.ceil(math.log(1e-17) / math.log(abs(phi)))))
        coeffs = {j: float(phi) ** j for j in range(terms)}
        return cls("ar1", sigma2, coeffs, float(phi))

    @classmethod
    def explicit(cls, coeffs: Mapping[int, float], sigma2: float = 1.0) -> "NoiseSpec":
        return cls("explicit", sigma2, dict(coeffs))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "sigma2": self.sigma2}
        if self.kind == "ma1":
            out["rho"] = self.param
        elif self.kind == "ar1":
            out["phi"] = self.param
        elif self.kind == "explicit":
            out["coeffs"] = {str(j): a for j, a in sorted(self.coeffs.items())}
        return out

    @classmethod
    def from_dict(cls, doc: Mapping) -> "NoiseSpec":
        try:
            kind = doc["kind"]
            sigma2 = float(doc["sigma2"])
            if kind == "iid":
                return cls.iid(sigma2)
            if kind == "ma1":
                return cls.ma1(float(doc["rho"]), sigma2)
            if kind == "ar1":
                return cls.ar1(float(doc["phi"]), sigma2)
            if kind == "explicit":
                return cls.explicit({int(j): float(a) for j, a in doc["coeffs"].items()}, sigma2)
        except KeyError as exc:
            raise InvalidArgumentError(f"noise spec missing key {exc}") from None
        except (TypeError, ValueError, AttributeError) as exc:
            raise InvalidArgumentError(f"bad noise spec: {exc}") from None
        raise InvalidArgumentError(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class ModelSpec:
    """A p-component chirp model plus its noise process.

    Components may be listed in any order, but their energies
    ``A_k^2 + B_k^2`` must be pairwise distinct and positive
    and their ``(alpha, beta)`` pairs distinct.
    """

    components: tuple[ChirpComponent, ...]
    noise: NoiseSpec

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidArgumentError("model needs at least one component")
        object.__setattr__(self, "components", comps)
        for i, c in enumerate(comps):
            if not c.energy > 0:
                raise AssumptionError(
                    f"distinct-energy assumption violated: component {i + 1} has A^2 + B^2 = 0")
        energies = sorted((c.energy for c in comps), reverse=True)
        for hi, lo in zip(energies, energies[1:]):
            if not hi > lo:
                raise AssumptionError(
                    "distinct-energy assumption violated: component energies A^2 + B^2 must be "
                    f"strictly ordered, found a tie at {lo:g}"
                )
        seen = {}
        for i, c in enumerate(comps):
            key = (c.alpha, c.beta)
            if key in seen:
                raise AssumptionError(
                    f"distinct-frequency assumption violated: components {seen[key] + 1} and {i + 1} "
                    f"share (alpha, beta) = {key}"
                )
            seen[key] = i

    @property
    def p(self) -> int:
        return len(self.components)

    def by_energy(self) -> tuple[ChirpComponent, ...]:
        """Components in the order the sequential procedure extracts them."""
        return tuple(sorted(self.components, key=lambda c: -c.energy))

    def to_dict(self) -> dict:
        return {
            "components": [
                {"A": c.A, "B": c.B, "alpha": c.alpha, "beta": c.beta} for c in self.components
            ],
            "noise": self.noise.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ModelSpec":
        try:
            comps = tuple(
                ChirpComponent(float(c["A"]), float(c["B"]), float(c["alpha"]), float(c["beta"]))
                for c in doc["components"]
            )
            noise = NoiseSpec.from_dict(doc["noise"])
        except KeyError as exc:
            raise InvalidArgumentError(f"model document missing key {exc}") from None
        except (TypeError, AttributeError) as exc:
            raise InvalidArgumentError(f"bad model document: {exc}") from None
        return cls(comps, noise)


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def time_index(n: int) -> np.ndarray:
    """``[1, 2, ..., n]`` as floats."""
    return np.arange(1, n + 1, dtype=float)


def chirp_waveform(components: Sequence[ChirpComponent], n: int) -> np.ndarray:
    """Noise-free sum of components at ``t = 1..n``."""
    t = time_index(n)
    t2 = t * t
    y = np.zeros(n)
    for c in components:
        phase = c.alpha * t + c.beta * t2
        y += c.A * np.cos(phase) + c.B * np.sin(phase)
    return y


def generate_noise(spec: NoiseSpec, n: int, seed: SeedLike = None) -> np.ndarray:
    """Draw ``X(1..n)`` from the linear process described by ``spec``.

    The innovations ``e(1..n)`` are always drawn first, so processes sharing
    the same seed share the same in-sample innovations (an MA(1) with
    ``rho = 0`` reproduces the i.i.d. stream exactly). Innovations needed
    before ``t = 1`` or after ``t = n`` are drawn afterwards.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    scale = math.sqrt(spec.sigma2)
    e_main = rng.normal(0.0, scale, size=n)

    if spec.kind == "ar1":
        burn = rng.normal(0.0, scale, size=AR1_BURN_IN)
        e = np.concatenate([burn, e_main])
        x = lfilter([1.0], [1.0, -spec.param], e)
        return x[AR1_BURN_IN:]

    lags = sorted(spec.coeffs)
    lag_max = max(lags[-1], 0)
    lead_max = max(-lags[0], 0)
    past = rng.normal(0.0, scale, size=lag_max)[::-1]
    future = rng.normal(0.0, scale, size=lead_max)
    # e covers t = 1 - lag_max .. n + lead_max
    e = np.concatenate([past, e_main, future])
    x = np.zeros(n)
    for j in lags:
        start = lag_max - j
        x += spec.coeffs[j] * e[start : start + n]
    return x


def linear_process_c(spec: NoiseSpec) -> float:
    """``c = sum_j a(j)^2`` for the noise process."""
    if spec.kind == "iid":
        return 1.0
    if spec.kind == "ma1":
        return 1.0 + spec.param**2
    if spec.kind == "ar1":
        return 1.0 / (1.0 - spec.param**2)
    return math.fsum(a * a for a in spec.coeffs.values())


def synthesize(model: ModelSpec, n: int, seed: SeedLike = None, noiseless: bool = False) -> Signal:
    """Sample ``y(t) = sum_k chirp_k(t) + X(t)`` for ``t = 1..n``.

    With ``noiseless=True`` the deterministic part is returned and ``seed``
    is ignored.
    """
    if n < MIN_SAMPLES:
        raise InvalidArgumentError(f"n must be >= {MIN_SAMPLES}, got {n}")
    y = chirp_waveform(model.components, n)
    if not noiseless:
        y = y + generate_noise(model.noise, n, seed)
    return Signal(y)
