"""Signal CSV files and JSON config documents.

Signal CSV::

    t,y
    1,0.123
    2,-1.5
    ...

``t`` must run ``1, 2, ..., n`` in order.

Config documents are JSON objects with ``"schema_version": 1``. Keys:

``n``              sample count (simulate, mc)
``model``          ``{"components": [{"A", "B", "alpha", "beta"}, ...],
                   "noise": {"kind": "iid"|"ma1"|"ar1"|"explicit", "sigma2", ...}}``
                   where ma1 takes ``rho``, ar1 takes ``phi`` and explicit
                   takes ``coeffs`` (``{"lag": value}``)
``noiseless``      optional bool, default false
``reps``           optional, mc only (default 100)
``methods``        optional, mc only (default ``["ALSE", "LSE"]``)
``grid``           optional ``{"alpha_count", "beta_count", "beta_decimation",
                   "alpha_range", "beta_range"}``; missing keys take the
                   defaults for ``n``
``optimizer``      optional ``{"param_tol", "value_tol", "max_iters", "initial_step"}``
``name``           optional label
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .core import InvalidArgumentError, ModelSpec, Signal
from .optimize import OptimizerConfig
from .periodogram import GridSpec

__all__ = [
    "SignalFormatError",
    "SCHEMA_VERSION",
    "read_signal_csv",
    "write_signal_csv",
    "load_config",
    "model_from_config",
    "grid_from_config",
    "optimizer_from_config",
    "atomic_write",
    "scenario_path",
]

SCHEMA_VERSION = 1


class SignalFormatError(ValueError):
    """A signal CSV file is malformed; the message carries the line number."""


@contextmanager
def atomic_write(path, mode: str = "w"):
    """Write to a temporary sibling and rename into place on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_signal_csv(path) -> Signal:
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "y"]:
            raise SignalFormatError(f"{path}:1: expected header 't,y', got {header!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise SignalFormatError(f"{path}:{line}: expected 2 fields, got {len(row)}")
            try:
                t = int(row[0])
                y = float(row[1])
            except ValueError:
                raise SignalFormatError(f"{path}:{line}: cannot parse {row!r}") from None
            if t != len(values) + 1:
                raise SignalFormatError(f"{path}:{line}: expected t={len(values) + 1}, got {t}")
            if not math.isfinite(y):
                raise SignalFormatError(f"{path}:{line}: non-finite sample {row[1]!r}")
            values.append(y)
    if not values:
        raise SignalFormatError(f"{path}: no samples")
    return Signal(np.array(values))


def write_signal_csv(samples, path) -> None:
    y = samples.samples if isinstance(samples, Signal) else np.asarray(samples, dtype=float)
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t", "y"))
        for t, v in enumerate(y, start=1):
            w.writerow((t, repr(float(v))))


def scenario_path(name: str) -> Path:
    """Path of a bundled scenario config, e.g. ``scenario_path("one_n250_sigma01")``."""
    path = Path(str(resources.files("chirpest") / "scenarios" / f"{name}.cfg"))
    if not path.is_file():
        raise InvalidArgumentError(f"no bundled scenario named {name!r}")
    return path


def load_config(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidArgumentError(f"{path}: config must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InvalidArgumentError(f"{path}: unsupported schema_version {version!r}")
    return doc


def model_from_config(doc: dict) -> ModelSpec:
    if "model" not in doc:
        raise InvalidArgumentError("config has no 'model' section")
    return ModelSpec.from_dict(doc["model"])


def grid_from_config(doc: dict, n: int) -> GridSpec:
    g = doc.get("grid") or {}
    base = GridSpec.default(n, g.get("beta_decimation"))
    try:
        return GridSpec(
            alpha_count=int(g.get("alpha_count", base.alpha_count)),
            beta_count=int(g.get("beta_count", base.beta_count)),
            alpha_range=tuple(g.get("alpha_range", base.alpha_range)),
            beta_range=tuple(g.get("beta_range", base.beta_range)),
            beta_decimation=int(g.get("beta_decimation", base.beta_decimation)),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"bad grid section: {exc}") from None


def optimizer_from_config(doc: dict) -> OptimizerConfig:
    o = doc.get("optimizer") or {}
    base = OptimizerConfig()
    step: Optional[tuple] = o.get("initial_step")
    try:
        return OptimizerConfig(
            param_tol=float(o.get("param_tol", base.param_tol)),
            value_tol=float(o.get("value_tol", base.value_tol)),
            max_iters=int(o.get("max_iters", base.max_iters)),
            initial_step=None if step is None else tuple(step),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"bad optimizer section: {exc}") from None
