"""Seeded generator of synthetic heralded Bell-test data.

Two event classes are mixed. Entangled trials have NV-like click times
(exponential from t=0) and singlet-like correlations of strength V.
Contaminated trials have reflection-like click times (a short exponential
starting ``lead`` ps early), an uncorrelated x and, optionally, a y that
depends on Alice's setting, which plants a genuine A->B signal.

The random stream is xoshiro256** seeded via splitmix64 from the 64-bit seed,
eight draws per event in a fixed order (see ``_kernels_py.synth_fill``). This
layout is a compatibility contract: the same config yields the same file on
every platform and with either kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import _backend
from .herald import EventColumns, events_from_columns
from .model import CLEAN_CEILING

_INV_SQRT2 = math.sqrt(0.5)
# per-pair correlation sign/strength, indexed a*2 + b
CORRELATION_TARGETS = (_INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)


@dataclass(frozen=True)
class SynthConfig:
    n_attempts: int = 2000
    seed: int = 0
    visibility: float = 0.9
    w_ref: float = 0.5
    epsilon: float = 0.0
    tau_nv: float = 12_000.0
    tau_ref: float = 3_000.0
    lead: float = -8_000.0
    invalid_rate: float = 0.002
    run_id: int = 0

    def __post_init__(self):
        if not isinstance(self.n_attempts, int) or self.n_attempts <= 0:
            raise ValueError(f"n_attempts must be a positive integer, got {self.n_attempts!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for name in ("visibility", "w_ref", "invalid_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not -1.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [-1, 1], got {self.epsilon}")
        for name in ("tau_nv", "tau_ref"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if not math.isfinite(self.lead):
            raise ValueError("lead must be finite")
        if not isinstance(self.run_id, int) or self.run_id < 0:
            raise ValueError(f"run_id must be a non-negative integer, got {self.run_id!r}")

    def with_(self, **changes) -> "SynthConfig":
        return replace(self, **changes)


_INT_FIELDS = {"n_attempts", "seed", "run_id"}
_ALIASES = {"n": "n_attempts", "wref": "w_ref", "v": "visibility"}


def parse_config_text(text: str, base: SynthConfig = SynthConfig()) -> SynthConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys raise."""
    known = {f.name for f in fields(SynthConfig)}
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            changes[key] = int(value) if key in _INT_FIELDS else float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: bad value {value!r} for {key}") from None
    return replace(base, **changes)


def load_config(path, base: SynthConfig = SynthConfig()) -> SynthConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base)


@dataclass(frozen=True)
class SynthBatch:
    """Generated data in column form, plus the hidden class label."""

    config: SynthConfig
    click1: np.ndarray
    click2: np.ndarray
    clean: np.ndarray
    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    contaminated: np.ndarray

    def events(self) -> list:
        return events_from_columns(self.click1, self.click2, self.clean,
                                   self.a, self.b, self.x, self.y, run_id=self.config.run_id)

    def columns(self) -> EventColumns:
        return EventColumns.from_arrays(self.click1, self.click2, self.clean,
                                        self.a, self.b, self.x, self.y)


def kernel_arguments(config: SynthConfig) -> tuple:
    v, eps, r = config.visibility, config.epsilon, config.invalid_rate
    p_same = np.array([(1.0 + v * c) / 2.0 for c in CORRELATION_TARGETS], dtype=np.float64)
    p_plus = np.array([0.5 + eps * (2 * a - 1) / 2.0 for a in (0, 1)], dtype=np.float64)
    if r == 0.0:
        log_clean, clean_fixed = -1.0, CLEAN_CEILING
    elif r == 1.0:
        log_clean, clean_fixed = -1.0, 0
    else:
        log_clean, clean_fixed = math.log1p(-r), -1
    return (config.seed, config.n_attempts, float(config.w_ref),
            float(config.tau_nv), float(config.tau_ref), float(config.lead),
            log_clean, clean_fixed, p_same, p_plus, CLEAN_CEILING)


def generate_batch(config: SynthConfig, backend=None) -> SynthBatch:
    kernels = backend if backend is not None else _backend.kernels
    arrays = kernels.synth_fill(*kernel_arguments(config))
    return SynthBatch(config, *(np.asarray(arr) for arr in arrays))


def generate(config: SynthConfig) -> list:
    """Synthetic candidate events, one per heralding attempt, in sync order."""
    return generate_batch(config).events()
