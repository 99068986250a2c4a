"""Domain types shared across the package.

All types are frozen dataclasses; once built they are plain values and can be
handed to worker threads or processes freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

CLEAN_CEILING = 250

SETTINGS = (0, 1)
OUTCOMES = (1, -1)
SETTING_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


class DomainError(ValueError):
    """A field value outside its allowed domain."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name} {message}")
        self.field = field_name


class EmptyCellError(ValueError):
    """A setting pair with zero recorded trials."""

    def __init__(self, a: int, b: int):
        super().__init__(f"no trials recorded for setting pair (a={a}, b={b})")
        self.pair = (a, b)


class DegenerateStatisticError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CandidateEvent:
    run_id: int
    sync_index: int
    click1_ps: int
    click2_ps: int
    clean_attempts: int
    setting_a: int
    setting_b: int
    outcome_x: int
    outcome_y: int


def _as_int(name: str, value) -> int:
    if isinstance(value, bool):
        raise DomainError(name, f"must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise DomainError(name, f"must be an integer, got {value!r}")


def validate_event(
    run_id,
    sync_index,
    click1_ps,
    click2_ps,
    clean_attempts,
    setting_a,
    setting_b,
    outcome_x,
    outcome_y,
) -> CandidateEvent:
    """Build a CandidateEvent from raw field values.

    Integers, integral floats and numeric strings are accepted. ``clean_attempts``
    above 250 is saturated to 250; every other out-of-domain value raises
    :class:`DomainError` naming the field.
    """
    run_id = _as_int("run_id", run_id)
    sync_index = _as_int("sync_index", sync_index)
    click1_ps = _as_int("click1_ps", click1_ps)
    click2_ps = _as_int("click2_ps", click2_ps)
    clean_attempts = _as_int("clean_attempts", clean_attempts)
    setting_a = _as_int("setting_a", setting_a)
    setting_b = _as_int("setting_b", setting_b)
    outcome_x = _as_int("outcome_x", outcome_x)
    outcome_y = _as_int("outcome_y", outcome_y)

    for name, value in (("run_id", run_id), ("sync_index", sync_index),
                        ("clean_attempts", clean_attempts)):
        if value < 0:
            raise DomainError(name, f"must be non-negative, got {value}")
    for name, value in (("setting_a", setting_a), ("setting_b", setting_b)):
        if value not in SETTINGS:
            raise DomainError(name, f"out of range: {value} not in {{0,1}}")
    for name, value in (("outcome_x", outcome_x), ("outcome_y", outcome_y)):
        if value not in OUTCOMES:
            raise DomainError(name, f"out of range: {value} not in {{+1,-1}}")

    return CandidateEvent(
        run_id=run_id,
        sync_index=sync_index,
        click1_ps=click1_ps,
        click2_ps=click2_ps,
        clean_attempts=min(clean_attempts, CLEAN_CEILING),
        setting_a=setting_a,
        setting_b=setting_b,
        outcome_x=outcome_x,
        outcome_y=outcome_y,
    )


def revalidate(event: CandidateEvent) -> CandidateEvent:
    return validate_event(
        event.run_id, event.sync_index, event.click1_ps, event.click2_ps,
        event.clean_attempts, event.setting_a, event.setting_b,
        event.outcome_x, event.outcome_y,
    )


@dataclass(frozen=True, slots=True)
class HeraldFilter:
    """Event-ready selection parameters, all in integer picoseconds.

    The effective window is ``[window_start_ps + start_offset_ps, window_stop_ps]``,
    inclusive on both ends. An empty window is allowed and selects nothing.
    """

    window_start_ps: int = 0
    start_offset_ps: int = 0
    window_stop_ps: int = 50_000
    invalid_threshold: int = CLEAN_CEILING

    def __post_init__(self):
        for name in ("window_start_ps", "start_offset_ps", "window_stop_ps", "invalid_threshold"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(name, f"must be an integer, got {value!r}")
        if not 0 <= self.invalid_threshold <= CLEAN_CEILING:
            raise DomainError("invalid_threshold", f"must lie in [0, 250], got {self.invalid_threshold}")

    @property
    def lower_ps(self) -> int:
        return self.window_start_ps + self.start_offset_ps

    @property
    def degenerate(self) -> bool:
        return self.lower_ps >= self.window_stop_ps

    def with_(self, **changes) -> "HeraldFilter":
        values = {
            "window_start_ps": self.window_start_ps,
            "start_offset_ps": self.start_offset_ps,
            "window_stop_ps": self.window_stop_ps,
            "invalid_threshold": self.invalid_threshold,
        }
        values.update(changes)
        return HeraldFilter(**values)


def _cell_index(a: int, b: int, x: int, y: int) -> int:
    # layout a,b,x,y with x,y mapped +1 -> 0, -1 -> 1
    return a * 8 + b * 4 + (0 if x == 1 else 2) + (0 if y == 1 else 1)


@dataclass(frozen=True, slots=True)
class CountsTable:
    """The sixteen joint counts N^{xy}_{ab}.

    Stored flat in the order ``a, b, x, y`` with outcome +1 before -1, so
    ``cells[0:4]`` are ``(++, +-, -+, --)`` for ``a=0, b=0``.
    """

    cells: tuple = (0,) * 16

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        if len(cells) != 16:
            raise ValueError(f"a counts table has 16 cells, got {len(cells)}")
        if any(c < 0 for c in cells):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_pairs(cls, pairs: Mapping[tuple, Iterable[int]]) -> "CountsTable":
        """Build from ``{(a, b): (n++, n+-, n-+, n--)}``; missing pairs are empty."""
        cells = [0] * 16
        for (a, b), quad in pairs.items():
            quad = tuple(quad)
            if len(quad) != 4:
                raise ValueError("each setting pair needs four counts (++, +-, -+, --)")
            base = a * 8 + b * 4
            cells[base:base + 4] = quad
        return cls(tuple(cells))

    def n(self, a: int, b: int, x: int, y: int) -> int:
        return self.cells[_cell_index(a, b, x, y)]

    def quad(self, a: int, b: int) -> tuple:
        """Counts ``(n++, n+-, n-+, n--)`` for one setting pair."""
        base = a * 8 + b * 4
        return self.cells[base:base + 4]

    def total(self, a: int, b: int) -> int:
        return sum(self.quad(a, b))

    @property
    def grand_total(self) -> int:
        return sum(self.cells)

    def add(self, event: CandidateEvent) -> "CountsTable":
        cells = list(self.cells)
        cells[_cell_index(event.setting_a, event.setting_b, event.outcome_x, event.outcome_y)] += 1
        return CountsTable(tuple(cells))


@dataclass(frozen=True, slots=True)
class StatWithSigma:
    """An estimate with its propagated standard deviation.

    ``z`` and ``p`` are None when no null hypothesis applies (plain correlations,
    marginals). ``degenerate`` marks a zero sigma paired with a value away from
    the null, where z is infinite.
    """

    value: float
    sigma: float
    z: Optional[float] = None
    p: Optional[float] = None
    degenerate: bool = False

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.z is not None and not (self.z >= 0 or math.isinf(self.z)):
            raise ValueError(f"z must be non-negative, got {self.z}")


NOSIG_LABELS = ("A->B0", "A->B1", "B->A0", "B->A1")


@dataclass(frozen=True, slots=True)
class ScanResult:
    """One analysed sample: the filter that produced it and every statistic.

    Statistics are None when undefined for that sample (an empty setting pair,
    or a zero sigma where the chi-square needs a positive one).
    """

    start_offset_ps: int
    invalid_threshold: int
    sample_size: int
    chsh: Optional[StatWithSigma] = None
    nosig: Optional[tuple] = None
    chi2: Optional[float] = None
    p_chi2: Optional[float] = None
    p_chsh_gaussian: Optional[float] = None
    p_chsh_binomial: Optional[float] = None
    counts: Optional[CountsTable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.counts is not None and self.counts.grand_total != self.sample_size:
            raise ValueError("sample_size disagrees with the counts table")
        if self.nosig is not None and len(self.nosig) != 4:
            raise ValueError("nosig holds exactly four statistics")

    @property
    def defined(self) -> bool:
        return self.chsh is not None
