"""Event-ready selection: which candidate events count as trials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _backend
from .model import CandidateEvent, CountsTable, HeraldFilter, validate_event


def accepts(event: CandidateEvent, filt: HeraldFilter) -> bool:
    lower = filt.lower_ps
    stop = filt.window_stop_ps
    return (
        lower <= event.click1_ps <= stop
        and lower <= event.click2_ps <= stop
        and event.clean_attempts >= filt.invalid_threshold
    )


def select_sample(events: Sequence[CandidateEvent], filt: HeraldFilter) -> list:
    """Events whose two heralding clicks both fall inside the window and whose
    clean-attempt run meets the threshold, in input order."""
    if filt.degenerate:
        return []
    return [ev for ev in events if accepts(ev, filt)]


@dataclass(frozen=True)
class EventColumns:
    """Column-wise view of an event sequence, the layout the kernels consume.

    Only the earlier and later click are kept since the window test needs
    nothing else; ``code`` is the flat counts-table index of each event.
    """

    click_lo: np.ndarray
    click_hi: np.ndarray
    clean: np.ndarray
    code: np.ndarray

    def __len__(self):
        return len(self.code)

    @classmethod
    def from_events(cls, events: Sequence[CandidateEvent]) -> "EventColumns":
        n = len(events)
        c1 = np.fromiter((e.click1_ps for e in events), dtype=np.int64, count=n)
        c2 = np.fromiter((e.click2_ps for e in events), dtype=np.int64, count=n)
        clean = np.fromiter((e.clean_attempts for e in events), dtype=np.int64, count=n)
        a = np.fromiter((e.setting_a for e in events), dtype=np.int64, count=n)
        b = np.fromiter((e.setting_b for e in events), dtype=np.int64, count=n)
        x = np.fromiter((e.outcome_x for e in events), dtype=np.int64, count=n)
        y = np.fromiter((e.outcome_y for e in events), dtype=np.int64, count=n)
        return cls.from_arrays(c1, c2, clean, a, b, x, y)

    @classmethod
    def from_arrays(cls, click1, click2, clean, a, b, x, y) -> "EventColumns":
        click1 = np.asarray(click1, dtype=np.int64)
        click2 = np.asarray(click2, dtype=np.int64)
        code = (np.asarray(a, dtype=np.int64) * 8 + np.asarray(b, dtype=np.int64) * 4
                + (np.asarray(x) == -1) * 2 + (np.asarray(y) == -1))
        return cls(
            click_lo=np.ascontiguousarray(np.minimum(click1, click2)),
            click_hi=np.ascontiguousarray(np.maximum(click1, click2)),
            clean=np.ascontiguousarray(clean, dtype=np.int64),
            code=np.ascontiguousarray(code, dtype=np.int64),
        )


EventsLike = Union[Sequence[CandidateEvent], EventColumns]


def as_columns(events: EventsLike) -> EventColumns:
    if isinstance(events, EventColumns):
        return events
    return EventColumns.from_events(events)


def selection_mask(cols: EventColumns, filt: HeraldFilter) -> np.ndarray:
    if filt.degenerate:
        return np.zeros(len(cols), dtype=bool)
    return np.asarray(_backend.kernels.select_mask(
        cols.click_lo, cols.click_hi, cols.clean,
        filt.lower_ps, filt.window_stop_ps, filt.invalid_threshold,
    ), dtype=bool)


def count_selected(events: EventsLike, filt: HeraldFilter) -> CountsTable:
    """Counts table of the selected sample without materialising it."""
    cols = as_columns(events)
    if filt.degenerate:
        return CountsTable()
    grid = _backend.kernels.count_grid(
        cols.click_lo, cols.click_hi, cols.clean, cols.code,
        np.array([filt.lower_ps], dtype=np.int64), filt.window_stop_ps,
        np.array([filt.invalid_threshold], dtype=np.int64),
    )
    return CountsTable(tuple(int(v) for v in grid[0, 0]))


def events_from_columns(click1, click2, clean, a, b, x, y, run_id=0) -> list:
    return [
        validate_event(run_id, i, int(c1), int(c2), int(cl), int(sa), int(sb), int(ox), int(oy))
        for i, (c1, c2, cl, sa, sb, ox, oy) in enumerate(zip(click1, click2, clean, a, b, x, y))
    ]
