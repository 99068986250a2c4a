"""Sweeps over the event-ready sample space.

Each grid point is one choice of window-start offset and invalid-marker
threshold; the selected sample gets the full statistics battery. Counting for
a whole row of points is one kernel pass over the events.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _backend
from .herald import EventsLike, as_columns, select_sample
from .model import (
    CountsTable,
    DegenerateStatisticError,
    EmptyCellError,
    HeraldFilter,
    ScanResult,
)
from .stats import chi2_nosignal, chsh, nosignal, p_chsh_binomial, tabulate

DEFAULT_OFFSET_MIN_PS = -50_000
DEFAULT_OFFSET_MAX_PS = 20_000
DEFAULT_OFFSET_STEP_PS = 1_000
DEFAULT_THRESHOLDS = tuple(range(0, 251, 10))
HISTOGRAM_BINS = 20


def analyze_counts(counts: CountsTable, start_offset_ps: int, invalid_threshold: int) -> ScanResult:
    n = counts.grand_total
    try:
        s = chsh(counts)
        ns = nosignal(counts)
    except EmptyCellError:
        return ScanResult(start_offset_ps, invalid_threshold, n, counts=counts)
    try:
        chi2, _, p_chi2 = chi2_nosignal(ns)
    except DegenerateStatisticError:
        chi2 = p_chi2 = None
    return ScanResult(
        start_offset_ps=start_offset_ps,
        invalid_threshold=invalid_threshold,
        sample_size=n,
        chsh=s,
        nosig=ns.as_tuple(),
        chi2=chi2,
        p_chi2=p_chi2,
        p_chsh_gaussian=s.p,
        p_chsh_binomial=p_chsh_binomial(counts),
        counts=counts,
    )


def analyze(events, filt: HeraldFilter) -> ScanResult:
    """Single-sample analysis through the plain predicate, no kernels involved."""
    counts = tabulate(select_sample(events, filt))
    return analyze_counts(counts, filt.start_offset_ps, filt.invalid_threshold)


@dataclass(frozen=True)
class ScanGrid:
    """Row-major grid of results: offset is the outer axis, threshold the inner."""

    offsets: tuple
    thresholds: tuple
    results: tuple

    def __post_init__(self):
        if len(self.results) != len(self.offsets) * len(self.thresholds):
            raise ValueError("results must cover every (offset, threshold) pair")

    def at(self, offset: int, threshold: int) -> ScanResult:
        i = self.offsets.index(offset)
        j = self.thresholds.index(threshold)
        return self.results[i * len(self.thresholds) + j]

    def row(self, offset: int) -> tuple:
        i = self.offsets.index(offset)
        nt = len(self.thresholds)
        return self.results[i * nt:(i + 1) * nt]

    def column(self, threshold: int) -> tuple:
        j = self.thresholds.index(threshold)
        return self.results[j::len(self.thresholds)]


def inclusive_range(start: int, stop: int, step: int) -> list:
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if start > stop:
        raise ValueError(f"range start {start} exceeds stop {stop}")
    return list(range(start, stop + 1, step))


def _count_rows(cols, base: HeraldFilter, offsets, thresholds) -> np.ndarray:
    lowers = np.array([base.window_start_ps + o for o in offsets], dtype=np.int64)
    grid = _backend.kernels.count_grid(
        cols.click_lo, cols.click_hi, cols.clean, cols.code,
        lowers, base.window_stop_ps, np.asarray(thresholds, dtype=np.int64),
    )
    grid = np.asarray(grid)
    grid[lowers >= base.window_stop_ps] = 0
    return grid


def _analyze_rows(cols, base, offsets, thresholds) -> list:
    grid = _count_rows(cols, base, offsets, thresholds)
    out = []
    for i, offset in enumerate(offsets):
        for j, threshold in enumerate(thresholds):
            counts = CountsTable(tuple(int(v) for v in grid[i, j]))
            out.append(analyze_counts(counts, offset, threshold))
    return out


def scan_2d(
    events: EventsLike,
    base: HeraldFilter,
    offsets: Sequence[int],
    thresholds: Sequence[int],
    workers: int = 1,
) -> ScanGrid:
    """Analyse every (offset, threshold) combination.

    ``base`` supplies the window origin and stop. With ``workers > 1`` rows are
    counted and analysed on a thread pool; the result does not depend on it.
    """
    offsets = tuple(int(o) for o in offsets)
    thresholds = tuple(int(t) for t in thresholds)
    if not offsets or not thresholds:
        raise ValueError("scan axes must be non-empty")
    for t in thresholds:
        base.with_(invalid_threshold=t)  # validates the range
    cols = as_columns(events)

    workers = max(1, int(workers))
    if workers == 1 or len(offsets) == 1:
        results = _analyze_rows(cols, base, offsets, thresholds)
    else:
        chunk = math.ceil(len(offsets) / workers)
        pieces = [offsets[i:i + chunk] for i in range(0, len(offsets), chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda part: _analyze_rows(cols, base, part, thresholds), pieces)
            results = [r for part in parts for r in part]
    return ScanGrid(offsets, thresholds, tuple(results))


def scan_1d(
    events: EventsLike,
    base: HeraldFilter,
    offset_min: int = DEFAULT_OFFSET_MIN_PS,
    offset_max: int = DEFAULT_OFFSET_MAX_PS,
    step: int = DEFAULT_OFFSET_STEP_PS,
    workers: int = 1,
) -> ScanGrid:
    offsets = inclusive_range(offset_min, offset_max, step)
    return scan_2d(events, base, offsets, [base.invalid_threshold], workers=workers)


@dataclass(frozen=True)
class PValueHistogram:
    bin_edges: tuple
    counts: tuple
    total: int

    def total_variation_from_uniform(self) -> float:
        if self.total == 0:
            raise ValueError("empty histogram")
        flat = 1.0 / len(self.counts)
        return 0.5 * math.fsum(abs(c / self.total - flat) for c in self.counts)


def histogram_pvalues(pvalues: Iterable[Optional[float]], bins: int = HISTOGRAM_BINS) -> PValueHistogram:
    """Equal-width histogram on [0, 1]; bins are closed on the left, the last
    one also on the right. None entries are skipped."""
    counts = [0] * bins
    for p in pvalues:
        if p is None:
            continue
        idx = min(int(p * bins), bins - 1)
        counts[idx] += 1
    edges = tuple(i / bins for i in range(bins + 1))
    return PValueHistogram(edges, tuple(counts), sum(counts))


_WHICH = {
    "nosig_chi2": "p_chi2",
    "nosig": "p_chi2",
    "chsh": "p_chsh_gaussian",
    "chsh_binomial": "p_chsh_binomial",
}


def pvalue_histogram(grid, which: str = "nosig_chi2") -> PValueHistogram:
    """Histogram one p-value over the defined points of a grid (or any
    iterable of ScanResult)."""
    try:
        attr = _WHICH[which]
    except KeyError:
        raise ValueError(f"unknown p-value selector {which!r}; choose from {sorted(_WHICH)}") from None
    results = grid.results if isinstance(grid, ScanGrid) else grid
    return histogram_pvalues(getattr(r, attr) for r in results)
