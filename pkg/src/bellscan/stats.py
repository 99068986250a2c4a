"""Estimators, propagated standard deviations and hypothesis tests.

Counts are treated as independent Poisson-like variables with variance equal
to the count; every sigma here is first-order error propagation of that
assumption through the frequency estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .model import (
    NOSIG_LABELS,
    SETTING_PAIRS,
    CandidateEvent,
    CountsTable,
    DegenerateStatisticError,
    EmptyCellError,
    StatWithSigma,
    _cell_index,
)

LOCAL_BOUND = 2.0
CHSH_WIN_PROBABILITY = 0.75

_SQRT2 = math.sqrt(2.0)


def tabulate(trials: Iterable[CandidateEvent]) -> CountsTable:
    cells = [0] * 16
    for ev in trials:
        cells[_cell_index(ev.setting_a, ev.setting_b, ev.outcome_x, ev.outcome_y)] += 1
    return CountsTable(tuple(cells))


def _nonempty_quad(counts: CountsTable, a: int, b: int) -> tuple:
    quad = counts.quad(a, b)
    if sum(quad) == 0:
        raise EmptyCellError(a, b)
    return quad


def joint_prob(counts: CountsTable, a: int, b: int, x: int, y: int) -> float:
    total = sum(_nonempty_quad(counts, a, b))
    return counts.n(a, b, x, y) / total


def correlation(counts: CountsTable, a: int, b: int) -> StatWithSigma:
    """Correlation E_ab = p(++) - p(+-) - p(-+) + p(--) with its sigma."""
    npp, npm, nmp, nmm = _nonempty_quad(counts, a, b)
    total = npp + npm + nmp + nmm
    value = (npp - npm - nmp + nmm) / total
    var = 4.0 * (npp + nmm) * (npm + nmp) / total**3
    return StatWithSigma(value=value, sigma=math.sqrt(var))


def marginal_A(counts: CountsTable, x: int, a: int, b: int) -> StatWithSigma:
    npp, npm, nmp, nmm = _nonempty_quad(counts, a, b)
    total = npp + npm + nmp + nmm
    plus, minus = npp + npm, nmp + nmm
    value = (plus if x == 1 else minus) / total
    return StatWithSigma(value=value, sigma=math.sqrt(plus * minus / total**3))


def marginal_B(counts: CountsTable, y: int, a: int, b: int) -> StatWithSigma:
    npp, npm, nmp, nmm = _nonempty_quad(counts, a, b)
    total = npp + npm + nmp + nmm
    plus, minus = npp + nmp, npm + nmm
    value = (plus if y == 1 else minus) / total
    return StatWithSigma(value=value, sigma=math.sqrt(plus * minus / total**3))


def p_two_tailed(z: float) -> float:
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    return math.erfc(z / _SQRT2)


def p_one_tailed(deviation: float) -> float:
    """Upper Gaussian tail P(Z >= deviation); deviation may be negative."""
    return 0.5 * math.erfc(deviation / _SQRT2)


def chsh(counts: CountsTable) -> StatWithSigma:
    """|E00 + E01 + E10 - E11| tested one-sided against the local bound 2.

    ``p`` is the upper Gaussian tail of the signed deviation (S - 2)/sigma, so
    a sample below the bound gets p > 1/2; ``z`` is clipped at zero.
    """
    corr = {}
    for a, b in SETTING_PAIRS:
        corr[a, b] = correlation(counts, a, b)
    raw = corr[0, 0].value + corr[0, 1].value + corr[1, 0].value - corr[1, 1].value
    value = abs(raw)
    sigma = math.sqrt(sum(c.sigma**2 for c in corr.values()))
    excess = value - LOCAL_BOUND
    if sigma > 0:
        deviation = excess / sigma
        return StatWithSigma(value, sigma, z=max(0.0, deviation), p=p_one_tailed(deviation))
    if excess > 0:
        return StatWithSigma(value, 0.0, z=math.inf, p=0.0, degenerate=True)
    return StatWithSigma(value, 0.0, z=0.0, p=0.5 if excess == 0 else 1.0)


def _difference(first: StatWithSigma, second: StatWithSigma) -> StatWithSigma:
    value = first.value - second.value
    sigma = math.hypot(first.sigma, second.sigma)
    if sigma > 0:
        z = abs(value) / sigma
        return StatWithSigma(value, sigma, z=z, p=p_two_tailed(z))
    if value == 0:
        return StatWithSigma(value, 0.0, z=0.0, p=1.0)
    return StatWithSigma(value, 0.0, z=math.inf, p=0.0, degenerate=True)


@dataclass(frozen=True, slots=True)
class NoSignalSet:
    """The four signalling statistics, each tested two-sided against zero."""

    ab0: StatWithSigma
    ab1: StatWithSigma
    ba0: StatWithSigma
    ba1: StatWithSigma

    def as_tuple(self) -> tuple:
        return (self.ab0, self.ab1, self.ba0, self.ba1)

    def labeled(self) -> dict:
        return dict(zip(NOSIG_LABELS, self.as_tuple()))


def nosignal(counts: CountsTable) -> NoSignalSet:
    for a, b in SETTING_PAIRS:
        _nonempty_quad(counts, a, b)
    pa = {ab: marginal_A(counts, 1, *ab) for ab in SETTING_PAIRS}
    pb = {ab: marginal_B(counts, 1, *ab) for ab in SETTING_PAIRS}
    return NoSignalSet(
        ab0=_difference(pb[0, 0], pb[1, 0]),
        ab1=_difference(pb[0, 1], pb[1, 1]),
        ba0=_difference(pa[0, 0], pa[0, 1]),
        ba1=_difference(pa[1, 0], pa[1, 1]),
    )


def chi2_sf_dof4(chi2: float) -> float:
    """Upper tail of the chi-square distribution with four degrees of freedom."""
    if chi2 < 0:
        raise ValueError(f"chi2 must be non-negative, got {chi2}")
    half = 0.5 * chi2
    return min(1.0, math.exp(-half) * (1.0 + half))


class Chi2Result(NamedTuple):
    chi2: float
    dof: int
    p: float


def chi2_nosignal(ns: Union[NoSignalSet, float]) -> Chi2Result:
    """Sum of squared z over the four signalling statistics, four dof.

    A bare number is taken as an already-computed chi-square.
    """
    if isinstance(ns, NoSignalSet):
        stats = ns.as_tuple()
        if any(s.sigma <= 0 for s in stats):
            raise DegenerateStatisticError("chi-square needs every signalling sigma > 0")
        chi2 = math.fsum((s.value / s.sigma) ** 2 for s in stats)
    else:
        chi2 = float(ns)
    return Chi2Result(chi2, 4, chi2_sf_dof4(chi2))


def binomial_sf(k: int, n: int, p: float) -> float:
    """P(X >= k) for X ~ Binomial(n, p).

    Sums the probability mass term by term starting at k (or below k for the
    complement, whichever side is the tail) with compensated summation. Terms
    come from a ratio recurrence anchored at one log-gamma evaluation.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 < p < 1.0:
        if p == 1.0:
            return 1.0 if k <= n else 0.0
        if p == 0.0:
            return 1.0 if k <= 0 else 0.0
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    q = 1.0 - p
    log_p, log_q = math.log(p), math.log(q)

    def log_pmf(j):
        return (math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
                + j * log_p + (n - j) * log_q)

    upper = k > n * p
    start = k if upper else k - 1
    terms = [1.0]
    rel = 1.0
    j = start
    if upper:
        odds = p / q
        while j < n:
            rel *= (n - j) / (j + 1) * odds
            j += 1
            terms.append(rel)
            if rel < 1e-20 * terms[0]:
                break
    else:
        odds = q / p
        while j > 0:
            rel *= j / (n - j + 1) * odds
            j -= 1
            terms.append(rel)
            if rel < 1e-20 * terms[0]:
                break
    tail = math.exp(log_pmf(start)) * math.fsum(terms)
    if upper:
        return min(1.0, tail)
    return min(1.0, max(0.0, 1.0 - tail))


def chsh_wins(counts: CountsTable) -> int:
    """Trials won in the CHSH game: x*y = +1 except on (1, 1), where x*y = -1."""
    wins = 0
    for a, b in SETTING_PAIRS:
        npp, npm, nmp, nmm = counts.quad(a, b)
        wins += (npm + nmp) if (a, b) == (1, 1) else (npp + nmm)
    return wins


def binomial_tail_pvalue(n: int, k: int) -> float:
    """P(Binomial(n, 3/4) >= k): the largest win tail a local model can reach."""
    if n <= 0:
        raise ValueError("binomial tail needs at least one trial")
    return binomial_sf(k, n, CHSH_WIN_PROBABILITY)


def p_chsh_binomial(counts: CountsTable) -> float:
    for a, b in SETTING_PAIRS:
        _nonempty_quad(counts, a, b)
    return binomial_tail_pvalue(counts.grand_total, chsh_wins(counts))


def pooled_two_proportion_z(x1: int, n1: int, x2: int, n2: int) -> StatWithSigma:
    if n1 <= 0 or n2 <= 0:
        raise ValueError("both sample sizes must be positive")
    p1, p2 = x1 / n1, x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    sigma = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    value = p1 - p2
    if sigma == 0:
        # pooled proportion 0 or 1 forces p1 == p2
        return StatWithSigma(value, 0.0, z=0.0, p=1.0)
    z = abs(value) / sigma
    return StatWithSigma(value, sigma, z=z, p=p_two_tailed(z))
