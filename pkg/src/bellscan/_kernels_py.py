"""Fallback kernels used when the compiled extension is unavailable.

Output is identical to the compiled module for every input; only speed differs.
"""

import math

import numpy as np

BACKEND = "python"

_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def select_mask(click_lo, click_hi, clean, lower, stop, threshold):
    return (click_lo >= lower) & (click_hi <= stop) & (clean >= threshold)


def count_grid(click_lo, click_hi, clean, code, lowers, stop, thresholds):
    out = np.zeros((len(lowers), len(thresholds), 16), dtype=np.int64)
    in_stop = click_hi <= stop
    for li, lower in enumerate(lowers):
        window = in_stop & (click_lo >= lower)
        for ti, threshold in enumerate(thresholds):
            picked = code[window & (clean >= threshold)]
            out[li, ti] = np.bincount(picked, minlength=16)
    return out


class Xoshiro256:
    """xoshiro256** seeded through splitmix64, in plain integers."""

    __slots__ = ("s",)

    def __init__(self, seed):
        sm = seed & _MASK64
        state = []
        for _ in range(4):
            sm = (sm + 0x9E3779B97F4A7C15) & _MASK64
            z = sm
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
            state.append(z ^ (z >> 31))
        self.s = state

    def next(self):
        s0, s1, s2, s3 = self.s
        r = (s1 * 5) & _MASK64
        result = ((((r << 7) | (r >> 57)) & _MASK64) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self):
        return (self.next() >> 11) * _INV_2_53


def raw_stream(seed, count):
    rng = Xoshiro256(seed)
    return [rng.next() for _ in range(count)]


def synth_fill(seed, n, w_ref, tau_nv, tau_ref, lead, log_clean, clean_fixed,
               p_same, p_plus_contaminated, ceiling):
    """Generate ``n`` candidate events as column arrays.

    Eight draws per event, always in this order: setting a, setting b, class,
    click 1, click 2, clean-run length, outcome x, outcome y. ``clean_fixed``
    >= 0 replaces the geometric draw (its uniform is still consumed).
    """
    rng = Xoshiro256(seed)
    nxt, uni = rng.next, rng.uniform
    log1p, floor = math.log1p, math.floor
    p_same = [float(v) for v in p_same]
    p_plus = [float(v) for v in p_plus_contaminated]
    cols = [[0] * n for _ in range(7)]
    click1, click2, clean, va, vb, vx, vy = cols
    cont = [False] * n
    for i in range(n):
        a = nxt() >> 63
        b = nxt() >> 63
        contaminated = uni() < w_ref
        if contaminated:
            origin, tau = lead, tau_ref
        else:
            origin, tau = 0.0, tau_nv
        click1[i] = floor(origin - tau * log1p(-uni()))
        click2[i] = floor(origin - tau * log1p(-uni()))
        u = uni()
        if clean_fixed >= 0:
            clean[i] = clean_fixed
        else:
            k = floor(log1p(-u) / log_clean)
            clean[i] = ceiling if k >= ceiling else k
        x = 1 if (nxt() >> 63) == 0 else -1
        u = uni()
        if contaminated:
            y = 1 if u < p_plus[a] else -1
        else:
            y = x if u < p_same[a * 2 + b] else -x
        va[i], vb[i], vx[i], vy[i] = a, b, x, y
        cont[i] = contaminated
    arrays = tuple(np.asarray(c, dtype=np.int64) for c in cols)
    return arrays + (np.asarray(cont, dtype=np.bool_),)
