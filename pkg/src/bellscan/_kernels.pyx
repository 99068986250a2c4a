# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: grid counting for sample-space scans and the event generator.

Must stay bit-for-bit interchangeable with ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, log1p
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

BACKEND = "cython"


def select_mask(const int64_t[:] click_lo, const int64_t[:] click_hi,
                const int64_t[:] clean, int64_t lower, int64_t stop,
                int64_t threshold):
    cdef Py_ssize_t n = click_lo.shape[0], i
    out = np.zeros(n, dtype=np.bool_)
    cdef cnp.npy_bool[:] mask = out
    with nogil:
        for i in range(n):
            mask[i] = (click_lo[i] >= lower and click_hi[i] <= stop
                       and clean[i] >= threshold)
    return out


def count_grid(const int64_t[:] click_lo, const int64_t[:] click_hi,
               const int64_t[:] clean, const int64_t[:] code,
               const int64_t[:] lowers, int64_t stop,
               const int64_t[:] thresholds):
    """Counts table for every (lower bound, threshold) pair, shape (L, T, 16)."""
    cdef Py_ssize_t n = click_lo.shape[0]
    cdef Py_ssize_t nl = lowers.shape[0], nt = thresholds.shape[0]
    cdef Py_ssize_t i, li, ti
    cdef int64_t lo, cl, c
    out = np.zeros((nl, nt, 16), dtype=np.int64)
    cdef int64_t[:, :, ::1] grid = out
    with nogil:
        for i in range(n):
            if click_hi[i] > stop:
                continue
            lo = click_lo[i]
            cl = clean[i]
            c = code[i]
            for li in range(nl):
                if lo < lowers[li]:
                    continue
                for ti in range(nt):
                    if cl >= thresholds[ti]:
                        grid[li, ti, c] += 1
    return out


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef struct Xoshiro:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t _next(Xoshiro* st) nogil:
    cdef uint64_t result = _rotl(st.s1 * 5, 7) * 9
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef inline double _uniform(Xoshiro* st) nogil:
    return <double>(_next(st) >> 11) * (1.0 / 9007199254740992.0)


cdef inline uint64_t _splitmix(uint64_t* x) nogil:
    x[0] += 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = x[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def raw_stream(uint64_t seed, Py_ssize_t count):
    """First ``count`` raw 64-bit outputs for ``seed`` (compatibility checks)."""
    cdef Xoshiro st
    cdef uint64_t sm = seed
    st.s0 = _splitmix(&sm)
    st.s1 = _splitmix(&sm)
    st.s2 = _splitmix(&sm)
    st.s3 = _splitmix(&sm)
    return [_next(&st) for _ in range(count)]


cdef inline int64_t _click(Xoshiro* st, double origin, double tau) nogil:
    return <int64_t>floor(origin - tau * log1p(-_uniform(st)))


def synth_fill(uint64_t seed, Py_ssize_t n, double w_ref,
               double tau_nv, double tau_ref, double lead,
               double log_clean, int64_t clean_fixed,
               const double[:] p_same, const double[:] p_plus_contaminated,
               int64_t ceiling):
    """Generate ``n`` candidate events; see ``_kernels_py.synth_fill``."""
    cdef Xoshiro st
    cdef uint64_t sm = seed
    st.s0 = _splitmix(&sm)
    st.s1 = _splitmix(&sm)
    st.s2 = _splitmix(&sm)
    st.s3 = _splitmix(&sm)

    click1_a = np.empty(n, dtype=np.int64)
    click2_a = np.empty(n, dtype=np.int64)
    clean_a = np.empty(n, dtype=np.int64)
    a_a = np.empty(n, dtype=np.int64)
    b_a = np.empty(n, dtype=np.int64)
    x_a = np.empty(n, dtype=np.int64)
    y_a = np.empty(n, dtype=np.int64)
    cont_a = np.empty(n, dtype=np.bool_)
    cdef int64_t[:] click1 = click1_a, click2 = click2_a, clean = clean_a
    cdef int64_t[:] va = a_a, vb = b_a, vx = x_a, vy = y_a
    cdef cnp.npy_bool[:] cont = cont_a
    cdef Py_ssize_t i
    cdef int64_t a, b, x, y
    cdef bint contaminated
    cdef double u, k

    with nogil:
        for i in range(n):
            a = <int64_t>(_next(&st) >> 63)
            b = <int64_t>(_next(&st) >> 63)
            contaminated = _uniform(&st) < w_ref
            if contaminated:
                click1[i] = _click(&st, lead, tau_ref)
                click2[i] = _click(&st, lead, tau_ref)
            else:
                click1[i] = _click(&st, 0.0, tau_nv)
                click2[i] = _click(&st, 0.0, tau_nv)
            u = _uniform(&st)
            if clean_fixed >= 0:
                clean[i] = clean_fixed
            else:
                k = floor(log1p(-u) / log_clean)
                clean[i] = ceiling if k >= ceiling else <int64_t>k
            x = 1 if (_next(&st) >> 63) == 0 else -1
            u = _uniform(&st)
            if contaminated:
                y = 1 if u < p_plus_contaminated[a] else -1
            else:
                y = x if u < p_same[a * 2 + b] else -x
            va[i] = a
            vb[i] = b
            vx[i] = x
            vy[i] = y
            cont[i] = contaminated
    return click1_a, click2_a, clean_a, a_a, b_a, x_a, y_a, cont_a
