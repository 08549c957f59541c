# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled round loop. Must stay draw-for-draw identical to _fallback.py."""

from libc.math cimport cos, expm1, sqrt
from libc.stdint cimport uint64_t

cdef double PI = 3.141592653589793
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline uint64_t draw(uint64_t key, uint64_t i, uint64_t slot) noexcept nogil:
    return mix64(key + (16 * i + slot + 1) * GAMMA)


cdef inline double unit(uint64_t x) noexcept nogil:
    return <double>(x >> 11) * INV_2_53


def run_block(uint64_t key, uint64_t start, uint64_t stop, int mode,
              double phi0, double phi1, long d,
              double A, double B, double p_d, double e_d):
    """Simulate rounds [start, stop) and return
    (n_success, n_sifted, n_errors, n_left, n_right, n_double, n_none)."""
    cdef long long n_success = 0, n_sifted = 0, n_errors = 0
    cdef long long n_left = 0, n_right = 0, n_double = 0, n_none = 0
    cdef uint64_t i
    cdef int ka, kb, ca, cb, kbf, opt_l, opt_r, tmp, click_l, click_r, keep
    cdef long ja, jb, m
    cdef double angle, c, s, tot, il, ir
    cdef double phis[2]
    phis[0] = phi0
    phis[1] = phi1
    s = 2.0 * sqrt(A * B)
    tot = A + B

    with nogil:
        for i in range(start, stop):
            ka = <int>(draw(key, i, 0) >> 63)
            kb = <int>(draw(key, i, 1) >> 63)
            if mode == 0:
                ca = <int>(draw(key, i, 2) >> 63)
                cb = <int>(draw(key, i, 3) >> 63)
                angle = (phis[ca] - phis[cb]) + PI * (ka - kb)
                m = 0
            else:
                ja = <long>(unit(draw(key, i, 2)) * d)
                jb = <long>(unit(draw(key, i, 3)) * d)
                m = (ja - jb) % d
                if m < 0:
                    m += d
                angle = (TWO_PI * m) / d + PI * (ka - kb)
            c = cos(angle)
            il = 0.5 * (tot + s * c)
            ir = 0.5 * (tot - s * c)
            if il < 0.0:
                il = 0.0
            if ir < 0.0:
                ir = 0.0
            opt_l = unit(draw(key, i, 4)) < -expm1(-il)
            opt_r = unit(draw(key, i, 5)) < -expm1(-ir)
            if unit(draw(key, i, 6)) < e_d:
                tmp = opt_l
                opt_l = opt_r
                opt_r = tmp
            click_l = opt_l or (unit(draw(key, i, 7)) < p_d)
            click_r = opt_r or (unit(draw(key, i, 8)) < p_d)

            if click_l and click_r:
                n_double += 1
                continue
            if not (click_l or click_r):
                n_none += 1
                continue
            n_success += 1
            if click_l:
                n_left += 1
                kbf = kb
            else:
                n_right += 1
                kbf = 1 - kb
            if mode == 0:
                keep = ca == cb
            else:
                keep = m == 0 or (d % 2 == 0 and 2 * m == d)
                if keep and m != 0:
                    kbf = 1 - kbf
            if keep:
                n_sifted += 1
                if kbf != ka:
                    n_errors += 1

    return (n_success, n_sifted, n_errors, n_left, n_right, n_double, n_none)
