"""Numpy implementation of the round loop, used when the extension is not built.

Mirrors _kernel.pyx draw for draw; both must return identical counts.
"""

from __future__ import annotations

import math

import numpy as np

from . import rng

CHUNK = 1 << 18


def _block(key, start, stop, mode, phi0, phi1, d, A, B, p_d, e_d):
    i = np.arange(start, stop, dtype=np.uint64)

    def u(slot):
        return rng.unit_np(rng.draws_np(key, i, slot))

    ka = rng.bit_np(rng.draws_np(key, i, rng.K_A))
    kb = rng.bit_np(rng.draws_np(key, i, rng.K_B))
    dk = (ka - kb).astype(np.float64)
    if mode == 0:
        ca = rng.bit_np(rng.draws_np(key, i, rng.CHOICE_A))
        cb = rng.bit_np(rng.draws_np(key, i, rng.CHOICE_B))
        phis = np.array([phi0, phi1])
        angle = (phis[ca] - phis[cb]) + math.pi * dk
        keep = ca == cb
        sift_flip = np.zeros(len(i), dtype=bool)
    else:
        ja = (u(rng.CHOICE_A) * d).astype(np.int64)
        jb = (u(rng.CHOICE_B) * d).astype(np.int64)
        m = (ja - jb) % d
        angle = (2.0 * math.pi * m.astype(np.float64)) / d + math.pi * dk
        half = (2 * m == d) if d % 2 == 0 else np.zeros(len(i), dtype=bool)
        keep = (m == 0) | half
        sift_flip = half

    c = np.cos(angle)
    s = 2.0 * math.sqrt(A * B)
    il = np.maximum(0.5 * ((A + B) + s * c), 0.0)
    ir = np.maximum(0.5 * ((A + B) - s * c), 0.0)
    opt_l = u(rng.OPT_L) < -np.expm1(-il)
    opt_r = u(rng.OPT_R) < -np.expm1(-ir)
    swap = u(rng.SWAP) < e_d
    opt_l, opt_r = np.where(swap, opt_r, opt_l), np.where(swap, opt_l, opt_r)
    click_l = opt_l | (u(rng.DARK_L) < p_d)
    click_r = opt_r | (u(rng.DARK_R) < p_d)

    left = click_l & ~click_r
    right = click_r & ~click_l
    success = left | right
    kbf = np.where(right, 1 - kb, kb)
    kbf = np.where(sift_flip, 1 - kbf, kbf)
    sifted = success & keep
    errors = sifted & (kbf != ka)
    return (
        int(success.sum()),
        int(sifted.sum()),
        int(errors.sum()),
        int(left.sum()),
        int(right.sum()),
        int((click_l & click_r).sum()),
        int((~click_l & ~click_r).sum()),
    )


def run_block(key, start, stop, mode, phi0, phi1, d, A, B, p_d, e_d):
    totals = [0] * 7
    for lo in range(start, stop, CHUNK):
        part = _block(key, lo, min(lo + CHUNK, stop), mode, phi0, phi1, d, A, B, p_d, e_d)
        totals = [t + p for t, p in zip(totals, part)]
    return tuple(totals)
