"""Counter-based random stream shared by every simulation backend.

Draw ``j`` of round ``i`` is ``splitmix64(key + (16*i + j + 1) * GAMMA)``, so
any round can be reproduced without touching the others, and the compiled
kernel, the numpy path and the scalar reference all see the same numbers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
DRAWS_PER_ROUND = 16
INV_2_53 = 1.0 / 9007199254740992.0

# slot layout inside a round
K_A, K_B, CHOICE_A, CHOICE_B, OPT_L, OPT_R, SWAP, DARK_L, DARK_R = range(9)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int) -> int:
    return mix64(seed & MASK64)


def draw(key: int, round_index: int, slot: int) -> int:
    return mix64(key + ((DRAWS_PER_ROUND * round_index + slot + 1) * GAMMA))


def to_unit(x: int) -> float:
    """Top 53 bits as a double in [0, 1)."""
    return (x >> 11) * INV_2_53


def to_bit(x: int) -> int:
    return x >> 63


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def draws_np(key: int, rounds: np.ndarray, slot: int) -> np.ndarray:
    """Vectorised ``draw`` over an array of round indices (uint64)."""
    offs = rounds * np.uint64(DRAWS_PER_ROUND) + np.uint64(slot + 1)
    return _mix64_np(np.uint64(key) + offs * np.uint64(GAMMA))


def unit_np(x: np.ndarray) -> np.ndarray:
    return (x >> np.uint64(11)).astype(np.float64) * INV_2_53


def bit_np(x: np.ndarray) -> np.ndarray:
    return (x >> np.uint64(63)).astype(np.int64)
