"""Deterministic random streams shared by every simulation backend.

The reference engine runs in pure Python, the hot kernels run either as
compiled numba code or as the same code interpreted. All three must see
bit-identical draws so that a run is reproducible no matter which backend
executed it. numpy's generators cannot be stepped identically from inside a
compiled kernel, so the package carries its own small generator:

* core generator: xorshift128 over four 32-bit words (shifts and xors only,
  safe in signed 64-bit arithmetic, so the compiled and interpreted kernels
  produce the same values),
* seeding and per-trial derivation: a splitmix64-style mixer kept in pure
  Python where 64-bit multiplication is exact.

Batch runs derive one independent stream per trial: trial ``i`` of a batch
with base seed ``s`` uses ``trial_seed(s, i)``, which is splitmix64 output
``i + 1`` of the sequence started at ``s``. Uniform draws over a set of
states always index the candidates in ascending state order.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "MASK32",
    "MASK64",
    "trial_seed",
    "seed_words",
    "state_rows",
    "RandomStream",
]

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def _mix64(value: int) -> int:
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Seed for one trial of a batch started at ``base_seed``."""
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    acc = (base_seed + (trial_index + 1) * _GAMMA) & MASK64
    return _mix64(acc)


def seed_words(seed: int) -> tuple[int, int, int, int]:
    """Expand a seed into the four 32-bit xorshift words (never all zero)."""
    a = _mix64((seed + _GAMMA) & MASK64)
    b = _mix64((seed + 2 * _GAMMA) & MASK64)
    words = (a & MASK32, (a >> 32) & MASK32, b & MASK32, (b >> 32) & MASK32)
    if not any(words):
        words = (1, 0, 0, 0)
    return words


def state_rows(seeds: list[int]) -> np.ndarray:
    """Stack xorshift word rows for a batch of seeds, kernel-ready."""
    rows = np.empty((len(seeds), 4), dtype=np.int64)
    for i, seed in enumerate(seeds):
        rows[i] = seed_words(seed)
    return rows


class RandomStream:
    """xorshift128 over Python ints; the reference for all backends."""

    __slots__ = ("_w0", "_w1", "_w2", "_w3")

    def __init__(self, seed: int) -> None:
        self._w0, self._w1, self._w2, self._w3 = seed_words(seed)

    def next_u32(self) -> int:
        t = (self._w0 ^ ((self._w0 << 11) & MASK32)) & MASK32
        self._w0 = self._w1
        self._w1 = self._w2
        self._w2 = self._w3
        w = self._w3
        self._w3 = (w ^ (w >> 19)) ^ (t ^ (t >> 8))
        return self._w3

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound).

        Uses rejection sampling so the distribution is exact. A bound of 1
        consumes nothing from the stream; every backend follows the same
        convention.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        lim = (1 << 32) // bound * bound
        while True:
            v = self.next_u32()
            if v < lim:
                return v % bound
