"""Counter-based SplitMix64 streams with unbiased bounded draws.

Every stochastic routine in the package draws from :class:`SplitMix64`.
The generator has a single 64-bit state; output ``i`` (1-based) of a stream
seeded with ``s`` is ``mix64(s + i * GOLDEN)``, so a batch of outputs is a
vectorised hash of a counter range.  Bounded integers use rejection against
the largest multiple of the bound below 2**64, which keeps them exactly
uniform.

Monte Carlo trial ``t`` of an experiment seeded with ``s`` uses the
independent stream ``SplitMix64(trial_seed(s, t))``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
# tweak separating trial sub-seeds from the base stream
_TRIAL_TWEAK = 0xD1B54A32D192ED03

_BATCH = 1 << 16


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def trial_seed(seed: int, trial: int) -> int:
    """Sub-seed for trial ``trial`` of a run seeded with ``seed``."""
    return mix64((seed & MASK64) ^ mix64((trial * _TRIAL_TWEAK + GOLDEN) & MASK64))


class SplitMix64:
    """64-bit-state generator; ``state`` advances by ``GOLDEN`` per output."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be nonnegative")
        counters = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + counters * np.uint64(GOLDEN)
            out = _mix64_vec(z)
        self.state = (self.state + n * GOLDEN) & MASK64
        return out

    def integers(self, bound: int, n: int) -> np.ndarray:
        """``n`` i.i.d. uniform integers in ``[0, bound)`` as int64."""
        if not 1 <= bound <= 1 << 63:
            raise ValueError(f"bound must lie in [1, 2**63], got {bound}")
        if bound == 1:
            return np.zeros(n, dtype=np.int64)
        limit = (1 << 64) - ((1 << 64) % bound)
        parts = []
        have = 0
        while have < n:
            # small overdraw so one pass almost always suffices
            want = n - have
            raw = self.next_u64(want + (want >> 6) + 8 if limit != 1 << 64 else want)
            if limit != 1 << 64:
                raw = raw[raw < np.uint64(limit)]
            raw = raw[:want]
            parts.append((raw % np.uint64(bound)).astype(np.int64))
            have += raw.size
        if not parts:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(parts)

    def bytes(self, n: int) -> bytes:
        words = self.next_u64((n + 7) // 8)
        return words.astype("<u8").tobytes()[:n]


def draw_indices(M: int, N: int, seed: int) -> np.ndarray:
    """Indices of ``N`` draws with replacement from ``range(M)``."""
    return SplitMix64(seed).integers(M, N)
