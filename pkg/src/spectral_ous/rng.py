"""Seeded random streams.

The generator is Marsaglia's xorshift shift register with Vigna's
multiplicative scrambling (xorshift64*, shifts 12/25/27, multiplier
0x2545F4914F6CDD1D). Per-trial substreams are seeded with
``seed XOR splitmix64(trial_index)`` so that every trial can be replayed in
isolation and trials can be scheduled in any order.
"""

import math

import numpy as np

from .kernels import xorshift_fill

MASK64 = (1 << 64) - 1
_ZERO_STATE_REPLACEMENT = 0x9E3779B97F4A7C15


def splitmix64(x):
    """One round of the splitmix64 finalizer, used as the trial-index hash."""
    z = (int(x) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class ShiftRegisterRNG:
    """xorshift64* stream with the few draws the harness needs."""

    def __init__(self, seed):
        state = int(seed) & MASK64
        self._state = state if state else _ZERO_STATE_REPLACEMENT
        self.seed = int(seed) & MASK64

    @classmethod
    def for_trial(cls, seed, trial_index):
        return cls((int(seed) & MASK64) ^ splitmix64(trial_index))

    def uniform(self, size=None, low=0.0, high=1.0):
        n = 1 if size is None else int(np.prod(size))
        out = np.empty(n, dtype=np.float64)
        self._state = xorshift_fill(self._state, out)
        out = low + (high - low) * out
        if size is None:
            return float(out[0])
        return out.reshape(size)

    def normal(self, size=None):
        """Standard normals by Box-Muller."""
        n = 1 if size is None else int(np.prod(size))
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[:m]))
        th = 2.0 * math.pi * u[m:]
        z = np.concatenate([r * np.cos(th), r * np.sin(th)])[:n]
        if size is None:
            return float(z[0])
        return z.reshape(size)

    def integers(self, low, high):
        """Uniform integer in ``[low, high)``."""
        return low + min(int(self.uniform() * (high - low)), high - low - 1)

    def choice(self, seq):
        return seq[self.integers(0, len(seq))]

    def symmetric_gaussian(self, n):
        """Symmetrized standard-Gaussian ``n x n`` matrix."""
        g = self.normal((n, n))
        return 0.5 * (g + g.T)

    def orthonormal_frame(self, n):
        q, r = np.linalg.qr(self.normal((n, n)))
        return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
