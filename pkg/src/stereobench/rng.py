"""Deterministic pseudorandom numbers for reproducible degradation runs.

Counter-based SplitMix64 core: output k of a stream with 64-bit seed s is
``mix64(s + (k+1) * GOLDEN)`` where GOLDEN is the 64-bit golden-ratio
increment 0x9E3779B97F4A7C15 and mix64 is the SplitMix64 finalizer.  Being
counter-based makes draws order-independent of batch size and lets whole
blocks be generated vectorised.

Normal deviates come from the Box-Muller transform

    z0 = sqrt(-2 ln u1) * cos(2 pi u2),   z1 = sqrt(-2 ln u1) * sin(2 pi u2)

with u1 in (0, 1] (so the log never sees zero) and u2 in [0, 1).  Both
uniforms take the top 53 bits of a mixed word.

Substreams: ``derive(*keys)`` folds integer keys into the seed through the
same finalizer, giving statistically independent streams per scene/view
without coordinating counters.  Identical (seed, keys) always reproduce the
identical sequence; this is what run manifests rely on.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_NEG53 = 2.0 ** -53

DEFAULT_SEED = 2024


def _mix64(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """SplitMix64 finalizer; operates elementwise on uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX_A
        z = (z ^ (z >> np.uint64(27))) * _MIX_B
        return z ^ (z >> np.uint64(31))


class Rng:
    """Seedable deterministic generator (SplitMix64 counter + Box-Muller)."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed) & _MASK64
        self._count = 0

    def __repr__(self) -> str:  # pragma: no cover
        return f"Rng(seed={self.seed:#x}, count={self._count})"

    def _raw(self, n: int) -> np.ndarray:
        """Next n raw 64-bit words of the stream."""
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            return _mix64(np.uint64(self.seed) + idx * _GOLDEN)

    def uniform(self, size=None) -> np.ndarray | float:
        """Uniform doubles in [0, 1)."""
        shape = () if size is None else (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        u = (self._raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_NEG53
        return float(u[0]) if shape == () else u.reshape(shape)

    def normal(self, size=None, sigma: float = 1.0) -> np.ndarray | float:
        """Standard-normal deviates via Box-Muller, scaled by sigma."""
        shape = () if size is None else (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        m = (n + 1) // 2
        raw = self._raw(2 * m)
        # u1 in (0,1]: shift the 53-bit draw up by one step so log(u1) is finite
        u1 = ((raw[:m] >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _TWO_NEG53
        u2 = (raw[m:] >> np.uint64(11)).astype(np.float64) * _TWO_NEG53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * np.pi) * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n] * sigma
        return float(z[0]) if shape == () else z.reshape(shape)

    def randint(self, low: int, high: int) -> int:
        """One integer uniform over [low, high). high must exceed low."""
        if high <= low:
            raise ValueError(f"empty range [{low}, {high})")
        return low + int(self.uniform() * (high - low))

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint(0, i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def derive(self, *keys: int) -> "Rng":
        """Independent substream keyed by integers (order matters)."""
        s = np.uint64(self.seed)
        with np.errstate(over="ignore"):
            for k in keys:
                s = _mix64(s ^ _mix64(np.uint64(int(k) & _MASK64) + _GOLDEN))
        return Rng(int(s))
