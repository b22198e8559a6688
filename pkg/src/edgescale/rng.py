"""Seeded portable PRNG used everywhere the simulator draws randomness.

SplitMix64 (Steele, Lea & Flood; public-domain reference by Vigna) is used
instead of a platform RNG so that identical seeds reproduce identical runs
on any implementation of the algorithm. Reference outputs are pinned in the
test suite.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """64-bit SplitMix64 stream; state advances by the golden gamma."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        # Top 53 bits scaled into [0, 1), the standard double conversion.
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()
