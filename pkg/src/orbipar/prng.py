"""Deterministic seeded generator (splitmix64).

Scenario files and randomized suites draw exclusively from this generator so
that reports are byte-identical across runs and Python versions.  splitmix64
is the standard 64-bit mixer; bounded draws use rejection sampling, so the
stream of accepted values depends only on the seed.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform draw from [0, n) by rejection."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def fork(self) -> "SplitMix64":
        """Independent child stream, deterministically derived."""
        return SplitMix64(self.next_u64())
