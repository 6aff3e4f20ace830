"""Counter-based 64-bit generator.

Word ``i`` of stream ``s`` under seed ``seed`` is::

    key  = mix64(seed ^ mix64(s + GOLDEN))
    word = mix64(key + (i + 1) * GOLDEN  mod 2**64)

where ``mix64`` is the SplitMix64 finalizer.  There is no hidden state, so any
word can be produced independently of every other one, on any platform.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class CounterRNG:
    __slots__ = ("seed", "stream", "key", "counter")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed & MASK64
        self.stream = stream & MASK64
        self.key = mix64(self.seed ^ mix64(self.stream + GOLDEN))
        self.counter = 0

    def word(self, i: int) -> int:
        return mix64(self.key + (i + 1) * GOLDEN)

    def next64(self) -> int:
        v = self.word(self.counter)
        self.counter += 1
        return v

    def bits(self, count: int) -> int:
        """``count`` fair bits, little-endian across consecutive words."""
        out = 0
        for j in range((count + 63) // 64):
            out |= self.next64() << (64 * j)
        return out & ((1 << count) - 1)

    def below(self, m: int) -> int:
        """Integer in ``[0, m)`` by multiply-shift (bias below ``m / 2**64``)."""
        if m <= 0:
            raise ValueError("m must be positive")
        return (self.next64() * m) >> 64

    def random(self) -> float:
        return (self.next64() >> 11) * 2.0**-53


def random_window(seed: int, stream: int, n: int) -> int:
    """Bits of a uniform subset of ``[0, n]``: each element kept with probability 1/2."""
    return CounterRNG(seed, stream).bits(n + 1)
