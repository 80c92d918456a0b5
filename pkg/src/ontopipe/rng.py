"""SplitMix64 generator and the Fisher-Yates shuffle built on it.

The evaluation protocol needs a shuffle that is reproducible bit-for-bit from a
64-bit seed, independent of Python's hash randomization or numpy version.
SplitMix64 (Steele, Lea, Flood 2014) with the standard constants:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic mod 2**64.
"""

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic 64-bit generator; `next_u64` and bounded `next_below`."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound


def fisher_yates(items: list, seed: int) -> list:
    """Return a new list holding `items` shuffled by SplitMix64(seed).

    Classic downward Fisher-Yates: for i = n-1 .. 1 swap i with
    next_u64() % (i + 1). The modulo bias is irrelevant at the sizes used here
    and keeps the procedure trivial to re-implement elsewhere.
    """
    out = list(items)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
