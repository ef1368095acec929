"""Deterministic 64-bit PRNG used for trace generation.

The generator is fixed and fully specified here (and in README.md) so
that any reimplementation, in any language, reproduces identical
streams bit for bit.  All state arithmetic is unsigned 64-bit with
wrap-around.

Substream derivation ``mix64(seed, k)`` (SplitMix64 finalizer over a
golden-ratio offset):

    z = (seed + (k + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    z = z ^ (z >> 31)
    if z == 0: z = 0x9E3779B97F4A7C15      # xorshift state must be nonzero

Stream step (xorshift64*), from state ``s``:

    s ^= s >> 12;  s = (s ^ (s << 25)) mod 2^64;  s ^= s >> 27
    output = (s * 0x2545F4914F6CDD1D) mod 2^64

Unit-interval doubles take the top 53 bits:

    u = (output >> 11) * 2.0**-53          # u in [0, 1)
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_STAR = 0x2545F4914F6CDD1D
_INV53 = 2.0**-53


def mix64(seed: int, stream_index: int) -> int:
    """Derive the initial state of substream ``stream_index`` from ``seed``."""
    z = (seed + (stream_index + 1) * GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    z ^= z >> 31
    return z if z != 0 else GOLDEN


class Stream:
    """One xorshift64* substream; ``uniform()`` yields doubles in [0, 1)."""

    __slots__ = ("state",)

    def __init__(self, seed: int, stream_index: int = 0):
        self.state = mix64(seed & _MASK, stream_index)

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK
        s ^= s >> 27
        self.state = s
        return (s * _STAR) & _MASK

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _INV53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + self.uniform() * (hi - lo)
