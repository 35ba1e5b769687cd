"""Deterministic 64-bit linear congruential generator.

Randomised sweeps must give byte-identical reports on every platform, so we
do not use :mod:`random`.  The recurrence is Knuth's MMIX generator::

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

and every draw uses the top 32 bits of the new state.  The initial state is
the seed itself, reduced modulo ``2**64``.
"""

from __future__ import annotations

from fractions import Fraction

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MODULUS = 1 << 64


class LCG:
    def __init__(self, seed: int = 0):
        self.state = seed % MODULUS

    def next32(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) % MODULUS
        return self.state >> 32

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in ``[lo, hi]`` (modulo bias is irrelevant here)."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next32() % (hi - lo + 1)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def fraction(self, bound: int = 5, max_den: int = 4) -> Fraction:
        """Rational ``a/b`` with ``|a| <= bound`` and ``1 <= b <= max_den``."""
        return Fraction(self.randint(-bound, bound), self.randint(1, max_den))

    def fork(self, label: str) -> "LCG":
        """Independent stream derived from this one and a text label."""
        h = 0
        for ch in label.encode():
            h = (h * 131 + ch) % MODULUS
        return LCG(self.state ^ h)
