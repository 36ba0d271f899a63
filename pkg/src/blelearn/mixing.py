"""Deterministic 64-bit mixing, used in two places:

- the toy legacy-pairing key schedule (confirm values, session keys);
- the counter-based noise PRNG of the lossy channel.

splitmix64 is a published, well-studied finalizer. It is emphatically
not cryptography and nothing here pretends otherwise.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix(*parts: int) -> int:
    """Fold any number of 64-bit words into one mixed word."""
    acc = 0x243F6A8885A308D3  # pi, nothing up the sleeve
    for p in parts:
        acc = splitmix64(acc ^ (p & MASK64))
    return acc


def unit_draw(*parts: int) -> float:
    """Uniform draw in [0, 1) keyed entirely by the given words."""
    return mix(*parts) / float(1 << 64)
