"""Deterministic pseudo-random numbers with pinned, documented constants.

Reproducibility across platforms and processes is a hard requirement for the
benchmark harness: the same seed must yield bit-identical splits, weights, and
bootstrap draws everywhere. Python's random module and numpy's Generator do
not promise cross-version stability, so the two generators used throughout the
package are spelled out here in full.

splitmix64 (Steele/Lea/Flood mixer), used for seeding and stable hashing:

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z = (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output = z XOR (z >> 31)

xoshiro256** (Blackman/Vigna), the workhorse stream. State s[0..3] is seeded
with four consecutive splitmix64 outputs. One step:

    result = rotl(s[1] * 5, 7) * 9            mod 2^64
    t = s[1] << 17                            mod 2^64
    s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2]; s[0] ^= s[3]
    s[2] ^= t; s[3] = rotl(s[3], 45)

All arithmetic is modulo 2^64. Floats take the top 53 bits of a step, giving
uniforms in [0, 1). Gaussians use Box-Muller on two uniforms. Shuffles are
Fisher-Yates with indices drawn by modulo reduction (the bias is far below
anything observable at the sizes used here, and the draws stay pinned).
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# FNV-1a 64-bit constants, used for hashing strings into seed material.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; return (new_state, output)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(master: int, *parts: str | int) -> int:
    """Stable 64-bit seed derived from a master seed and a label path.

    Each part is absorbed through one splitmix64 step after being hashed
    (strings via FNV-1a on UTF-8 bytes; ints taken modulo 2^64), so
    derive_seed(s, "a", "b") differs from derive_seed(s, "ab") and the result
    depends only on the values passed, never on platform or process state.
    """
    _, h = splitmix64_next(master & _MASK64)
    for part in parts:
        if isinstance(part, str):
            token = _fnv1a64(part.encode("utf-8"))
        else:
            token = part & _MASK64
        _, h = splitmix64_next(h ^ token)
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** stream seeded through splitmix64.

    The all-zero state cannot occur: splitmix64 outputs for any seed are never
    all zero across four consecutive draws.
    """

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64_next(state)
            s.append(out)
        self._s = s
        self._gauss_cache: float | None = None

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randbelow(self, n: int) -> int:
        """Integer in [0, n) by modulo reduction."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (descending index sweep)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n) via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError("sample_indices requires 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def gauss(self) -> float:
        """Standard normal via Box-Muller; caches the paired draw."""
        if self._gauss_cache is not None:
            value = self._gauss_cache
            self._gauss_cache = None
            return value
        u1 = self.random()
        while u1 == 0.0:
            u1 = self.random()
        u2 = self.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._gauss_cache = radius * math.sin(theta)
        return radius * math.cos(theta)

    def gauss_vector(self, n: int) -> list[float]:
        return [self.gauss() for _ in range(n)]
