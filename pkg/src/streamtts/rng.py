"""Deterministic seeded random source.

The generator is SplitMix64, frozen for the life of this package so that
data preparation is bit-reproducible across runs, platforms, and language
ports. All arithmetic is 64-bit integer with explicit masking; no float or
platform-dependent behavior is involved in the state update.

Frozen test vectors (first four outputs of ``next_u64``):

    seed 0    -> e220a8397b1dcdaf 6e789e6aa1b965f4 06c45d188009454f f88bb8a8724c81ec
    seed 1234 -> bb0cf61b2f181cdb 97c7a1364df06524 33befae49bc025da 4e6241f252d0a033

The seed-0 sequence matches the widely published SplitMix64 reference
output, so independent implementations can be checked against either.

Independent streams are derived with :func:`derive_seed`, which mixes the
base seed with string keys (e.g. an utterance id) so per-record streams do
not depend on processing order.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix64(z: int) -> int:
    """SplitMix64 output mixing function (variant 13 finalizer)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, used only for seed derivation keys."""
    h = _FNV_OFFSET
    for b in data:
        h = (h ^ b) * _FNV_PRIME & _MASK64
    return h


def derive_seed(seed: int, *keys: str | int) -> int:
    """Derive an independent stream seed from a base seed and string/int keys.

    Definition: fold each key into the state with FNV-1a (ints are rendered
    as decimal strings), applying the SplitMix64 finalizer after every key.
    """
    h = _mix64(seed & _MASK64 ^ _GAMMA)
    for key in keys:
        text = key if isinstance(key, str) else str(key)
        h = _mix64(h ^ fnv1a64(text.encode("utf-8")))
    return h


class SeededRng:
    """SplitMix64 stream. Single-owner; derive new seeds for concurrency."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def random(self) -> float:
        """Float in [0, 1) from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def bernoulli(self, p: float) -> bool:
        """True with probability p. Consumes exactly one draw for any p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of range: {p}")
        return self.random() < p

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (unbiased)."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive: {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n
