"""Seedable random stream shared by bandits, mutators and the fuzz loop."""

from __future__ import annotations

import random
from typing import Any

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finalizer; used to derive child seeds."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class RngStream:
    """Deterministic pseudo-random stream seeded by a 64-bit integer.

    Thin wrapper over :class:`random.Random` (MT19937). The bound methods are
    re-exported as attributes so hot loops can cache them locally.
    """

    __slots__ = ("seed", "_r", "random", "below", "getrandbits", "betavariate")

    def __init__(self, seed: int = 0) -> None:
        self.seed = int(seed) & _MASK64
        self._r = random.Random(self.seed)
        self._bind()

    def _bind(self) -> None:
        r = self._r
        rnd = r.random

        def below(n: int) -> int:
            """Uniform integer in [0, n); n must be in [1, 2**52]."""
            return int(rnd() * n)

        self.random = rnd
        self.below = below
        self.getrandbits = r.getrandbits
        self.betavariate = r.betavariate

    def spawn(self, salt: int) -> "RngStream":
        """Derive an independent child stream from this stream's seed."""
        return RngStream(splitmix64(self.seed ^ splitmix64(int(salt) & _MASK64)))

    def get_state(self) -> dict[str, Any]:
        version, internal, gauss_next = self._r.getstate()
        return {
            "seed": self.seed,
            "version": version,
            "internal": list(internal),
            "gauss_next": gauss_next,
        }

    def set_state(self, state: dict[str, Any]) -> None:
        self.seed = int(state["seed"])
        self._r.setstate(
            (int(state["version"]), tuple(int(v) for v in state["internal"]), state["gauss_next"])
        )

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "RngStream":
        rng = cls(int(state["seed"]))
        rng.set_state(state)
        return rng

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RngStream):
            return NotImplemented
        return self.get_state() == other.get_state()

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"
