"""Synthetic Bernoulli reward environments with pre-drawn randomness.

Every environment owns a realization seed. Rewards for a run are decided by a
T x K table of uniforms drawn from that seed before any arm is chosen, so two
algorithms run on the same realization face the same luck.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

KINDS = ("stationary", "decaying", "abrupt_change", "depleting_pool")


@dataclass(frozen=True)
class RewardEnvironment:
    kind: str
    means: tuple[float, ...]
    decay: float = 1.0                       # per-round multiplicative decay of every mean
    change_time: int | None = None
    post_means: tuple[float, ...] | None = None
    pools: tuple[int, ...] | None = None     # rewards each arm can still hand out
    seed: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        if not self.means:
            raise ValueError("an environment needs at least one arm")
        if any(not 0.0 <= m <= 1.0 for m in self.means):
            raise ValueError("means must lie in [0, 1]")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        if self.kind == "abrupt_change":
            if self.change_time is None or self.post_means is None:
                raise ValueError("abrupt_change needs change_time and post_means")
            object.__setattr__(self, "post_means", tuple(float(m) for m in self.post_means))
            if len(self.post_means) != self.K or any(not 0.0 <= m <= 1.0 for m in self.post_means):
                raise ValueError("post_means must be K values in [0, 1]")
            if self.change_time < 0:
                raise ValueError("change_time must be non-negative")
        if self.kind == "depleting_pool":
            if self.pools is None or len(self.pools) != self.K or any(p < 0 for p in self.pools):
                raise ValueError("depleting_pool needs K non-negative pool sizes")
            object.__setattr__(self, "pools", tuple(int(p) for p in self.pools))
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @property
    def K(self) -> int:
        return len(self.means)

    def with_seed(self, seed: int) -> "RewardEnvironment":
        return dataclasses.replace(self, seed=int(seed))

    def mean_table(self, T: int) -> np.ndarray:
        """T x K matrix of per-round success probabilities (pools ignored)."""
        base = np.broadcast_to(np.asarray(self.means), (T, self.K)).copy()
        if self.kind == "decaying" and self.decay < 1.0:
            base *= (self.decay ** np.arange(T))[:, None]
        elif self.kind == "abrupt_change":
            base[self.change_time:] = self.post_means
        return base

    def uniforms(self, T: int) -> np.ndarray:
        return np.random.default_rng(self.seed).random((T, self.K))


def stationary(means, seed: int = 0, name: str = "") -> RewardEnvironment:
    return RewardEnvironment("stationary", tuple(means), seed=seed, name=name)


def decaying(means, rate: float, seed: int = 0, name: str = "") -> RewardEnvironment:
    return RewardEnvironment("decaying", tuple(means), decay=rate, seed=seed, name=name)


def abrupt_change(means, post_means, change_time: int, seed: int = 0, name: str = "") -> RewardEnvironment:
    return RewardEnvironment(
        "abrupt_change", tuple(means), change_time=change_time, post_means=tuple(post_means), seed=seed, name=name
    )


def depleting_pool(
    means, T: int, divisor: float = 10.0, pools=None, seed: int = 0, name: str = ""
) -> RewardEnvironment:
    """Arm k pays with probability means[k] until it has paid pools[k] times.

    Pools default to ceil(means[k] * T / divisor).
    """
    if pools is None:
        pools = tuple(math.ceil(m * T / divisor) for m in means)
    return RewardEnvironment("depleting_pool", tuple(means), pools=tuple(pools), seed=seed, name=name)


def depleting_pool_suite(T: int = 50_000, divisor: float = 3.0, seed: int = 0) -> list[RewardEnvironment]:
    """Three 8-arm depleting-pool environments: sparse, graded and one strong arm."""
    specs = {
        "pool_sparse": (0.02, 0.05, 0.01, 0.08, 0.03, 0.005, 0.04, 0.06),
        "pool_graded": (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),
        "pool_onestrong": (0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.5),
    }
    return [depleting_pool(m, T, divisor, seed=seed + i, name=n) for i, (n, m) in enumerate(specs.items())]


def environment_suite(kind: str, T: int, seed: int = 0) -> list[RewardEnvironment]:
    """Standard 8-arm environments for one kind, or for every kind with ``"all"``."""
    graded = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
    close = (0.40, 0.42, 0.44, 0.46, 0.48, 0.50, 0.52, 0.55)
    if kind == "stationary":
        return [stationary(graded, seed, "stationary_graded"), stationary(close, seed + 1, "stationary_close")]
    if kind == "decaying":
        rate = 0.01 ** (1.0 / max(T, 1))   # means shrink 100-fold over the horizon
        return [decaying(graded, rate, seed, "decaying_graded"), decaying(close, rate, seed + 1, "decaying_close")]
    if kind == "abrupt_change":
        return [
            abrupt_change(graded, graded[::-1], T // 2, seed, "abrupt_reversed"),
            abrupt_change(close, close[1:] + close[:1], T // 3, seed + 1, "abrupt_rotated"),
        ]
    if kind == "depleting_pool":
        return depleting_pool_suite(T, seed=seed)
    if kind == "all":
        return [e for k in KINDS for e in environment_suite(k, T, seed)]
    raise ValueError(f"unknown environment kind {kind!r}")
