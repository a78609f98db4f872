"""Run one bandit algorithm against one environment realization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from slopt.bandit import BanditConfig, create_instance
from slopt.rng import RngStream
from slopt.sim.environments import RewardEnvironment


@dataclass
class SimulationTrace:
    arms: np.ndarray             # chosen arm per round
    rewards: np.ndarray          # realised 0/1 reward per round
    best_expected: np.ndarray    # best arm's expected reward at that round
    chosen_expected: np.ndarray  # chosen arm's expected reward at that round

    def __len__(self) -> int:
        return len(self.arms)

    @property
    def total_reward(self) -> int:
        return int(self.rewards.sum())

    @property
    def regret(self) -> np.ndarray:
        return np.cumsum(self.best_expected - self.chosen_expected)


def run_simulation(env: RewardEnvironment, config: BanditConfig, T: int, rng: RngStream | int) -> SimulationTrace:
    if T < 1:
        raise ValueError("T must be at least 1")
    if not isinstance(rng, RngStream):
        rng = RngStream(rng)
    inst = create_instance(config, env.K)
    select = inst.select
    reward = inst.reward
    arms = [0] * T

    if env.kind != "depleting_pool":
        means = env.mean_table(T)
        hits = (env.uniforms(T) < means).tolist()
        rewards = [0] * T
        for t in range(T):
            a = select(rng)
            r = 1 if hits[t][a] else 0
            reward(a, r)
            arms[t] = a
            rewards[t] = r
        arm_arr = np.asarray(arms, dtype=np.int64)
        return SimulationTrace(
            arm_arr,
            np.asarray(rewards, dtype=np.int64),
            means.max(axis=1),
            means[np.arange(T), arm_arr],
        )

    mu = env.means
    pool = list(env.pools)
    live = [m if p > 0 else 0.0 for m, p in zip(mu, pool)]
    best = max(live)
    hits = (env.uniforms(T) < np.asarray(mu)).tolist()
    rewards = [0] * T
    best_exp = [0.0] * T
    chosen_exp = [0.0] * T
    for t in range(T):
        a = select(rng)
        best_exp[t] = best
        chosen_exp[t] = live[a]
        r = 0
        if hits[t][a] and pool[a] > 0:
            r = 1
            pool[a] -= 1
            if pool[a] == 0:
                live[a] = 0.0
                best = max(live)
        reward(a, r)
        arms[t] = a
        rewards[t] = r
    return SimulationTrace(
        np.asarray(arms, dtype=np.int64),
        np.asarray(rewards, dtype=np.int64),
        np.asarray(best_exp),
        np.asarray(chosen_exp),
    )


def cumulative_regret(trace: SimulationTrace, env: RewardEnvironment | None = None) -> np.ndarray:
    """Running sum of (best expected reward - chosen arm's expected reward).

    For environments whose means do not depend on past play, the per-round
    expectations are recomputed from ``env``; pool environments rely on the
    values recorded in the trace.
    """
    if env is None or env.kind == "depleting_pool":
        return trace.regret
    T = len(trace)
    means = env.mean_table(T)
    return np.cumsum(means.max(axis=1) - means[np.arange(T), trace.arms])
