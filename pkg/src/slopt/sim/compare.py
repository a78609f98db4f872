"""Factorial algorithm x environment sweeps scored the FuzzBench way."""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from slopt.bandit import BanditConfig
from slopt.rng import splitmix64
from slopt.sim.environments import RewardEnvironment
from slopt.sim.simulate import SimulationTrace, run_simulation


@dataclass
class ScoreBoard:
    algorithms: list[str]
    environments: list[str]
    medians: np.ndarray           # [algorithm, environment]
    scores: np.ndarray            # 100 * median / best median in that environment
    ranks: np.ndarray             # 1 = best; ties share the average rank

    @property
    def score_avg(self) -> dict[str, float]:
        return dict(zip(self.algorithms, self.scores.mean(axis=1).tolist()))

    @property
    def rank_avg(self) -> dict[str, float]:
        return dict(zip(self.algorithms, self.ranks.mean(axis=1).tolist()))

    def score(self, algorithm: str, environment: str) -> float:
        return float(self.scores[self.algorithms.index(algorithm), self.environments.index(environment)])


def score_and_rank(medians: Mapping[str, Mapping[str, float]]) -> ScoreBoard:
    """Score and rank per environment, then average over environments.

    ``medians[algorithm][environment]`` is the median terminal performance
    (higher is better). An environment where every median is zero gives
    every algorithm a score of 100.
    """
    algorithms = list(medians)
    if len(algorithms) < 2:
        raise ValueError("need at least two algorithms")
    environments = list(medians[algorithms[0]])
    if not environments:
        raise ValueError("need at least one environment")
    for a in algorithms:
        if set(medians[a]) != set(environments):
            raise ValueError(f"algorithm {a!r} is missing environments")
    m = np.array([[float(medians[a][e]) for e in environments] for a in algorithms])
    best = m.max(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = np.where(best > 0, 100.0 * m / np.where(best > 0, best, 1.0), 100.0)
    ranks = np.column_stack([rankdata(-m[:, j], method="average") for j in range(m.shape[1])])
    return ScoreBoard(algorithms, environments, m, scores, ranks)


@dataclass
class ComparisonResult:
    board: ScoreBoard
    rows: list[dict] = field(default_factory=list)
    traces: dict[tuple[str, str, int], SimulationTrace] = field(default_factory=dict)


def _stable_hash(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def run_comparison(
    environments: Sequence[RewardEnvironment],
    configs: Mapping[str, BanditConfig] | Sequence[BanditConfig],
    runs: int,
    T: int,
    seed_base: int = 0,
    keep_traces: bool = False,
) -> ComparisonResult:
    """Run every (environment, algorithm, run) cell and score the medians.

    Run ``r`` of an environment uses the same reward realization for every
    algorithm. An algorithm's own randomness depends on its label, not on its
    position in ``configs``.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if not isinstance(configs, Mapping):
        configs = {c.algorithm: c for c in configs}
    names = [e.name for e in environments]
    if len(set(names)) != len(names):
        raise ValueError("environment names must be unique")
    totals: dict[str, dict[str, list[int]]] = {a: {e: [] for e in names} for a in configs}
    result = ComparisonResult(board=None)  # type: ignore[arg-type]
    for ei, env in enumerate(environments):
        for r in range(runs):
            real = env.with_seed(splitmix64((seed_base << 20) ^ (ei << 10) ^ r ^ splitmix64(env.seed)))
            for label, cfg in configs.items():
                alg_seed = splitmix64(real.seed ^ _stable_hash(label))
                trace = run_simulation(real, cfg, T, alg_seed)
                totals[label][env.name].append(trace.total_reward)
                result.rows.append({
                    "environment": env.name,
                    "algorithm": label,
                    "run": r,
                    "terminal_reward": trace.total_reward,
                    "terminal_regret": float(trace.regret[-1]),
                })
                if keep_traces:
                    result.traces[(env.name, label, r)] = trace
    medians = {a: {e: float(np.median(v)) for e, v in per_env.items()} for a, per_env in totals.items()}
    result.board = score_and_rank(medians)
    return result


# -- export -------------------------------------------------------------------

def write_runs_csv(rows: Sequence[dict], path: str | Path) -> None:
    fields = ["environment", "algorithm", "run", "terminal_reward", "terminal_regret"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{row[k]:.6f}" if isinstance(row[k], float) else row[k]) for k in fields})


def write_scoreboard_csv(board: ScoreBoard, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "environment", "median", "score", "rank"])
        for i, a in enumerate(board.algorithms):
            for j, e in enumerate(board.environments):
                w.writerow([a, e, f"{board.medians[i, j]:.6f}", f"{board.scores[i, j]:.6f}", f"{board.ranks[i, j]:g}"])
        for i, a in enumerate(board.algorithms):
            w.writerow([a, "Rank Avg", "", "", f"{board.ranks[i].mean():.6f}"])
            w.writerow([a, "Score Avg", "", f"{board.scores[i].mean():.6f}", ""])


def render_table(board: ScoreBoard) -> str:
    """Algorithms as columns; one score row per environment, then the averages."""
    head = [""] + board.algorithms
    body = [[e] + [f"{board.scores[i, j]:.2f}" for i in range(len(board.algorithms))]
            for j, e in enumerate(board.environments)]
    body.append(["Rank Avg"] + [f"{board.ranks[i].mean():.2f}" for i in range(len(board.algorithms))])
    body.append(["Score Avg"] + [f"{board.scores[i].mean():.2f}" for i in range(len(board.algorithms))])
    widths = [max(len(r[c]) for r in [head] + body) for c in range(len(head))]
    fmt = lambda r: "  ".join(s.ljust(w) if c == 0 else s.rjust(w) for c, (s, w) in enumerate(zip(r, widths)))
    lines = [fmt(head), "  ".join("-" * w for w in widths)]
    lines += [fmt(r) for r in body[:-2]]
    lines.append("  ".join("-" * w for w in widths))
    lines += [fmt(r) for r in body[-2:]]
    return "\n".join(lines) + "\n"
