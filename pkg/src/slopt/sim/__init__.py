from slopt.sim.compare import (
    ComparisonResult,
    ScoreBoard,
    render_table,
    run_comparison,
    score_and_rank,
    write_runs_csv,
    write_scoreboard_csv,
)
from slopt.sim.environments import (
    KINDS,
    RewardEnvironment,
    abrupt_change,
    decaying,
    depleting_pool,
    depleting_pool_suite,
    environment_suite,
    stationary,
)
from slopt.sim.simulate import SimulationTrace, cumulative_regret, run_simulation

__all__ = [
    "KINDS",
    "ComparisonResult",
    "RewardEnvironment",
    "ScoreBoard",
    "SimulationTrace",
    "abrupt_change",
    "cumulative_regret",
    "decaying",
    "depleting_pool",
    "depleting_pool_suite",
    "environment_suite",
    "render_table",
    "run_comparison",
    "run_simulation",
    "score_and_rank",
    "stationary",
    "write_runs_csv",
    "write_scoreboard_csv",
]
