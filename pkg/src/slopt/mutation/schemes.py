"""Random mutation schemes and the two-layer bandit wiring.

``random_mutation_conventional`` is the havoc-style scheme: a random batch
size, and a fresh operator for every application. ``random_mutation_slopt``
picks ONE operator per generated input from the operator bandit, then a batch
exponent from the bandit cell indexed by (seed-size group, operator), and
applies that single operator ``2**exponent`` times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from slopt.bandit import BanditConfig, BanditInstance, create_instance, instance_from_state
from slopt.mutation.operators import (
    CATALOG,
    N_OPERATORS,
    OPERATOR_FNS,
    MutationAux,
    MutationOperator,
)
from slopt.rng import RngStream

N_GROUPS = 5
N_EXPONENTS = 7  # batch sizes 1, 2, 4, ..., 64
GROUP_BOUNDS = (100, 1_000, 10_000, 100_000)
GROUP_LABELS = ("[0,10^2)", "[10^2,10^3)", "[10^3,10^4)", "[10^4,10^5)", "[10^5,inf)")


def get_group_index(length: int) -> int:
    """Seed-size bucket: [0,1e2) [1e2,1e3) [1e3,1e4) [1e4,1e5) [1e5,inf)."""
    if length < 0:
        raise ValueError("length must be non-negative")
    if length < 100:
        return 0
    if length < 1_000:
        return 1
    if length < 10_000:
        return 2
    if length < 100_000:
        return 3
    return 4


def batch_size(exponent: int) -> int:
    return 1 << exponent


@dataclass(frozen=True)
class MutationRecord:
    operator: int
    exponent: int
    group: int
    seed_id: int = -1

    def __post_init__(self) -> None:
        if not 0 <= self.exponent < N_EXPONENTS:
            raise ValueError(f"exponent {self.exponent} outside [0, {N_EXPONENTS - 1}]")
        if not 0 <= self.group < N_GROUPS:
            raise ValueError(f"group {self.group} outside [0, {N_GROUPS - 1}]")


class SloptState:
    """Operator bandit plus the 5 x operator grid of 7-arm batch-exponent bandits."""

    def __init__(self, config: BanditConfig, n_operators: int = N_OPERATORS) -> None:
        self.config = config
        self.n_operators = n_operators
        self.instance_mut: BanditInstance = create_instance(config, n_operators)
        self.instances_bat: list[list[BanditInstance]] = [
            [create_instance(config, N_EXPONENTS) for _ in range(n_operators)]
            for _ in range(N_GROUPS)
        ]
        self.pending: MutationRecord | None = None
        self.reward_count = 0  # rewards of 1 granted so far

    def to_state(self) -> dict[str, Any]:
        p = self.pending
        return {
            "config": self.config.to_dict(),
            "n_operators": self.n_operators,
            "instance_mut": self.instance_mut.to_state(),
            "instances_bat": [[inst.to_state() for inst in row] for row in self.instances_bat],
            "pending": None if p is None else [p.operator, p.exponent, p.group, p.seed_id],
            "reward_count": self.reward_count,
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "SloptState":
        config = BanditConfig.from_dict(state["config"])
        obj = cls.__new__(cls)
        obj.config = config
        obj.n_operators = int(state["n_operators"])
        obj.instance_mut = instance_from_state(config, state["instance_mut"])
        obj.instances_bat = [[instance_from_state(config, s) for s in row] for row in state["instances_bat"]]
        if len(obj.instances_bat) != N_GROUPS or any(len(r) != obj.n_operators for r in obj.instances_bat):
            raise ValueError("batch-instance grid has the wrong shape")
        p = state["pending"]
        obj.pending = None if p is None else MutationRecord(*p)
        obj.reward_count = int(state["reward_count"])
        return obj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SloptState):
            return NotImplemented
        return self.to_state() == other.to_state()


def select_operator(state: SloptState, rng: RngStream) -> MutationOperator:
    return CATALOG[state.instance_mut.select(rng)]


def decide_batch_exponent(state: SloptState, group: int, op: int, rng: RngStream) -> int:
    if not 0 <= group < N_GROUPS:
        raise ValueError(f"group {group} out of range")
    if not 0 <= op < state.n_operators:
        raise ValueError(f"operator {op} out of range")
    return state.instances_bat[group][op].select(rng)


def random_mutation_slopt(
    seed: bytes,
    state: SloptState,
    rng: RngStream,
    aux: MutationAux,
    seed_id: int = -1,
    apply_log: list[int] | None = None,
) -> tuple[bytes, MutationRecord]:
    """One operator, ``2**t`` applications at independent uniform positions."""
    if not seed:
        raise ValueError("cannot mutate an empty seed")
    buf = bytearray(seed)
    op = state.instance_mut.select(rng)
    group = get_group_index(len(buf))
    exponent = state.instances_bat[group][op].select(rng)
    fn = OPERATOR_FNS[op]
    below = rng.below
    if apply_log is None:
        for _ in range(1 << exponent):
            buf = fn(buf, below(len(buf)), rng, aux)
    else:
        for _ in range(1 << exponent):
            buf = fn(buf, below(len(buf)), rng, aux)
            apply_log.append(op)
    record = MutationRecord(op, exponent, group, seed_id)
    state.pending = record
    return bytes(buf), record


def random_mutation_conventional(
    seed: bytes,
    rng: RngStream,
    aux: MutationAux,
    exponent: int | None = None,
    op_counts: list[int] | None = None,
) -> bytes:
    """Havoc-style mutation: random batch size, fresh uniform operator per application."""
    if not seed:
        raise ValueError("cannot mutate an empty seed")
    buf = bytearray(seed)
    below = rng.below
    if exponent is None:
        exponent = below(N_EXPONENTS)
    fns = OPERATOR_FNS
    n_ops = len(fns)
    for _ in range(1 << exponent):
        op = below(n_ops)
        if op_counts is not None:
            op_counts[op] += 1
        buf = fns[op](buf, below(len(buf)), rng, aux)
    return bytes(buf)


def reward_choices(state: SloptState, record: MutationRecord, valuable: bool) -> None:
    """Credit both bandit layers for the input produced under ``record``."""
    if state.pending is None or state.pending != record:
        raise ValueError("stale or mismatched mutation record")
    r = 1 if valuable else 0
    state.reward_count += r
    state.instance_mut.reward(record.operator, r)
    state.instances_bat[record.group][record.operator].reward(record.exponent, r)
    state.pending = None
