"""The mutation-fuzzing campaign loop.

Select a seed round-robin, decide its energy, and for each unit of energy
mutate it, execute the PUT, reward the bandits (slopt mode), queue inputs that
reach new edges and archive crashes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from slopt.bandit import BanditConfig
from slopt.fuzz.corpus import Corpus, Seed, select_seed
from slopt.fuzz.puts import PutHarness
from slopt.fuzz.snapshot import Snapshot, decode_snapshot, encode_snapshot
from slopt.mutation import (
    N_EXPONENTS,
    N_GROUPS,
    N_OPERATORS,
    MutationAux,
    SloptState,
    get_group_index,
    random_mutation_conventional,
    random_mutation_slopt,
    reward_choices,
)
from slopt.mutation.operators import DEFAULT_MAX_INPUT_LEN
from slopt.rng import RngStream

MODES = ("slopt", "conventional")


class InitialSeedCrash(RuntimeError):
    def __init__(self, index: int, reason: str | None) -> None:
        super().__init__(f"initial seed {index} crashes the PUT: {reason or 'no reason given'}")
        self.index = index


@dataclass(frozen=True)
class CampaignConfig:
    mode: str = "slopt"
    bandit: BanditConfig = field(default_factory=BanditConfig)
    base_energy: int = 128
    min_energy: int = 16
    max_energy: int = 1024
    exec_budget: int | None = 10_000
    time_budget: float | None = None   # seconds; not deterministic
    rng_seed: int = 0
    max_input_len: int = DEFAULT_MAX_INPUT_LEN
    output_dir: str | None = None
    dictionary: tuple[bytes, ...] = ()
    stats_interval: int = 1000

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.exec_budget is None and self.time_budget is None:
            raise ValueError("a campaign needs an execution or time budget")
        if self.exec_budget is not None and self.exec_budget <= 0:
            raise ValueError("execution budget must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if not 1 <= self.min_energy <= self.base_energy <= self.max_energy:
            raise ValueError("energy bounds must satisfy 1 <= min <= base <= max")
        if self.max_input_len < 1:
            raise ValueError("max_input_len must be positive")
        if self.stats_interval < 1:
            raise ValueError("stats_interval must be positive")
        object.__setattr__(self, "dictionary", tuple(bytes(t) for t in self.dictionary))

    def to_dict(self) -> dict[str, Any]:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["bandit"] = self.bandit.to_dict()
        d["dictionary"] = [t.hex() for t in self.dictionary]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CampaignConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown CampaignConfig fields: {sorted(unknown)}")
        if "bandit" in d:
            d["bandit"] = BanditConfig.from_dict(d["bandit"])
        if "dictionary" in d:
            d["dictionary"] = tuple(bytes.fromhex(t) for t in d["dictionary"])
        return cls(**d)


def decide_energy(seed: Seed, corpus: Corpus, config: CampaignConfig) -> int:
    energy = config.base_energy
    if seed.edge_count > corpus.median_edge_count():
        energy *= 2
    return max(config.min_energy, min(config.max_energy, energy))


@dataclass
class CampaignReport:
    put: str
    config: dict[str, Any]
    execs: int
    edges: int
    coverage: list[tuple[int, int]]          # (execs, covered edges) at every increase
    seeds: list[dict[str, Any]]
    crashes: list[dict[str, Any]]
    op_counts: list[int]
    exp_counts: list[list[int]]              # [group][exponent]
    rewards_granted: int
    stats: list[dict[str, Any]] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class Campaign:
    """A resumable fuzzing campaign. Call :meth:`run` to advance it."""

    def __init__(self, put: PutHarness, initial_seeds: Sequence[bytes], config: CampaignConfig) -> None:
        if not initial_seeds:
            raise ValueError("at least one initial seed is required")
        self.put = put
        self.config = config
        self.rng = RngStream(config.rng_seed)
        self.corpus = Corpus()
        self.state = SloptState(config.bandit) if config.mode == "slopt" else None
        self.execs = 0
        self.current = -1
        self.remaining = 0
        self.op_counts = [0] * N_OPERATORS
        self.exp_counts = [[0] * N_EXPONENTS for _ in range(N_GROUPS)]
        self.coverage: list[tuple[int, int]] = []
        self.stats: list[dict[str, Any]] = []
        for i, data in enumerate(initial_seeds):
            data = bytes(data)
            if not data:
                raise ValueError(f"initial seed {i} is empty")
            res = put.execute(data)
            if res.crashed:
                raise InitialSeedCrash(i, res.abort_reason)
            self.corpus.add_seed(data, res)
        self.coverage.append((0, len(self.corpus.edges)))
        self._init_aux()

    def _init_aux(self) -> None:
        self.aux = MutationAux(self.config.dictionary, self.corpus.datas, self.config.max_input_len)

    def run(self, execs: int | None = None) -> "Campaign":
        """Advance by ``execs`` executions, or to the configured budget."""
        cfg = self.config
        if execs is not None:
            if execs <= 0:
                raise ValueError("execs must be positive")
            target = self.execs + execs
        elif cfg.exec_budget is not None:
            target = cfg.exec_budget
        else:
            target = None
        deadline = None if cfg.time_budget is None else time.monotonic() + cfg.time_budget

        corpus = self.corpus
        seeds = corpus.seeds
        global_edges = corpus.edges
        execute = self.put.execute
        rng = self.rng
        below = rng.below
        aux = self.aux
        state = self.state
        op_counts = self.op_counts
        exp_counts = self.exp_counts
        interval = cfg.stats_interval
        record = None

        while target is None or self.execs < target:
            if self.remaining <= 0:
                seed = select_seed(corpus)
                self.current = seed.id
                self.remaining = decide_energy(seed, corpus, cfg)
            seed = seeds[self.current]
            if state is not None:
                child, record = random_mutation_slopt(seed.data, state, rng, aux, seed.id)
                op_counts[record.operator] += 1
                exp_counts[record.group][record.exponent] += 1
            else:
                exponent = below(N_EXPONENTS)
                exp_counts[get_group_index(len(seed.data))][exponent] += 1
                child = random_mutation_conventional(seed.data, rng, aux, exponent, op_counts)
            res = execute(child)
            self.execs += 1
            self.remaining -= 1
            valuable = not res.edges <= global_edges
            if state is not None:
                reward_choices(state, record, valuable)
            if valuable:
                corpus.add_seed(child, res, seed.id, record, self.execs)
                self.coverage.append((self.execs, len(global_edges)))
            if res.crashed:
                corpus.add_crash(child, res, self.execs)
            if self.execs % interval == 0:
                self._record_stats()
                if deadline is not None and time.monotonic() >= deadline:
                    break
        return self

    def _record_stats(self) -> None:
        self.stats.append({
            "execs": self.execs,
            "edges": len(self.corpus.edges),
            "queue": len(self.corpus),
            "crashes": len(self.corpus.crashes),
            "op_counts": list(self.op_counts),
            "exp_counts": [list(r) for r in self.exp_counts],
        })

    # -- reporting -----------------------------------------------------------
    def report(self) -> CampaignReport:
        seeds = [
            {
                "id": s.id,
                "parent": s.parent,
                "len": len(s.data),
                "sha1": hashlib.sha1(s.data).hexdigest(),
                "timestamp": s.timestamp,
                "edge_count": s.edge_count,
                "record": None if s.record is None else [s.record.operator, s.record.exponent, s.record.group],
            }
            for s in self.corpus.seeds
        ]
        crashes = [
            {"key": c.key, "sha1": hashlib.sha1(c.data).hexdigest(), "timestamp": c.timestamp, "reason": c.reason}
            for c in self.corpus.crashes
        ]
        return CampaignReport(
            put=self.put.name,
            config=self.config.to_dict(),
            execs=self.execs,
            edges=len(self.corpus.edges),
            coverage=list(self.coverage),
            seeds=seeds,
            crashes=crashes,
            op_counts=list(self.op_counts),
            exp_counts=[list(r) for r in self.exp_counts],
            rewards_granted=0 if self.state is None else self.state.reward_count,
            stats=list(self.stats),
        )

    # -- persistence ---------------------------------------------------------
    def _meta(self) -> dict[str, Any]:
        return {
            "put": self.put.name,
            "config": self.config.to_dict(),
            "execs": self.execs,
            "current": self.current,
            "remaining": self.remaining,
            "op_counts": self.op_counts,
            "exp_counts": self.exp_counts,
            "coverage": self.coverage,
            "stats": self.stats,
        }

    def to_snapshot(self) -> Snapshot:
        return Snapshot(self.corpus, self.state, self.rng, self._meta())

    def snapshot_bytes(self) -> bytes:
        return encode_snapshot(self.to_snapshot())

    @classmethod
    def from_snapshot(cls, put: PutHarness, snap: Snapshot | bytes) -> "Campaign":
        if isinstance(snap, (bytes, bytearray)):
            snap = decode_snapshot(bytes(snap))
        meta = snap.meta
        if meta.get("put") != put.name:
            raise PutMismatch(meta.get("put"), put.name)
        config = CampaignConfig.from_dict(meta["config"])
        if (snap.slopt_state is None) != (config.mode == "conventional") or snap.rng is None:
            raise ValueError("snapshot state does not match its recorded mode")
        obj = cls.__new__(cls)
        obj.put = put
        obj.config = config
        obj.rng = snap.rng
        obj.corpus = snap.corpus
        obj.state = snap.slopt_state
        obj.execs = int(meta["execs"])
        obj.current = int(meta["current"])
        obj.remaining = int(meta["remaining"])
        obj.op_counts = [int(v) for v in meta["op_counts"]]
        obj.exp_counts = [[int(v) for v in row] for row in meta["exp_counts"]]
        obj.coverage = [(int(a), int(b)) for a, b in meta["coverage"]]
        obj.stats = list(meta["stats"])
        obj._init_aux()
        return obj

    def state_equal(self, other: "Campaign") -> bool:
        return self.snapshot_bytes() == other.snapshot_bytes()

    # -- output layout -------------------------------------------------------
    def write_outputs(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        (out / "queue").mkdir(parents=True, exist_ok=True)
        (out / "crashes").mkdir(exist_ok=True)
        for s in self.corpus.seeds:
            (out / "queue" / f"id_{s.id:06d}").write_bytes(s.data)
        for i, c in enumerate(self.corpus.crashes):
            name = f"crash_{i:06d}"
            (out / "crashes" / name).write_bytes(c.data)
            side = {"key": c.key, "timestamp": c.timestamp, "reason": c.reason, "edges": sorted(c.edges)}
            (out / "crashes" / (name + ".json")).write_text(json.dumps(side, sort_keys=True) + "\n")
        with open(out / "stats.jsonl", "w") as fh:
            for rec in self.stats:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
        (out / "snapshot.bin").write_bytes(self.snapshot_bytes())
        (out / "report.json").write_text(self.report().to_json() + "\n")
        return out


class PutMismatch(ValueError):
    def __init__(self, recorded: str | None, given: str) -> None:
        super().__init__(f"snapshot was taken on PUT {recorded!r}, not {given!r}")


def run_campaign(put: PutHarness, initial_seeds: Sequence[bytes], config: CampaignConfig) -> CampaignReport:
    campaign = Campaign(put, initial_seeds, config).run()
    if config.output_dir is not None:
        campaign.write_outputs(config.output_dir)
    return campaign.report()
