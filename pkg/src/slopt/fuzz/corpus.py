"""Seed queue, global coverage and the crash archive."""

from __future__ import annotations

import bisect
import hashlib
from dataclasses import dataclass

from slopt.fuzz.puts import ExecutionResult
from slopt.mutation import MutationRecord


@dataclass(frozen=True)
class Seed:
    id: int
    data: bytes
    parent: int | None
    record: MutationRecord | None
    timestamp: int          # executions performed when the seed was found
    edge_count: int
    edges: frozenset[int]

    def __post_init__(self) -> None:
        if len(self.data) < 1:
            raise ValueError("seed bytes must be non-empty")


@dataclass(frozen=True)
class Crash:
    data: bytes
    edges: frozenset[int]
    key: str
    timestamp: int
    reason: str | None


def crash_key(edges: frozenset[int]) -> str:
    """Dedup key: hash of the sorted covered-edge set."""
    h = hashlib.blake2b(digest_size=16)
    for e in sorted(edges):
        h.update(e.to_bytes(4, "little"))
    return h.hexdigest()


class Corpus:
    """Round-robin seed queue with a union-of-edges coverage set."""

    def __init__(self) -> None:
        self.seeds: list[Seed] = []
        self.datas: list[bytes] = []        # seed bytes, shared with the donor operator
        self.edges: set[int] = set()
        self.crashes: list[Crash] = []
        self.crash_keys: set[str] = set()
        self.cursor = 0
        self._sorted_counts: list[int] = []

    def __len__(self) -> int:
        return len(self.seeds)

    def add_seed(
        self,
        data: bytes,
        result: ExecutionResult,
        parent: int | None = None,
        record: MutationRecord | None = None,
        timestamp: int = 0,
    ) -> Seed:
        seed = Seed(len(self.seeds), bytes(data), parent, record, timestamp, len(result.edges), result.edges)
        self.seeds.append(seed)
        self.datas.append(seed.data)
        self.edges |= result.edges
        bisect.insort(self._sorted_counts, seed.edge_count)
        return seed

    def add_crash(self, data: bytes, result: ExecutionResult, timestamp: int = 0) -> bool:
        """Archive a crash unless its dedup key is already known."""
        key = crash_key(result.edges)
        if key in self.crash_keys:
            return False
        self.crash_keys.add(key)
        self.crashes.append(Crash(bytes(data), result.edges, key, timestamp, result.abort_reason))
        return True

    def median_edge_count(self) -> float:
        c = self._sorted_counts
        if not c:
            raise ValueError("empty corpus has no median")
        mid = len(c) // 2
        return float(c[mid]) if len(c) % 2 else (c[mid - 1] + c[mid]) / 2.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.seeds == other.seeds
            and self.edges == other.edges
            and self.crashes == other.crashes
            and self.cursor == other.cursor
        )


def is_input_valuable(result: ExecutionResult, corpus: Corpus) -> bool:
    """True iff the execution covered an edge the corpus has not seen."""
    return not result.edges <= corpus.edges


def select_seed(corpus: Corpus) -> Seed:
    """Next seed in round-robin order; seeds saved mid-cycle are reached before the wrap."""
    if not corpus.seeds:
        raise ValueError("cannot select from an empty corpus")
    if corpus.cursor >= len(corpus.seeds):
        corpus.cursor = 0
    seed = corpus.seeds[corpus.cursor]
    corpus.cursor += 1
    return seed
