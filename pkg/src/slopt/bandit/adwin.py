"""ADWIN2 adaptive window over a stream of 0/1 rewards.

Buckets are kept in rows of exponentially growing capacity: row ``i`` holds
buckets that each summarise ``2**i`` observations, oldest bucket first. A row
never holds more than ``M`` buckets once an insertion completes.

Cut detection runs on every ``clock``-th insertion (``clock=1`` checks after
every insertion).
"""

from __future__ import annotations

import math
from typing import Any


class AdwinWindow:
    def __init__(self, M: int = 10, delta: float = 1e-7, clock: int = 32) -> None:
        if M < 1:
            raise ValueError("M must be a positive integer")
        if clock < 1:
            raise ValueError("clock must be a positive integer")
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        self.M = int(M)
        self.delta = float(delta)
        self.clock = int(clock)
        self.ticks = 0
        self.rows: list[list[float]] = [[]]
        self.count = 0
        self.total = 0.0

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    @property
    def n_buckets(self) -> int:
        return sum(len(row) for row in self.rows)

    def insert(self, r: float) -> bool:
        """Append ``r``, compress, then drop stale history while a cut is detected.

        Returns True when at least one cut happened.
        """
        self.rows[0].append(float(r))
        self.count += 1
        self.total += r
        self._compress()
        self.ticks += 1
        cut = False
        if self.ticks % self.clock:
            return cut
        while self.count > 1 and self._detect_cut():
            self._drop_oldest()
            cut = True
        return cut

    def _compress(self) -> None:
        rows, M = self.rows, self.M
        i = 0
        while len(rows[i]) > M:
            a = rows[i].pop(0)
            b = rows[i].pop(0)
            if i + 1 == len(rows):
                rows.append([])
            rows[i + 1].append(a + b)
            i += 1

    def _drop_oldest(self) -> None:
        rows = self.rows
        i = len(rows) - 1
        while not rows[i]:
            i -= 1
        self.total -= rows[i].pop(0)
        self.count -= 1 << i
        while len(rows) > 1 and not rows[-1]:
            rows.pop()
        if self.count == 0:
            self.total = 0.0

    def _detect_cut(self) -> bool:
        n = self.count
        total = self.total
        mu = total / n
        variance = mu * (1.0 - mu)
        # delta' = delta / ln n ; guard n == 2 where ln n < 1 is still positive
        log_term = math.log(2.0 * math.log(n) / self.delta) if n > 2 else math.log(2.0 / self.delta)
        two_var_log = 2.0 * variance * log_term
        two_thirds_log = (2.0 / 3.0) * log_term
        n1 = 0
        s1 = 0.0
        # newest -> oldest; the split sits after each bucket except the oldest
        for i, row in enumerate(self.rows):
            size = 1 << i
            for j in range(len(row) - 1, -1, -1):
                n1 += size
                s1 += row[j]
                n0 = n - n1
                if n0 <= 0:
                    return False
                inv_m = 1.0 / n0 + 1.0 / n1
                eps = math.sqrt(two_var_log * inv_m) + two_thirds_log * inv_m
                if abs((total - s1) / n0 - s1 / n1) > eps:
                    return True
        return False

    # -- serialisation -------------------------------------------------------
    def to_state(self) -> dict[str, Any]:
        return {
            "M": self.M,
            "delta": self.delta,
            "clock": self.clock,
            "ticks": self.ticks,
            "rows": [list(row) for row in self.rows],
            "count": self.count,
            "total": self.total,
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "AdwinWindow":
        w = cls(int(state["M"]), float(state["delta"]), int(state["clock"]))
        w.ticks = int(state["ticks"])
        w.rows = [[float(v) for v in row] for row in state["rows"]] or [[]]
        w.count = int(state["count"])
        w.total = float(state["total"])
        return w

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdwinWindow):
            return NotImplemented
        return self.to_state() == other.to_state()
