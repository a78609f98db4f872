"""Selection-percentage tables and coverage series from finished campaigns."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from slopt.fuzz.snapshot import load_snapshot
from slopt.mutation import CATALOG, GROUP_LABELS, N_EXPONENTS, N_GROUPS, N_OPERATORS, UNIT, CHUNK

BATCH_LABELS = tuple(str(1 << e) for e in range(N_EXPONENTS))


class StatsError(ValueError):
    pass


@dataclass
class CampaignStats:
    op_counts: list[int]
    exp_counts: list[list[int]]          # [group][exponent]
    coverage: list[tuple[int, int]]      # (execs, edges)


def round_half_up_percent(counts: list[int]) -> list[int]:
    """Integer percentages, each rounded half up.

    If independent rounding leaves the row more than 1 away from 100, the
    entries with the largest rounding slack are nudged one point at a time
    until the row sums to within 1 of 100. An all-zero row stays all zero.
    """
    total = sum(counts)
    if total == 0:
        return [0] * len(counts)
    pct = [(200 * c + total) // (2 * total) for c in counts]
    drift = sum(pct) - 100
    if abs(drift) > 1:
        # exact remainder of each entry versus its rounded value, in units of 1/total
        slack = [100 * c - p * total for c, p in zip(counts, pct)]
        step = -1 if drift > 0 else 1
        order = sorted(range(len(counts)), key=lambda i: (slack[i] * step, -i), reverse=True)
        for i in order:
            if abs(drift) <= 1:
                break
            if step < 0 and pct[i] == 0:
                continue
            pct[i] += step
            drift += step
    return pct


def batch_table(stats: CampaignStats) -> list[tuple[str, list[int]]]:
    """Rows per seed-size group plus "Overall"; columns are batch sizes 1..64."""
    rows = [(GROUP_LABELS[g], round_half_up_percent(stats.exp_counts[g])) for g in range(N_GROUPS)]
    overall = [sum(stats.exp_counts[g][e] for g in range(N_GROUPS)) for e in range(N_EXPONENTS)]
    rows.append(("Overall", round_half_up_percent(overall)))
    return rows


def category_table(stats: CampaignStats) -> list[tuple[str, int]]:
    unit = sum(c for op, c in zip(CATALOG, stats.op_counts) if op.category == UNIT)
    chunk = sum(c for op, c in zip(CATALOG, stats.op_counts) if op.category == CHUNK)
    pct = round_half_up_percent([unit, chunk])
    return [("unit", pct[0]), ("chunk", pct[1])]


def _check_int_list(value, n: int, what: str, lineno: int) -> list[int]:
    if not isinstance(value, list) or len(value) != n or not all(isinstance(v, int) and v >= 0 for v in value):
        raise StatsError(f"line {lineno}: {what} must be a list of {n} non-negative integers")
    return value


def load_stats(path: str | Path) -> CampaignStats:
    """Parse stats.jsonl; counters come from the last record."""
    last = None
    coverage: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StatsError(f"line {lineno}: not valid JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise StatsError(f"line {lineno}: expected a JSON object")
            for key in ("execs", "edges", "op_counts", "exp_counts"):
                if key not in rec:
                    raise StatsError(f"line {lineno}: missing field {key!r}")
            if not isinstance(rec["execs"], int) or not isinstance(rec["edges"], int):
                raise StatsError(f"line {lineno}: execs and edges must be integers")
            if coverage and rec["execs"] <= coverage[-1][0]:
                raise StatsError(f"line {lineno}: execs must increase")
            _check_int_list(rec["op_counts"], N_OPERATORS, "op_counts", lineno)
            if not isinstance(rec["exp_counts"], list) or len(rec["exp_counts"]) != N_GROUPS:
                raise StatsError(f"line {lineno}: exp_counts must have {N_GROUPS} rows")
            for row in rec["exp_counts"]:
                _check_int_list(row, N_EXPONENTS, "exp_counts row", lineno)
            coverage.append((rec["execs"], rec["edges"]))
            last = rec
    if last is None:
        raise StatsError("line 1: no records")
    return CampaignStats(list(last["op_counts"]), [list(r) for r in last["exp_counts"]], coverage)


def stats_from_snapshot(path: str | Path) -> CampaignStats:
    meta = load_snapshot(path).meta
    return CampaignStats(
        [int(v) for v in meta["op_counts"]],
        [[int(v) for v in row] for row in meta["exp_counts"]],
        [(int(a), int(b)) for a, b in meta["coverage"]],
    )


def render_tables(stats: CampaignStats) -> str:
    lines = ["Batch size selection (%)"]
    head = ["Seed size"] + list(BATCH_LABELS)
    rows = [[label] + [str(v) for v in pct] for label, pct in batch_table(stats)]
    widths = [max(len(r[c]) for r in [head] + rows) for c in range(len(head))]
    fmt = lambda r: "  ".join(s.ljust(w) if i == 0 else s.rjust(w) for i, (s, w) in enumerate(zip(r, widths)))
    lines.append(fmt(head))
    lines += [fmt(r) for r in rows]
    lines.append("")
    lines.append("Operator category selection (%)")
    for name, pct in category_table(stats):
        lines.append(f"{name:<6} {pct:>3}")
    return "\n".join(lines) + "\n"


def batch_table_csv(stats: CampaignStats) -> str:
    out = ["group," + ",".join(BATCH_LABELS)]
    out += [label + "," + ",".join(str(v) for v in pct) for label, pct in batch_table(stats)]
    return "\n".join(out) + "\n"


def category_table_csv(stats: CampaignStats) -> str:
    return "category,percent\n" + "".join(f"{n},{p}\n" for n, p in category_table(stats))


def coverage_csv(stats: CampaignStats) -> str:
    return "execs,edges\n" + "".join(f"{a},{b}\n" for a, b in stats.coverage)
