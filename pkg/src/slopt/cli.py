"""Command-line entry point: fuzz, simulate, analyze, replay.

Every run that writes an output directory also writes ``args.txt``, a flag
file with the fully resolved options; ``slopt @OUT/args.txt`` repeats the run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from slopt import analyze as an
from slopt.bandit import ALGORITHMS, BanditConfig, canonical_algorithm
from slopt.bandit.config import CLI_NAMES
from slopt.fuzz import (
    Campaign,
    CampaignConfig,
    InitialSeedCrash,
    PutMismatch,
    SnapshotError,
    builtin_puts,
    get_put,
    load_snapshot,
)
from slopt.mutation.dictionary import DictionaryError, load_dictionary
from slopt.mutation.operators import DEFAULT_MAX_INPUT_LEN
from slopt.sim import KINDS, environment_suite, render_table, run_comparison, write_runs_csv, write_scoreboard_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SEED_CRASH = 3
EXIT_PUT_MISMATCH = 4

ALGO_CHOICES = tuple(CLI_NAMES[a] for a in ALGORITHMS)


class ConfigError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="slopt",
        description="Bandit-tuned single-operator mutation fuzzing and bandit simulations.",
        fromfile_prefix_chars="@",
    )
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fuzz", help="run a fuzzing campaign on a built-in PUT", fromfile_prefix_chars="@")
    f.add_argument("--put", required=True, choices=sorted(builtin_puts()))
    f.add_argument("--seeds", required=True, help="directory of initial seed files")
    f.add_argument("--execs", type=_positive_int, required=True, help="execution budget")
    f.add_argument("--mode", choices=("slopt", "conventional"), default="slopt")
    f.add_argument("--algo", choices=ALGO_CHOICES + ("uniform",), default="ts")
    f.add_argument("--rng-seed", type=int, default=0)
    f.add_argument("--out", required=True, help="output directory (must not exist or be empty)")
    f.add_argument("--dict", default="put",
                   help="token dictionary file, 'put' for the PUT's own tokens, or 'none'")
    f.add_argument("--max-input-len", type=_positive_int, default=DEFAULT_MAX_INPUT_LEN)

    s = sub.add_parser("simulate", help="compare bandit algorithms on synthetic environments",
                       fromfile_prefix_chars="@")
    s.add_argument("--algos", default="all", help="comma-separated algorithm names, or 'all'")
    s.add_argument("--env", choices=KINDS + ("all",), default="depleting_pool")
    s.add_argument("--runs", type=_positive_int, default=10)
    s.add_argument("--T", type=_positive_int, default=10_000)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--out", default=None, help="directory for CSVs and the rendered table")

    a = sub.add_parser("analyze", help="selection tables and coverage series of a campaign")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--stats", help="stats.jsonl of a campaign")
    src.add_argument("--snapshot", help="snapshot.bin of a campaign")
    a.add_argument("--format", choices=("table", "csv"), default="table")
    a.add_argument("--out", default=None, help="write batch.csv, category.csv and coverage.csv here")

    r = sub.add_parser("replay", help="resume a campaign from a snapshot, or re-run one input",
                       fromfile_prefix_chars="@")
    r.add_argument("--snapshot", required=True)
    r.add_argument("--put", default=None, help="PUT name; must match the snapshot")
    r.add_argument("--execs", type=_positive_int, default=None, help="additional executions")
    r.add_argument("--input", default=None, help="execute this single input and report the result")
    r.add_argument("--out", default=None)
    return p


# -- helpers ------------------------------------------------------------------

def _check_out_dir(path: str) -> Path:
    out = Path(path)
    if out.exists() and (not out.is_dir() or any(out.iterdir())):
        raise ConfigError(f"output directory {out} exists and is not empty")
    return out


def _read_seeds(path: str) -> list[bytes]:
    d = Path(path)
    if not d.is_dir():
        raise ConfigError(f"seeds directory {d} does not exist")
    files = sorted(p for p in d.iterdir() if p.is_file())
    seeds = [p.read_bytes() for p in files]
    seeds = [s for s in seeds if s]
    if not seeds:
        raise ConfigError(f"seeds directory {d} has no non-empty files")
    return seeds


def _resolve_dictionary(choice: str, put_tokens: tuple[bytes, ...]) -> tuple[bytes, ...]:
    if choice == "put":
        return put_tokens
    if choice == "none":
        return ()
    try:
        return tuple(load_dictionary(choice))
    except OSError as exc:
        raise ConfigError(f"cannot read dictionary {choice}: {exc.strerror}") from None
    except DictionaryError as exc:
        raise ConfigError(f"dictionary {choice}: {exc}") from None


def _write_args(out: Path, command: str, args: argparse.Namespace, keys: list[str]) -> None:
    lines = [command]
    for k in keys:
        v = getattr(args, k)
        if v is None:
            continue
        lines.append("--" + k.replace("_", "-"))
        lines.append(str(Path(v).resolve()) if k in ("seeds", "out", "snapshot") and v else str(v))
    (out / "args.txt").write_text("\n".join(lines) + "\n")


def _err(msg: str) -> None:
    print(f"slopt: error: {msg}", file=sys.stderr)


# -- subcommands --------------------------------------------------------------

def cmd_fuzz(args: argparse.Namespace) -> int:
    put = get_put(args.put)
    out = _check_out_dir(args.out)
    seeds = _read_seeds(args.seeds)
    tokens = _resolve_dictionary(args.dict, put.dictionary)
    config = CampaignConfig(
        mode=args.mode,
        bandit=BanditConfig(canonical_algorithm(args.algo)),
        exec_budget=args.execs,
        rng_seed=args.rng_seed,
        max_input_len=args.max_input_len,
        dictionary=tokens,
    )
    campaign = Campaign(put, seeds, config)   # may raise InitialSeedCrash before anything is written
    campaign.run()
    out.mkdir(parents=True, exist_ok=True)
    campaign.write_outputs(out)
    (out / "config.json").write_text(json.dumps(
        {"command": "fuzz", "put": put.name, "seeds": str(Path(args.seeds).resolve()),
         "dict": args.dict, "campaign": config.to_dict()}, indent=2, sort_keys=True) + "\n")
    _write_args(out, "fuzz", args, ["put", "seeds", "execs", "mode", "algo", "rng_seed", "out", "dict",
                                    "max_input_len"])
    print(f"{put.name}: {campaign.execs} execs, {len(campaign.corpus.edges)} edges, "
          f"{len(campaign.corpus)} seeds, {len(campaign.corpus.crashes)} crashes")
    return EXIT_OK


def _parse_algos(text: str) -> dict[str, BanditConfig]:
    if text.strip().lower() == "all":
        names = list(ALGORITHMS)
    else:
        names = []
        for tok in text.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                names.append(canonical_algorithm(tok))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    if len(set(names)) != len(names):
        raise ConfigError("algorithm listed twice")
    if len(names) < 2:
        raise ConfigError("simulate needs at least two algorithms")
    return {n: BanditConfig(n) for n in names}


def cmd_simulate(args: argparse.Namespace) -> int:
    configs = _parse_algos(args.algos)
    out = _check_out_dir(args.out) if args.out else None
    envs = environment_suite(args.env, args.T, seed=args.rng_seed)
    result = run_comparison(envs, configs, args.runs, args.T, seed_base=args.rng_seed)
    table = render_table(result.board)
    print(table, end="")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_runs_csv(result.rows, out / "runs.csv")
        write_scoreboard_csv(result.board, out / "scoreboard.csv")
        (out / "table.txt").write_text(table)
        (out / "config.json").write_text(json.dumps(
            {"command": "simulate", "algorithms": {k: v.to_dict() for k, v in configs.items()},
             "env": args.env, "environments": [e.name for e in envs], "runs": args.runs, "T": args.T,
             "rng_seed": args.rng_seed}, indent=2, sort_keys=True) + "\n")
        args.algos = ",".join(CLI_NAMES.get(a, a) for a in configs)
        _write_args(out, "simulate", args, ["algos", "env", "runs", "T", "rng_seed", "out"])
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        stats = an.load_stats(args.stats) if args.stats else an.stats_from_snapshot(args.snapshot)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.stats or args.snapshot}: {exc.strerror}") from None
    except (an.StatsError, SnapshotError) as exc:
        raise ConfigError(f"{args.stats or args.snapshot}: {exc}") from None
    if args.format == "table":
        print(an.render_tables(stats), end="")
    else:
        print(an.batch_table_csv(stats), end="")
        print()
        print(an.category_table_csv(stats), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "batch.csv").write_text(an.batch_table_csv(stats))
        (out / "category.csv").write_text(an.category_table_csv(stats))
        (out / "coverage.csv").write_text(an.coverage_csv(stats))
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        snap = load_snapshot(args.snapshot)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.snapshot}: {exc.strerror}") from None
    except SnapshotError as exc:
        raise ConfigError(str(exc)) from None
    recorded = snap.meta.get("put")
    name = args.put or recorded
    if name not in builtin_puts():
        raise ConfigError(f"unknown PUT {name!r}")
    put = get_put(name)
    if recorded != put.name:
        raise PutMismatch(recorded, put.name)
    if args.input is not None:
        try:
            data = Path(args.input).read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.input}: {exc.strerror}") from None
        res = put.execute(data)
        print(json.dumps({"crashed": res.crashed, "abort_reason": res.abort_reason, "edges": sorted(res.edges)}))
        return EXIT_OK
    if args.execs is None:
        raise ConfigError("replay needs --execs or --input")
    out = _check_out_dir(args.out) if args.out else None
    campaign = Campaign.from_snapshot(put, snap)
    campaign.run(args.execs)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        campaign.write_outputs(out)
        _write_args(out, "replay", args, ["snapshot", "put", "execs", "out"])
    print(f"{put.name}: resumed to {campaign.execs} execs, {len(campaign.corpus.edges)} edges")
    return EXIT_OK


_COMMANDS = {"fuzz": cmd_fuzz, "simulate": cmd_simulate, "analyze": cmd_analyze, "replay": cmd_replay}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except InitialSeedCrash as exc:
        _err(str(exc))
        return EXIT_SEED_CRASH
    except PutMismatch as exc:
        _err(str(exc))
        return EXIT_PUT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
