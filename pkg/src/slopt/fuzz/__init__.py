from slopt.fuzz.corpus import Corpus, Crash, Seed, crash_key, is_input_valuable, select_seed
from slopt.fuzz.engine import (
    MODES,
    Campaign,
    CampaignConfig,
    CampaignReport,
    InitialSeedCrash,
    PutMismatch,
    decide_energy,
    run_campaign,
)
from slopt.fuzz.puts import ExecutionResult, PutHarness, builtin_puts, get_put
from slopt.fuzz.snapshot import Snapshot, SnapshotError, load_snapshot, save_snapshot

__all__ = [
    "MODES",
    "Campaign",
    "CampaignConfig",
    "CampaignReport",
    "Corpus",
    "Crash",
    "ExecutionResult",
    "InitialSeedCrash",
    "PutHarness",
    "PutMismatch",
    "Seed",
    "Snapshot",
    "SnapshotError",
    "builtin_puts",
    "crash_key",
    "decide_energy",
    "get_put",
    "is_input_valuable",
    "load_snapshot",
    "run_campaign",
    "save_snapshot",
    "select_seed",
]
