from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

ALGORITHMS = ("UCB1", "KL-UCB", "TS", "dTS", "dBE", "ADS-TS", "EXP3-IX", "EXP3++")
# Not one of the compared algorithms: uniform arm choice, used as the
# "no optimisation" control for the scheme-equivalence experiment.
UNIFORM = "uniform"

_ALIASES = {
    "ucb1": "UCB1",
    "klucb": "KL-UCB",
    "kl-ucb": "KL-UCB",
    "ts": "TS",
    "dts": "dTS",
    "dbe": "dBE",
    "adsts": "ADS-TS",
    "ads-ts": "ADS-TS",
    "exp3ix": "EXP3-IX",
    "exp3-ix": "EXP3-IX",
    "exp3pp": "EXP3++",
    "exp3++": "EXP3++",
    "uniform": UNIFORM,
}

CLI_NAMES = {v: k for k, v in _ALIASES.items() if "-" not in k and "+" not in k}


def canonical_algorithm(name: str) -> str:
    """Map a CLI alias or canonical name to the canonical algorithm name."""
    if name in ALGORITHMS or name == UNIFORM:
        return name
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown bandit algorithm {name!r}") from None


@dataclass(frozen=True)
class BanditConfig:
    """Hyperparameters shared by all algorithms; defaults are the published ones."""

    algorithm: str = "TS"
    c: float = 0.5
    prior_alpha: float = 1.0
    prior_beta: float = 1.0
    gamma: float = 1.0 - 1e-8
    adwin_M: int = 10
    adwin_delta: float = 1.0 - 1e-7
    # When True the ADWIN cut test uses 1 - adwin_delta as its confidence.
    adwin_delta_complement: bool = True
    # cut test runs on every adwin_clock-th insertion into a window
    adwin_clock: int = 32
    exp3pp_alpha: float = 3.0
    exp3pp_beta: float = 256.0
    dbe_temperature: float = 0.2
    dbe_gamma: float = 1.0 - 1e-8

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.prior_alpha <= 0 or self.prior_beta <= 0:
            raise ValueError("Beta prior parameters must be positive")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0.0 < self.dbe_gamma <= 1.0:
            raise ValueError("dbe_gamma must lie in (0, 1]")
        if int(self.adwin_M) != self.adwin_M or self.adwin_M < 1:
            raise ValueError("adwin_M must be a positive integer")
        if int(self.adwin_clock) != self.adwin_clock or self.adwin_clock < 1:
            raise ValueError("adwin_clock must be a positive integer")
        if not 0.0 < self.adwin_delta < 1.0:
            raise ValueError("adwin_delta must lie in (0, 1)")
        if self.exp3pp_alpha <= 0 or self.exp3pp_beta <= 0:
            raise ValueError("EXP3++ constants must be positive")
        if self.dbe_temperature <= 0:
            raise ValueError("dbe_temperature must be positive")

    @property
    def adwin_cut_delta(self) -> float:
        return 1.0 - self.adwin_delta if self.adwin_delta_complement else self.adwin_delta

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BanditConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise ValueError(f"unknown BanditConfig fields: {sorted(unknown)}")
        return cls(**d)
