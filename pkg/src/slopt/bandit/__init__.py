from slopt.bandit.adwin import AdwinWindow
from slopt.bandit.algorithms import (
    BanditInstance,
    create_instance,
    dbe_probabilities,
    exp3pp_probabilities,
    instance_from_state,
    reward,
    select_arm,
)
from slopt.bandit.config import ALGORITHMS, UNIFORM, BanditConfig, canonical_algorithm
from slopt.bandit.indices import bernoulli_kl, klucb_upper_bound, ucb1_index

__all__ = [
    "ALGORITHMS",
    "UNIFORM",
    "AdwinWindow",
    "BanditConfig",
    "BanditInstance",
    "bernoulli_kl",
    "canonical_algorithm",
    "create_instance",
    "dbe_probabilities",
    "exp3pp_probabilities",
    "instance_from_state",
    "klucb_upper_bound",
    "reward",
    "select_arm",
    "ucb1_index",
]
