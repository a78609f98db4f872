from slopt.mutation.operators import (
    CATALOG,
    CHUNK,
    DEFAULT_MAX_INPUT_LEN,
    N_OPERATORS,
    UNIT,
    MutationAux,
    MutationOperator,
    apply_operator,
    operator_by_name,
)
from slopt.mutation.schemes import (
    GROUP_LABELS,
    N_EXPONENTS,
    N_GROUPS,
    MutationRecord,
    SloptState,
    batch_size,
    decide_batch_exponent,
    get_group_index,
    random_mutation_conventional,
    random_mutation_slopt,
    reward_choices,
    select_operator,
)

__all__ = [
    "CATALOG",
    "CHUNK",
    "DEFAULT_MAX_INPUT_LEN",
    "GROUP_LABELS",
    "MutationAux",
    "MutationOperator",
    "MutationRecord",
    "N_EXPONENTS",
    "N_GROUPS",
    "N_OPERATORS",
    "SloptState",
    "UNIT",
    "apply_operator",
    "batch_size",
    "decide_batch_exponent",
    "get_group_index",
    "operator_by_name",
    "random_mutation_conventional",
    "random_mutation_slopt",
    "reward_choices",
    "select_operator",
]
