from RFSMC.oracle.brute_force import (
    check_verdict_consistency,
    class_keys,
    class_search,
    closure_happens_before,
    count_classes,
    enumerate_all,
    hb_equivalent,
    iter_executions,
    oracle_ct,
    partition_by_hb,
)

__all__ = [
    "check_verdict_consistency",
    "class_keys",
    "class_search",
    "closure_happens_before",
    "count_classes",
    "enumerate_all",
    "hb_equivalent",
    "iter_executions",
    "oracle_ct",
    "partition_by_hb",
]
