from .matrices import (
    attach_statements,
    load_coverage_matrix,
    load_failing_tests,
    load_kill_matrix,
    load_label_cache,
    save_label_cache,
)
from .metrics import (
    apfd,
    apfd_progression,
    average_curve,
    correlation_pairs,
    first_fault_index,
    first_fault_row,
    first_fault_summary,
    mutation_score,
    prefix_curves,
    random_subset_growth,
)
from .ordering import (
    additional_greedy,
    greedy_sfc_order,
    greedy_statement_order,
    random_order,
    similar_coverage_subset,
)

__all__ = [
    "attach_statements",
    "load_coverage_matrix",
    "load_failing_tests",
    "load_kill_matrix",
    "load_label_cache",
    "save_label_cache",
    "apfd",
    "apfd_progression",
    "average_curve",
    "correlation_pairs",
    "first_fault_index",
    "first_fault_row",
    "first_fault_summary",
    "mutation_score",
    "prefix_curves",
    "random_subset_growth",
    "additional_greedy",
    "greedy_sfc_order",
    "greedy_statement_order",
    "random_order",
    "similar_coverage_subset",
]
