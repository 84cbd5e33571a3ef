from .type_graph import (
    build_type_graph,
    coverable_labels,
    find_root,
    graph_to_dot,
    graph_to_json,
    iterable_fields,
    merge_label_universes,
)
from .oracles import decompose_properties, extract_oracles, harness_test_ids, mean_sfc_by_property_count
from .reachability import AnalysisOptions, reachable_code
from .coverage import aggregate_sfc, covered_labels, state_field_coverage
from .report import UncoveredReport, uncovered_report

__all__ = [
    "build_type_graph",
    "coverable_labels",
    "find_root",
    "graph_to_dot",
    "graph_to_json",
    "iterable_fields",
    "merge_label_universes",
    "decompose_properties",
    "extract_oracles",
    "harness_test_ids",
    "mean_sfc_by_property_count",
    "AnalysisOptions",
    "reachable_code",
    "aggregate_sfc",
    "covered_labels",
    "state_field_coverage",
    "UncoveredReport",
    "uncovered_report",
]
