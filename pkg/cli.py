"""
Command-line front end: `sfcov graph | coverage | prioritize | serve`.

Exit codes: 0 ok, 1 parse failure, 2 root not found, 3 no oracles found,
4 matrix format error, 64 usage or configuration error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from analysis import (
    AnalysisOptions,
    build_type_graph,
    coverable_labels,
    extract_oracles,
    graph_to_dot,
    graph_to_json,
    merge_label_universes,
    state_field_coverage,
    uncovered_report,
)
from analysis.oracles import harness_test_ids
from analysis.report import (
    COVERAGE_CSV_HEADER,
    atomic_write_text,
    coverage_rows,
    write_csv,
    write_json,
)
from harness import (
    apfd,
    apfd_progression,
    average_curve,
    correlation_pairs,
    first_fault_index,
    first_fault_row,
    first_fault_summary,
    greedy_sfc_order,
    greedy_statement_order,
    load_coverage_matrix,
    load_failing_tests,
    load_kill_matrix,
    load_label_cache,
    random_order,
    random_subset_growth,
    save_label_cache,
    similar_coverage_subset,
)
from harness.export import write_apfd, write_curves, write_first_fault, write_growth, write_report
from models import LabelSet, RunConfig, SourceCorpus, TestRecord, TypeGraph, load_run_config
from models.constants import (
    EXIT_OK,
    EXIT_USAGE,
    MODE_TESTS,
    ORACLE_MODES,
    STRATEGY_RANDOM_MEAN,
    TOOL_NAME,
    TOOL_VERSION,
)
from models.errors import ConfigError, NoDetectableFaults, ParseFailure, SfcovError
from models.source import Diagnostic
from parsing import parse_corpus, read_source_tree, resolve_types

logger = logging.getLogger(__name__)
diagnostics_log = logging.getLogger("sfcov.diagnostics")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which means RootNotFound here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _split(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [v.strip() for v in value.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL_NAME, description="State field coverage for Java-subset sources.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--sources", nargs="+", help="source roots (files or directories)")
    common.add_argument("--root", "--roots", dest="roots", nargs="+", action="extend",
                        help="target root classes, space- or comma-separated")
    common.add_argument("--out-dir", dest="out_dir", help="output directory")
    common.add_argument("--out", dest="formats", help="comma-separated formats: json,csv,text")
    common.add_argument("--workers", type=int, help="parallel workers for parsing and coverage")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging and info diagnostics")
    common.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    flag = dict(action="store_const", const=True, default=None)

    g = sub.add_parser("graph", parents=[common], help="build and export type graphs")
    g.add_argument("--no-inherited", dest="no_inherited", **flag)

    c = sub.add_parser("coverage", parents=[common], help="compute state field coverage")
    c.add_argument("--oracles", choices=ORACLE_MODES)
    c.add_argument("--selector", help="regex matched against oracle method names")
    c.add_argument("--assert-prefix", dest="assert_prefixes", action="append",
                   help="assertion method prefix (repeatable)")
    c.add_argument("--recursion-as-iteration", dest="recursion_as_iteration", **flag)
    c.add_argument("--strict-loop-bodies", dest="strict_loop_bodies", **flag)
    c.add_argument("--no-inherited", dest="no_inherited", **flag)
    c.add_argument("--labels-cache", dest="labels_cache", help="per-test label cache path")

    p = sub.add_parser("prioritize", parents=[common], help="order tests and score the orderings")
    p.add_argument("--kill-matrix", dest="kill_matrix")
    p.add_argument("--coverage-matrix", dest="coverage_matrix")
    p.add_argument("--failing-tests", dest="failing_tests")
    p.add_argument("--labels-cache", dest="labels_cache")
    p.add_argument("--seed", type=int)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--percentages", help="comma-separated suite percentages")
    p.add_argument("--project")
    p.add_argument("--bug-id", dest="bug_id")
    p.add_argument("--selector", help="regex matched against test method names")

    s = sub.add_parser("serve", parents=[common], help="serve an output directory as JSON")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=5000)
    return parser


_OVERRIDE_KEYS = (
    "sources", "roots", "out_dir", "workers", "oracles", "selector", "assert_prefixes",
    "recursion_as_iteration", "strict_loop_bodies", "no_inherited", "labels_cache",
    "kill_matrix", "coverage_matrix", "failing_tests", "seed", "repetitions", "project", "bug_id",
)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    roots = getattr(args, "roots", None)
    overrides["roots"] = _split(",".join(roots)) if roots else None
    overrides["formats"] = _split(getattr(args, "formats", None))
    overrides["percentages"] = _split(getattr(args, "percentages", None))
    return load_run_config(args.config, overrides)


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    diagnostics_log.handlers = [handler]
    diagnostics_log.propagate = False
    diagnostics_log.setLevel(logging.DEBUG if verbose else logging.WARNING)


def emit_diagnostics(diagnostics: Sequence[Diagnostic]) -> None:
    levels = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO}
    for d in diagnostics:
        diagnostics_log.log(levels.get(d.severity, logging.WARNING), d.format())


def provenance(config: RunConfig) -> Dict[str, Any]:
    return {"tool": {"name": TOOL_NAME, "version": TOOL_VERSION}, "config": config.to_dict()}


# --- Shared steps ---

def load_corpus(config: RunConfig) -> SourceCorpus:
    if not config.sources:
        raise ConfigError("No sources configured (use --sources or `sources =` in the config)")
    files = read_source_tree(config.sources)
    try:
        corpus = parse_corpus(files, workers=config.workers)
    except ParseFailure as e:
        emit_diagnostics(e.diagnostics)
        raise
    corpus = resolve_types(corpus)
    emit_diagnostics(corpus.diagnostics)
    return corpus


def build_graphs(corpus: SourceCorpus, config: RunConfig) -> List[TypeGraph]:
    if not config.roots:
        raise ConfigError("No root classes configured (use --root or `roots =` in the config)")
    return [build_type_graph(corpus, r, include_inherited=not config.no_inherited) for r in config.roots]


def analysis_options(config: RunConfig) -> AnalysisOptions:
    return AnalysisOptions(
        strict_loop_bodies=config.strict_loop_bodies,
        recursion_as_iteration=config.recursion_as_iteration,
        assert_prefixes=tuple(config.assert_prefixes),
    )


def _safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in name)


# --- Commands ---

def cmd_graph(config: RunConfig) -> int:
    corpus = load_corpus(config)
    graphs = build_graphs(corpus, config)
    for graph in graphs:
        base = os.path.join(config.out_dir, f"graph-{_safe_name(graph.root)}")
        data = graph_to_json(graph)
        data["provenance"] = provenance(config)
        write_json(base + ".json", data)
        atomic_write_text(base + ".dot", graph_to_dot(graph))
        labels = coverable_labels(graph)
        print(f"{graph.root}: {len(data['nodes'])} nodes, {len(data['edges'])} edges, "
              f"{len(labels)} labels -> {base}.json")
    return EXIT_OK


def compute_coverage(config: RunConfig):
    corpus = load_corpus(config)
    graphs = build_graphs(corpus, config)
    universe = merge_label_universes(graphs)
    oracles = extract_oracles(corpus, config.roots, config.oracles, config.selector, config.assert_prefixes)
    result = state_field_coverage(corpus, oracles, universe, analysis_options(config), config.workers)
    emit_diagnostics(result.diagnostics)
    return corpus, graphs, oracles, result


def cmd_coverage(config: RunConfig) -> int:
    _, graphs, oracles, result = compute_coverage(config)
    report = uncovered_report(result)
    out = config.out_dir
    if "json" in config.formats:
        data = result.to_dict()
        data["graphs"] = [{"root": g.root, "labels": len(coverable_labels(g))} for g in graphs]
        data["provenance"] = provenance(config)
        write_json(os.path.join(out, "coverage.json"), data)
        uncovered = report.to_dict()
        uncovered["provenance"] = provenance(config)
        write_json(os.path.join(out, "uncovered.json"), uncovered)
    if "csv" in config.formats:
        write_csv(os.path.join(out, "coverage.csv"), COVERAGE_CSV_HEADER, coverage_rows(result))
    if "text" in config.formats:
        atomic_write_text(os.path.join(out, "coverage.txt"), report.to_text())

    if config.oracles == MODE_TESTS:
        per_test = {o.oracle_id: o.covered for o in result.per_oracle}
        ids = harness_test_ids(oracles)
        records = [TestRecord(ids[o.id], per_test[o.id]) for o in oracles]
        save_label_cache(config.labels_cache or os.path.join(out, "labels.json"),
                         result.universe, records, provenance(config))
    print(report.to_text(), end="")
    return EXIT_OK


def _label_records(config: RunConfig) -> Tuple[LabelSet, List[TestRecord]]:
    """Per-test labels from the cache, or computed from sources (and cached)."""
    if config.labels_cache and os.path.exists(config.labels_cache):
        return load_label_cache(config.labels_cache)
    if not config.sources:
        raise ConfigError("prioritize needs an existing labels cache or sources and roots")
    tests_config = config.merged({"oracles": MODE_TESTS})
    _, _, oracles, result = compute_coverage(tests_config)
    per_test = {o.oracle_id: o.covered for o in result.per_oracle}
    ids = harness_test_ids(oracles)
    records = [TestRecord(ids[o.id], per_test[o.id]) for o in oracles]
    save_label_cache(config.labels_cache or os.path.join(config.out_dir, "labels.json"),
                     result.universe, records, provenance(config))
    return result.universe, records


def _safe_apfd(order: Sequence[str], matrix) -> Optional[float]:
    try:
        return apfd(order, matrix)
    except NoDetectableFaults:
        return None


def cmd_prioritize(config: RunConfig) -> int:
    universe, records = _label_records(config)
    matrix = load_kill_matrix(config.kill_matrix) if config.kill_matrix else None
    coverage = load_coverage_matrix(config.coverage_matrix) if config.coverage_matrix else None
    failing = load_failing_tests(config.failing_tests) if config.failing_tests else None

    if matrix is not None:
        known = {r.test_id for r in records}
        unknown = [t for t in matrix.tests if t not in known]
        if unknown:
            logger.warning("%d kill-matrix test(s) have no label record: %s",
                           len(unknown), ", ".join(unknown[:5]))
        records = records + [TestRecord(t) for t in unknown]

    sfc = greedy_sfc_order(records, universe, matrix)
    randoms = random_order(records, config.seed, config.repetitions, universe, matrix)
    mean = average_curve(randoms)
    orderings = [sfc, *randoms, mean]
    statement = None
    if coverage is not None:
        statement = greedy_statement_order(records, coverage, universe, matrix)
        orderings.append(statement)

    out = config.out_dir
    write_curves(out, orderings)

    progressions: Dict[str, List[tuple]] = {}
    apfd_summary: Dict[str, Any] = {}
    if matrix is not None:
        scored = [sfc, *randoms] + ([statement] if statement else [])
        for o in scored:
            progressions[o.name] = apfd_progression(o.order, matrix, config.percentages)
            apfd_summary[o.name] = _safe_apfd(o.order, matrix)
        rand_rows = [progressions[r.name] for r in randoms]
        progressions[STRATEGY_RANDOM_MEAN] = [
            (pct, k, _mean_defined([rows[i][2] for rows in rand_rows]))
            for i, (pct, k, _) in enumerate(rand_rows[0])
        ]
        apfd_summary[STRATEGY_RANDOM_MEAN] = _mean_defined([apfd_summary[r.name] for r in randoms])
    write_apfd(out, progressions)

    ff_row = None
    if failing is not None:
        ff_row = first_fault_row(config.project, config.bug_id, len(records),
                                 sfc.order, [r.order for r in randoms], failing)
        for o in [sfc, *randoms] + ([statement] if statement else []):
            o.first_fault = first_fault_index(o.order, failing)
    write_first_fault(out, ff_row)

    growth = random_subset_growth(records, universe, matrix, config.seed,
                                  runs=config.repetitions, percentages=config.percentages)
    write_growth(out, growth)

    report: Dict[str, Any] = {
        "provenance": provenance(config),
        "tests": len(records),
        "universe": len(universe),
        "kill_matrix": matrix.to_dict() if matrix else None,
        "orderings": [o.to_dict() for o in orderings],
        "apfd": apfd_summary,
        "first_fault": ff_row,
        "first_fault_summary": first_fault_summary([ff_row]) if ff_row else None,
        "growth": [{k: v for k, v in g.items() if k != "samples"} for g in growth],
        "correlation_pairs": [list(p) for p in correlation_pairs(growth)],
    }
    if coverage is not None:
        subset = similar_coverage_subset([r.test_id for r in records], coverage)
        chosen = [r for r in records if r.test_id in set(subset)]
        report["similar_coverage_subset"] = {
            "tests": subset,
            "sfc_order": greedy_sfc_order(chosen, universe, matrix).to_dict() if chosen else None,
        }
    write_report(out, report)
    print(f"Prioritized {len(records)} test(s) over {len(universe)} label(s) -> {out}")
    return EXIT_OK


def _mean_defined(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return sum(present) / len(present) if present else None


def cmd_serve(config: RunConfig, host: str, port: int) -> int:
    from app import create_app

    create_app(config.out_dir).run(host=host, port=port)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        config = config_from_args(args)
        if args.command == "graph":
            return cmd_graph(config)
        if args.command == "coverage":
            return cmd_coverage(config)
        if args.command == "prioritize":
            return cmd_prioritize(config)
        return cmd_serve(config, args.host, args.port)
    except SfcovError as e:
        logger.error("%s", e)
        return e.exit_code
