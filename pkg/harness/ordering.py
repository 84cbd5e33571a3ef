"""
Test orderings: additional-greedy by SFC labels or by statements, seeded random
shuffles, and the similar-statement-coverage subset.
"""
from __future__ import annotations

import logging
import random
from typing import Dict, FrozenSet, List, Optional, Sequence

from models.constants import (
    DEFAULT_REPETITIONS,
    DEFAULT_SIMILARITY_TOLERANCE,
    STRATEGY_RANDOM,
    STRATEGY_SFC,
    STRATEGY_STATEMENT,
)
from models.graph import LabelSet
from models.harness import CoverageMatrix, KillMatrix, OrderingResult, PrefixMetrics, TestRecord

logger = logging.getLogger(__name__)


def additional_greedy(items: Dict[str, FrozenSet]) -> List[str]:
    """Repeatedly pick the item adding the most uncovered elements, ties broken by id.

    Once nothing left adds coverage, the remaining items follow in id order.
    """
    remaining = sorted(items)
    covered: set = set()
    order: List[str] = []
    while remaining:
        best, best_gain = _best(remaining, items, covered)
        if best_gain == 0:
            order.extend(remaining)
            break
        order.append(best)
        remaining.remove(best)
        covered |= items[best]
    return order


def _best(remaining: Sequence[str], items: Dict[str, FrozenSet], covered: set) -> tuple:
    best, best_gain = remaining[0], -1
    for item in remaining:
        gain = len(items[item] - covered)
        if gain > best_gain:
            best, best_gain = item, gain
    return best, best_gain


def prefix_metrics(
    order: Sequence[str],
    records: Dict[str, TestRecord],
    universe: LabelSet,
    matrix: Optional[KillMatrix] = None,
) -> List[PrefixMetrics]:
    """SFC, label count, statement count and mutation score for every prefix."""
    labels: set = set()
    statements: set = set()
    killed: set = set()
    scorable = set(matrix.scorable_mutants) if matrix is not None else set()
    has_statements = any(r.statements is not None for r in records.values())
    out: List[PrefixMetrics] = []
    for k, test_id in enumerate(order, start=1):
        record = records.get(test_id)
        if record is not None:
            labels |= record.labels.frozen & universe.frozen
            if record.statements:
                statements |= record.statements
        score = None
        if matrix is not None:
            if test_id in matrix.outcomes:
                killed |= matrix.killed_by(test_id) & scorable
            score = len(killed) / len(scorable) if scorable else None
        out.append(PrefixMetrics(
            size=k,
            labels=len(labels),
            sfc=len(labels) / len(universe) if len(universe) else None,
            statements=len(statements) if has_statements else None,
            mutation_score=score,
        ))
    return out


def greedy_sfc_order(tests: Sequence[TestRecord], universe: LabelSet,
                     matrix: Optional[KillMatrix] = None) -> OrderingResult:
    items = {t.test_id: t.labels.frozen & universe.frozen for t in tests}
    order = additional_greedy(items)
    records = {t.test_id: t for t in tests}
    return OrderingResult(STRATEGY_SFC, order, prefix_metrics(order, records, universe, matrix))


def random_order(
    tests: Sequence[TestRecord],
    seed: int,
    repetitions: int = DEFAULT_REPETITIONS,
    universe: LabelSet = LabelSet(),
    matrix: Optional[KillMatrix] = None,
) -> List[OrderingResult]:
    """`repetitions` shuffles; repetition r uses a generator seeded by (seed, r), so each
    shuffle is reproducible and independent of input order."""
    ids = sorted(t.test_id for t in tests)
    records = {t.test_id: t for t in tests}
    results: List[OrderingResult] = []
    for rep in range(repetitions):
        rng = random.Random(f"{seed}:{rep}")
        order = list(ids)
        rng.shuffle(order)
        results.append(OrderingResult(
            STRATEGY_RANDOM, order, prefix_metrics(order, records, universe, matrix),
            seed=seed, repetition=rep,
        ))
    return results


def greedy_statement_order(
    tests: Sequence[TestRecord],
    coverage: CoverageMatrix,
    universe: LabelSet = LabelSet(),
    matrix: Optional[KillMatrix] = None,
) -> OrderingResult:
    """Additional greedy over statement sets; tests absent from the matrix cover nothing."""
    missing = [t.test_id for t in tests if t.test_id not in coverage.covered]
    if missing:
        logger.warning("%d test(s) missing from the coverage matrix; treated as covering nothing: %s",
                       len(missing), ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else ""))
    items = {t.test_id: coverage.covered.get(t.test_id, frozenset()) for t in tests}
    records = {t.test_id: TestRecord(t.test_id, t.labels, items[t.test_id]) for t in tests}
    order = additional_greedy(items)
    return OrderingResult(STRATEGY_STATEMENT, order, prefix_metrics(order, records, universe, matrix))


def similar_coverage_subset(
    tests: Sequence[str],
    coverage: CoverageMatrix,
    tolerance: float = DEFAULT_SIMILARITY_TOLERANCE,
) -> List[str]:
    """Largest set of tests whose statement-coverage ratios lie within `tolerance` of
    each other. Among equally large windows the one with the lowest ratios wins.
    Returned in id order."""
    ranked = sorted((coverage.ratio(t), t) for t in tests)
    best_start, best_len = 0, 0
    start = 0
    for end in range(len(ranked)):
        while ranked[end][0] - ranked[start][0] > tolerance + 1e-12:
            start += 1
        if end - start + 1 > best_len:
            best_start, best_len = start, end - start + 1
    return sorted(t for _, t in ranked[best_start:best_start + best_len])
