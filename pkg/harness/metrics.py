"""
Effectiveness metrics over orderings: mutation score, APFD and its progression,
first-fault index, per-prefix curves, random-subset growth, and the first-fault
summary rows.
"""
from __future__ import annotations

import logging
import random
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

from models.constants import DEFAULT_PERCENTAGES, STRATEGY_RANDOM_MEAN
from models.errors import NoDetectableFaults, UnknownTestId
from models.graph import LabelSet
from models.harness import KillMatrix, OrderingResult, PrefixMetrics, TestRecord

logger = logging.getLogger(__name__)

FaultTable = Union[KillMatrix, Mapping[str, Set[str]]]


def mutation_score(matrix: KillMatrix, tests: Sequence[str]) -> Optional[float]:
    """Killed / non-trivial mutants for a set of tests; None when every mutant is trivial."""
    killed: Set[str] = set()
    for t in tests:
        if t not in matrix.outcomes:
            raise UnknownTestId(t)
        killed |= matrix.killed_by(t)
    scorable = set(matrix.scorable_mutants)
    if not scorable:
        return None
    return len(killed & scorable) / len(scorable)


def _prefix_size(percent: int, n: int) -> int:
    return max(1, -(-percent * n // 100))


def apfd(order: Sequence[str], faults: FaultTable) -> float:
    """Average percentage of faults detected.

    APFD = 1 - sum(TF_i) / (n * m) + 1 / (2n), where TF_i is the 1-based position of
    the first test detecting fault i. Faults no test in the ordering detects are left
    out of m; if none remain, NoDetectableFaults is raised.
    """
    table = faults.detections() if isinstance(faults, KillMatrix) else faults
    n = len(order)
    position = {t: i for i, t in enumerate(order, start=1)}
    firsts: List[int] = []
    for detecting in table.values():
        hits = [position[t] for t in detecting if t in position]
        if hits:
            firsts.append(min(hits))
    if n == 0 or not firsts:
        raise NoDetectableFaults(f"No fault is detected by the {n} test(s) of this ordering")
    m = len(firsts)
    return 1 - sum(firsts) / (n * m) + 1 / (2 * n)


def apfd_progression(
    order: Sequence[str],
    faults: FaultTable,
    percentages: Sequence[int] = DEFAULT_PERCENTAGES,
) -> List[Tuple[int, int, Optional[float]]]:
    """APFD of growing prefixes: (percent, prefix size, apfd or None)."""
    rows: List[Tuple[int, int, Optional[float]]] = []
    for pct in percentages:
        k = _prefix_size(pct, len(order)) if order else 0
        try:
            value: Optional[float] = apfd(order[:k], faults)
        except NoDetectableFaults:
            value = None
        rows.append((pct, k, value))
    return rows


def first_fault_index(order: Sequence[str], failing: Sequence[str]) -> Optional[int]:
    """1-based position of the first failing test, or None if none appears."""
    failing_set = set(failing)
    for i, t in enumerate(order, start=1):
        if t in failing_set:
            return i
    return None


# --- Curves ---

CURVE_HEADER = ("strategy", "prefix", "labels", "sfc", "statements", "mutation_score")


def _mean(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return sum(present) / len(present) if present else None


def average_curve(orderings: Sequence[OrderingResult]) -> OrderingResult:
    """Per-prefix mean of several orderings of the same suite (the random baseline)."""
    size = min((len(o.prefixes) for o in orderings), default=0)
    prefixes: List[PrefixMetrics] = []
    for k in range(size):
        rows = [o.prefixes[k] for o in orderings]
        prefixes.append(PrefixMetrics(
            size=k + 1,
            labels=_mean([r.labels for r in rows]),
            sfc=_mean([r.sfc for r in rows]),
            statements=_mean([r.statements for r in rows]),
            mutation_score=_mean([r.mutation_score for r in rows]),
        ))
    return OrderingResult(STRATEGY_RANDOM_MEAN, [], prefixes)


def prefix_curves(orderings: Sequence[OrderingResult]) -> List[List[Any]]:
    """Rows of CURVE_HEADER for every prefix of every ordering."""
    rows: List[List[Any]] = []
    for o in orderings:
        for p in o.prefixes:
            rows.append([o.name, p.size, p.labels, p.sfc, p.statements, p.mutation_score])
    return rows


def random_subset_growth(
    tests: Sequence[TestRecord],
    universe: LabelSet,
    matrix: Optional[KillMatrix],
    seed: int,
    runs: int = 10,
    percentages: Sequence[int] = DEFAULT_PERCENTAGES,
) -> List[Dict[str, Any]]:
    """Mean SFC and mutation score of random test subsets of growing size.

    Each row keeps its raw (sfc, score) samples for correlation_pairs.
    """
    ids = sorted(t.test_id for t in tests)
    records = {t.test_id: t for t in tests}
    rows: List[Dict[str, Any]] = []
    for pct in percentages:
        k = _prefix_size(pct, len(ids)) if ids else 0
        samples: List[Tuple[Optional[float], Optional[float]]] = []
        for run in range(runs):
            rng = random.Random(f"{seed}:growth:{pct}:{run}")
            subset = rng.sample(ids, k)
            labels: set = set()
            for t in subset:
                labels |= records[t].labels.frozen & universe.frozen
            sfc = len(labels) / len(universe) if len(universe) else None
            score = None
            if matrix is not None:
                score = mutation_score(matrix, [t for t in subset if t in matrix.outcomes])
            samples.append((sfc, score))
        rows.append({
            "percent": pct,
            "size": k,
            "sfc": _mean([s for s, _ in samples]),
            "mutation_score": _mean([m for _, m in samples]),
            "samples": samples,
        })
    return rows


def correlation_pairs(rows: Sequence[Dict[str, Any]]) -> List[Tuple[float, float]]:
    """Raw (sfc, mutation score) samples with both values present."""
    return [
        (s, m)
        for row in rows
        for s, m in row.get("samples", [])
        if s is not None and m is not None
    ]


# --- First-fault table ---

FIRST_FAULT_HEADER = ("Project", "Bug ID", "#Tests", "SFC", "Random")


def first_fault_row(
    project: str,
    bug_id: str,
    n_tests: int,
    sfc_order: Sequence[str],
    random_orders: Sequence[Sequence[str]],
    failing: Sequence[str],
) -> Dict[str, Any]:
    """Index of the first failing test under SFC ordering and the mean over the
    random repetitions."""
    return {
        "Project": project,
        "Bug ID": bug_id,
        "#Tests": n_tests,
        "SFC": first_fault_index(sfc_order, failing),
        "Random": _mean([first_fault_index(o, failing) for o in random_orders]),
    }


def first_fault_summary(rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """How often SFC ordering reaches the first failing test sooner than random, and
    the mean relative saving ((random - sfc) / random) over those bugs."""
    better: List[float] = []
    worse = ties = 0
    for row in rows:
        sfc, rnd = row.get("SFC"), row.get("Random")
        if sfc is None or rnd is None:
            continue
        if sfc < rnd:
            better.append((rnd - sfc) / rnd)
        elif sfc > rnd:
            worse += 1
        else:
            ties += 1
    return {
        "bugs": len(rows),
        "times_better": len(better),
        "times_worse": worse,
        "ties": ties,
        "average_improvement": sum(better) / len(better) if better else None,
    }
