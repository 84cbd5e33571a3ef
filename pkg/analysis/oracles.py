"""
Oracle extraction: invariant methods, test methods with their assertion calls, and
the decomposition of an invariant into property subsets.
"""
from __future__ import annotations

import itertools
import logging
import re
from typing import Dict, Iterable, List, Optional, Sequence, Union

from models.constants import (
    DEFAULT_ASSERT_PREFIXES,
    DEFAULT_INVARIANT_PATTERN,
    DEFAULT_TEST_PATTERN,
    MODE_INVARIANTS,
    MODE_TESTS,
    ORACLE_MODES,
    TEST_ANNOTATIONS,
)
from models.coverage import CoverageResult, OracleSpec
from models.errors import ConfigError, NoOraclesFound
from models.source import EXPR_CALL, STMT_ASSERT, Expr, MethodDecl, SourceCorpus
from parsing.resolve import locate_method

from .type_graph import find_root

logger = logging.getLogger(__name__)

Selector = Union[str, Sequence[str], None]


def compile_selector(selector: Selector, mode: str) -> "re.Pattern[str]":
    """A regex (full match) or an explicit list of method names."""
    if selector is None or selector == "":
        pattern = DEFAULT_INVARIANT_PATTERN if mode == MODE_INVARIANTS else DEFAULT_TEST_PATTERN
    elif isinstance(selector, str):
        pattern = selector
    else:
        pattern = "|".join(re.escape(name) for name in selector)
    try:
        return re.compile(pattern)
    except re.error as e:
        raise ConfigError(f"Invalid selector {pattern!r}: {e}") from e


def test_id(oracle: OracleSpec) -> str:
    """Harness-facing id of a test oracle: `Class#method` (arity dropped)."""
    return oracle.id.rsplit("/", 1)[0]


def harness_test_ids(oracles: Sequence[OracleSpec]) -> Dict[str, str]:
    """Map oracle ids to harness ids. Overloads that would share a `Class#method` id
    keep their arity suffix instead."""
    short: Dict[str, List[str]] = {}
    for oracle in oracles:
        short.setdefault(test_id(oracle), []).append(oracle.id)
    ids: Dict[str, str] = {}
    for name, full in short.items():
        if len(full) > 1:
            logger.warning("%d test oracles share the id %s; keeping arity: %s",
                           len(full), name, ", ".join(full))
        for oracle_id in full:
            ids[oracle_id] = oracle_id if len(full) > 1 else name
    return ids


def is_assertion_call(expr: Expr, prefixes: Sequence[str]) -> bool:
    return expr.kind == EXPR_CALL and any(expr.name.startswith(p) for p in prefixes)


def collect_assertions(method: MethodDecl, prefixes: Sequence[str] = DEFAULT_ASSERT_PREFIXES) -> List[Expr]:
    """Assertion call expressions in a test body, plus the condition of Java `assert`
    statements, in source order."""
    found: List[Expr] = []
    for stmt in method.statements():
        if stmt.kind == STMT_ASSERT and stmt.exprs:
            found.append(stmt.exprs[0])
        for root in stmt.exprs:
            found.extend(e for e in root.walk() if is_assertion_call(e, prefixes))
    return found


def _is_test_method(method: MethodDecl, pattern: "re.Pattern[str]") -> bool:
    if method.is_constructor:
        return False
    if TEST_ANNOTATIONS.intersection(method.annotations):
        return True
    return pattern.fullmatch(method.name) is not None


def extract_oracles(
    corpus: SourceCorpus,
    targets: Iterable[str],
    mode: str = MODE_INVARIANTS,
    selector: Selector = None,
    assert_prefixes: Sequence[str] = DEFAULT_ASSERT_PREFIXES,
) -> List[OracleSpec]:
    """Collect the oracles of the chosen mode.

    invariants: boolean methods of each target class whose name matches the selector.
    tests: methods anywhere in the corpus marked @Test or matching the selector; their
    assertion calls are recorded as seeds (a test without assertions still yields an
    oracle with no seeds).

    Raises NoOraclesFound when nothing matches.
    """
    if mode not in ORACLE_MODES:
        raise ConfigError(f"Unknown oracle mode {mode!r}")
    pattern = compile_selector(selector, mode)
    if not corpus.classes:
        raise NoOraclesFound("Corpus declares no classes")
    roots = tuple(find_root(corpus, t).qualified for t in targets)
    oracles: List[OracleSpec] = []

    if mode == MODE_INVARIANTS:
        for root in roots:
            cls = corpus.classes[root]
            for m in cls.methods:
                if m.is_constructor or not m.returns_boolean or not pattern.fullmatch(m.name):
                    continue
                oracles.append(OracleSpec(
                    id=m.key,
                    mode=MODE_INVARIANTS,
                    targets=roots,
                    entry_points=((cls.qualified, m.name, m.arity),),
                ))
    else:
        for method in corpus.methods():
            if not _is_test_method(method, pattern):
                continue
            oracles.append(OracleSpec(
                id=method.key,
                mode=MODE_TESTS,
                targets=roots,
                test_method=method.key,
                assertions=collect_assertions(method, assert_prefixes),
            ))

    if not oracles:
        raise NoOraclesFound(
            f"No {mode} oracles matched {pattern.pattern!r} in {len(corpus.classes)} class(es)"
        )
    logger.info("Extracted %d %s oracle(s)", len(oracles), mode)
    return oracles


def decompose_properties(corpus: SourceCorpus, root: str, properties: Sequence[str]) -> List[OracleSpec]:
    """Every non-empty subset of the property methods as one conjunctive invariant oracle.

    Subsets are ordered by size, then lexicographically; `k` properties give 2^k - 1
    oracles.
    """
    cls = find_root(corpus, root)
    names = sorted(set(properties))
    for name in names:
        locate_method(corpus, cls.qualified, name, 0)
    oracles: List[OracleSpec] = []
    for k in range(1, len(names) + 1):
        for subset in itertools.combinations(names, k):
            oracles.append(OracleSpec(
                id=f"{cls.qualified}{{{','.join(subset)}}}",
                mode=MODE_INVARIANTS,
                targets=(cls.qualified,),
                entry_points=tuple((cls.qualified, n, 0) for n in subset),
            ))
    return oracles


def mean_sfc_by_property_count(oracles: Sequence[OracleSpec], result: CoverageResult) -> Dict[int, float]:
    """Average per-oracle SFC grouped by the number of properties the oracle checks.
    NA counts as 0."""
    by_id = {o.oracle_id: o.sfc for o in result.per_oracle}
    grouped: Dict[int, List[float]] = {}
    for oracle in oracles:
        sfc: Optional[float] = by_id.get(oracle.id)
        grouped.setdefault(len(oracle.entry_points), []).append(sfc or 0.0)
    return {k: sum(v) / len(v) for k, v in sorted(grouped.items())}
