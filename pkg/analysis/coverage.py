"""
State field coverage: covered labels per oracle and the SFC ratio.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

from models.coverage import CoverageResult, OracleCoverage, OracleSpec, ReachableCode
from models.graph import Label, LabelSet
from models.source import Diagnostic, SourceCorpus
from parsing.resolve import resolve_types

from .reachability import AnalysisOptions, reachable_code

logger = logging.getLogger(__name__)


def covered_labels(reach: ReachableCode, universe: LabelSet) -> LabelSet:
    """Labels of `universe` touched by the reachable field accesses.

    A plain label is covered by any access to its field; the plus label additionally
    needs the access to happen in loop context. Accesses through a receiver of unknown
    type match every universe field with that name.
    """
    by_name: Dict[str, List[Label]] = {}
    for label in universe.plain():
        by_name.setdefault(label.field, []).append(label)

    covered: set[Label] = set()
    for access in reach.accesses:
        if access.declaring_class is None:
            candidates = by_name.get(access.field, [])
        else:
            plain = Label(access.declaring_class, access.field)
            candidates = [plain] if plain in universe else []
        for plain in candidates:
            covered.add(plain)
            if access.in_loop and plain.plus() in universe:
                covered.add(plain.plus())
    return LabelSet(covered)


def sfc_ratio(covered: LabelSet, universe: LabelSet) -> Optional[float]:
    if len(universe) == 0:
        return None
    return len(covered) / len(universe)


def _dedupe(diagnostics: Sequence[Diagnostic]) -> List[Diagnostic]:
    seen = set()
    out: List[Diagnostic] = []
    for d in diagnostics:
        key = (d.path, d.line, d.message)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def state_field_coverage(
    corpus: SourceCorpus,
    oracles: Sequence[OracleSpec],
    universe: LabelSet,
    options: AnalysisOptions = AnalysisOptions(),
    workers: int = 1,
) -> CoverageResult:
    """Compute per-oracle and aggregate SFC over a label universe.

    The aggregate covered set is the union over all oracles. An empty universe (a
    stateless target) yields sfc=None and an empty-universe diagnostic naming the
    targets. Oracles are analyzed independently, on a thread pool when workers > 1.
    """
    corpus = resolve_types(corpus)
    targets: List[str] = []
    for oracle in oracles:
        for t in oracle.targets:
            if t not in targets:
                targets.append(t)

    def analyze(oracle: OracleSpec) -> ReachableCode:
        return reachable_code(corpus, oracle, options)

    if workers > 1 and len(oracles) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reaches = list(pool.map(analyze, oracles))
    else:
        reaches = [analyze(o) for o in oracles]

    per_oracle: List[OracleCoverage] = []
    union = LabelSet()
    diagnostics: List[Diagnostic] = []
    for oracle, reach in zip(oracles, reaches):
        covered = covered_labels(reach, universe)
        per_oracle.append(OracleCoverage(oracle.id, covered, sfc_ratio(covered, universe)))
        union = union | covered
        diagnostics.extend(reach.diagnostics)

    if len(universe) == 0:
        names = ", ".join(targets) or "<none>"
        for target in targets or [None]:
            cls = corpus.classes.get(target) if target else None
            diagnostics.append(Diagnostic(
                cls.path if cls else "",
                cls.span.line if cls and cls.span else 0,
                f"stateless target {target or '<none>'}: no coverable labels; SFC is NA",
                "warning", "empty-universe",
            ))
        logger.warning("Stateless target(s) %s: SFC reported as NA", names)

    result = CoverageResult(
        universe=universe,
        covered=union,
        sfc=sfc_ratio(union, universe),
        targets=tuple(targets),
        per_oracle=per_oracle,
        diagnostics=_dedupe(diagnostics),
    )
    logger.info("SFC over %d label(s) from %d oracle(s): %s",
                len(universe), len(oracles), "NA" if result.sfc is None else f"{result.sfc:.3f}")
    return result


def aggregate_sfc(results: Sequence[CoverageResult], exclude_stateless: bool = False) -> Dict[str, object]:
    """Mean SFC across targets. NA counts as 0 and sets the warning flag, unless
    stateless targets are excluded outright."""
    values: List[float] = []
    na = 0
    for r in results:
        if r.sfc is None:
            na += 1
            if exclude_stateless:
                continue
            values.append(0.0)
        else:
            values.append(r.sfc)
    return {
        "mean": sum(values) / len(values) if values else None,
        "targets": len(results),
        "na": na,
        "warning": na > 0 and not exclude_stateless,
    }
