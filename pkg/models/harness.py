"""
Harness DTOs: per-test label records, kill and statement-coverage matrices, orderings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Set

from .constants import OUTCOME_KILLED, OUTCOME_TRIVIAL
from .graph import LabelSet


@dataclass
class TestRecord:
    test_id: str
    labels: LabelSet = field(default_factory=LabelSet)
    statements: Optional[FrozenSet[str]] = None

    __test__ = False  # not a pytest class

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"test_id": self.test_id, "labels": self.labels.to_list()}
        if self.statements is not None:
            data["statements"] = sorted(self.statements)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TestRecord":
        stmts = data.get("statements")
        return cls(
            test_id=data.get("test_id", ""),
            labels=LabelSet.from_list(data.get("labels", [])),
            statements=frozenset(stmts) if stmts is not None else None,
        )


@dataclass
class KillMatrix:
    """Per (test, mutant) outcome: K killed, S survived, T trivial (crashed before any oracle).
    A mutant is trivial for the suite when every test marks it T."""

    tests: List[str] = field(default_factory=list)
    mutants: List[str] = field(default_factory=list)
    outcomes: Dict[str, Dict[str, str]] = field(default_factory=dict)
    path: str = ""

    def outcome(self, test_id: str, mutant: str) -> str:
        return self.outcomes[test_id][mutant]

    @property
    def trivial_mutants(self) -> Set[str]:
        if not self.tests:
            return set()
        return {
            m for m in self.mutants
            if all(self.outcomes[t][m] == OUTCOME_TRIVIAL for t in self.tests)
        }

    @property
    def scorable_mutants(self) -> List[str]:
        trivial = self.trivial_mutants
        return [m for m in self.mutants if m not in trivial]

    def killed_by(self, test_id: str) -> Set[str]:
        row = self.outcomes[test_id]
        return {m for m, code in row.items() if code == OUTCOME_KILLED}

    def detections(self) -> Dict[str, Set[str]]:
        """Non-trivial mutant -> tests that kill it (possibly empty)."""
        scorable = set(self.scorable_mutants)
        table: Dict[str, Set[str]] = {m: set() for m in self.mutants if m in scorable}
        for t in self.tests:
            for m in self.killed_by(t):
                if m in scorable:
                    table[m].add(t)
        return table

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "tests": len(self.tests),
            "mutants": len(self.mutants),
            "trivial": sorted(self.trivial_mutants),
        }


@dataclass
class CoverageMatrix:
    """Statement coverage per test; `statements` is the union over all tests."""

    covered: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    path: str = ""

    @property
    def statements(self) -> FrozenSet[str]:
        out: Set[str] = set()
        for s in self.covered.values():
            out |= s
        return frozenset(out)

    def ratio(self, test_id: str) -> float:
        total = len(self.statements)
        if total == 0:
            return 0.0
        return len(self.covered.get(test_id, frozenset())) / total


@dataclass
class PrefixMetrics:
    size: int
    labels: int
    sfc: Optional[float]
    statements: Optional[int] = None
    mutation_score: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "prefix": self.size,
            "labels": self.labels,
            "sfc": self.sfc,
            "statements": self.statements,
            "mutation_score": self.mutation_score,
        }


@dataclass
class OrderingResult:
    strategy: str
    order: List[str] = field(default_factory=list)
    prefixes: List[PrefixMetrics] = field(default_factory=list)
    seed: Optional[int] = None
    repetition: Optional[int] = None
    first_fault: Optional[int] = None  # 1-based, set when failing tests are known

    @property
    def name(self) -> str:
        if self.repetition is None:
            return self.strategy
        return f"{self.strategy}#{self.repetition}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "name": self.name,
            "seed": self.seed,
            "repetition": self.repetition,
            "order": list(self.order),
            "first_fault": self.first_fault,
            "prefixes": [p.to_dict() for p in self.prefixes],
        }
