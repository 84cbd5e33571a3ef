"""
Oracle and coverage DTOs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .constants import MODE_INVARIANTS
from .graph import LabelSet
from .source import Diagnostic, Expr


@dataclass
class OracleSpec:
    """One oracle: an invariant method (or conjunction of several) or a test method whose
    assertion arguments seed reachability."""

    id: str
    mode: str = MODE_INVARIANTS
    targets: Tuple[str, ...] = ()
    entry_points: Tuple[Tuple[str, str, int], ...] = ()  # (class, method, arity)
    test_method: Optional[str] = None  # method key, tests mode only
    assertions: List[Expr] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "mode": self.mode,
            "targets": list(self.targets),
            "entry_points": [f"{c}#{m}/{a}" for c, m, a in self.entry_points],
            "test_method": self.test_method,
            "assertions": len(self.assertions),
        }


@dataclass(frozen=True)
class FieldAccess:
    """A field read or write reached from an oracle. `declaring_class` is None when the
    receiver's static type is unknown."""

    declaring_class: Optional[str]
    field: str
    in_loop: bool
    method: str
    line: int = 0


@dataclass
class ReachableCode:
    """Statements and field accesses reached from an oracle's entry points.

    `statements` maps (method key, statement index) to the in-loop flag; `methods`
    maps each reached method key to whether it was ever entered in loop context."""

    statements: Dict[Tuple[str, int], bool] = field(default_factory=dict)
    methods: Dict[str, bool] = field(default_factory=dict)
    accesses: List[FieldAccess] = field(default_factory=list)
    call_edges: List[Tuple[str, str]] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    def mark(self, key: Tuple[str, int], in_loop: bool) -> None:
        self.statements[key] = self.statements.get(key, False) or in_loop


@dataclass
class OracleCoverage:
    oracle_id: str
    covered: LabelSet
    sfc: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.oracle_id, "covered": self.covered.to_list(), "sfc": self.sfc}


@dataclass
class CoverageResult:
    """Aggregate coverage of a set of oracles against a label universe. `sfc` is None
    (reported as NA) when the universe is empty."""

    universe: LabelSet
    covered: LabelSet
    sfc: Optional[float]
    targets: Tuple[str, ...] = ()
    per_oracle: List[OracleCoverage] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def uncovered(self) -> LabelSet:
        return self.universe - self.covered

    @property
    def is_na(self) -> bool:
        return self.sfc is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "targets": list(self.targets),
            "universe": self.universe.to_list(),
            "aggregate": {
                "covered": self.covered.to_list(),
                "uncovered": self.uncovered.to_list(),
                "sfc": self.sfc,
            },
            "per_oracle": [o.to_dict() for o in self.per_oracle],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }
