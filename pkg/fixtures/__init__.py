"""
Golden corpus: small Java sources with their expected type graphs and coverage.

Each fixture lives in `fixtures/<name>/` with `src/*.java`, `expected_graph.json`
and `expected_coverage.json`. Expectations are data, so tests only compare.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from models.errors import UnknownFixture
from models.graph import LabelSet
from models.source import SourceCorpus
from parsing import parse_corpus, resolve_types

FIXTURES_DIR = os.path.dirname(os.path.abspath(__file__))


@dataclass
class FixtureCase:
    name: str
    path: str
    sources: Dict[str, str] = field(default_factory=dict)
    expected_graph: Dict[str, Any] = field(default_factory=dict)
    expected_coverage: Dict[str, Any] = field(default_factory=dict)

    @property
    def src_dir(self) -> str:
        return os.path.join(self.path, "src")

    @property
    def root(self) -> str:
        return self.expected_graph["root"]

    @property
    def mode(self) -> str:
        return self.expected_coverage.get("mode", "invariants")

    @property
    def selector(self) -> Optional[str]:
        return self.expected_coverage.get("selector")

    @property
    def properties(self) -> List[str]:
        return list(self.expected_coverage.get("properties", []))

    @property
    def universe(self) -> LabelSet:
        return LabelSet.from_list(self.expected_graph.get("labels", []))

    def corpus(self) -> SourceCorpus:
        """Parsed and resolved sources."""
        return resolve_types(parse_corpus(sorted(self.sources.items())))

    def expected_oracle(self, oracle_id: str) -> Dict[str, Any]:
        for o in self.expected_coverage.get("oracles", []):
            if o["id"] == oracle_id:
                return o
        raise KeyError(oracle_id)


def list_fixtures() -> List[str]:
    return sorted(
        name for name in os.listdir(FIXTURES_DIR)
        if os.path.isfile(os.path.join(FIXTURES_DIR, name, "expected_graph.json"))
    )


def _load_json(path: str) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_fixture(name: str) -> FixtureCase:
    """Load one fixture by name; raises UnknownFixture for anything not listed."""
    if name not in list_fixtures():
        raise UnknownFixture(name)
    path = os.path.join(FIXTURES_DIR, name)
    src = os.path.join(path, "src")
    sources: Dict[str, str] = {}
    for fname in sorted(os.listdir(src)):
        if fname.endswith(".java"):
            with open(os.path.join(src, fname), encoding="utf-8") as fh:
                sources[os.path.join(src, fname)] = fh.read()
    return FixtureCase(
        name=name,
        path=path,
        sources=sources,
        expected_graph=_load_json(os.path.join(path, "expected_graph.json")),
        expected_coverage=_load_json(os.path.join(path, "expected_coverage.json")),
    )
