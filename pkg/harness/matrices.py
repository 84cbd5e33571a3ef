"""
Loaders for the externally produced harness inputs: kill matrix, statement coverage
matrix, failing-test list, and the per-test label cache sidecar.
"""
from __future__ import annotations

import csv
import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from models.constants import OUTCOME_CODES, TOOL_NAME, TOOL_VERSION
from models.errors import FormatError, UnknownOutcomeCode
from models.graph import LabelSet
from models.harness import CoverageMatrix, KillMatrix, TestRecord

from analysis.report import write_json

logger = logging.getLogger(__name__)


def _read_rows(path: str) -> List[Tuple[int, List[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            return [(reader.line_num, row) for row in reader]
    except OSError as e:
        raise FormatError(path, 0, f"cannot read: {e}") from e
    except (csv.Error, UnicodeDecodeError) as e:
        raise FormatError(path, 0, f"malformed CSV: {e}") from e


def load_kill_matrix(path: str) -> KillMatrix:
    """Parse `test_id,<mutant>...` rows with cells K, S or T.

    Raises FormatError (with the offending line) on a missing header, ragged rows,
    empty or duplicate ids, and UnknownOutcomeCode on any other cell value.
    """
    rows = [(n, r) for n, r in _read_rows(path) if any(c.strip() for c in r)]
    if not rows:
        raise FormatError(path, 1, "missing header row")
    line, header = rows[0]
    header = [h.strip() for h in header]
    if header[0] != "test_id":
        raise FormatError(path, line, f"first column must be 'test_id', found {header[0]!r}")
    mutants = header[1:]
    if any(not m for m in mutants):
        raise FormatError(path, line, "empty mutant id in header")
    if len(set(mutants)) != len(mutants):
        raise FormatError(path, line, "duplicate mutant id in header")

    matrix = KillMatrix(mutants=mutants, path=path)
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise FormatError(path, line, f"expected {len(header)} columns, found {len(row)}")
        test_id = row[0].strip()
        if not test_id:
            raise FormatError(path, line, "empty test id")
        if test_id in matrix.outcomes:
            raise FormatError(path, line, f"duplicate test id {test_id!r}")
        cells: Dict[str, str] = {}
        for mutant, raw in zip(mutants, row[1:]):
            code = raw.strip()
            if code not in OUTCOME_CODES:
                raise UnknownOutcomeCode(path, line, f"unknown outcome code {code!r} for mutant {mutant}")
            cells[mutant] = code
        matrix.tests.append(test_id)
        matrix.outcomes[test_id] = cells
    logger.info("Kill matrix %s: %d test(s) x %d mutant(s), %d trivial",
                path, len(matrix.tests), len(mutants), len(matrix.trivial_mutants))
    return matrix


def load_coverage_matrix(path: str) -> CoverageMatrix:
    """Parse `test_id,stmt;stmt;...` rows; a leading `test_id` header row is optional."""
    matrix = CoverageMatrix(path=path)
    for index, (line, row) in enumerate(_read_rows(path)):
        if not any(c.strip() for c in row):
            continue
        if index == 0 and row[0].strip() == "test_id":
            continue
        if len(row) not in (1, 2):
            raise FormatError(path, line, f"expected 2 columns, found {len(row)}")
        test_id = row[0].strip()
        if not test_id:
            raise FormatError(path, line, "empty test id")
        if test_id in matrix.covered:
            raise FormatError(path, line, f"duplicate test id {test_id!r}")
        stmts = row[1] if len(row) == 2 else ""
        matrix.covered[test_id] = frozenset(s.strip() for s in stmts.split(";") if s.strip())
    return matrix


def load_failing_tests(path: str) -> List[str]:
    """One test id per line. Blank lines and lines starting with `#` are skipped; ids
    themselves contain `#` (Class#method), so anything after the first whitespace is
    dropped instead."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise FormatError(path, 0, f"cannot read: {e}") from e
    out: List[str] = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        test = line.split()[0]
        if test not in out:
            out.append(test)
    return out


# --- Label cache sidecar ---

def save_label_cache(path: str, universe: LabelSet, records: Sequence[TestRecord],
                     provenance: Optional[Dict[str, Any]] = None) -> None:
    write_json(path, {
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "provenance": provenance or {},
        "universe": universe.to_list(),
        "tests": [r.to_dict() for r in sorted(records, key=lambda r: r.test_id)],
    })


def load_label_cache(path: str) -> Tuple[LabelSet, List[TestRecord]]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise FormatError(path, 0, f"cannot read: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(path, e.lineno, f"malformed label cache: {e.msg}") from e
    try:
        universe = LabelSet.from_list(data.get("universe", []))
        records = [TestRecord.from_dict(t) for t in data.get("tests", [])]
    except (AttributeError, ValueError) as e:
        raise FormatError(path, 0, f"malformed label cache: {e}") from e
    return universe, records


def attach_statements(records: Sequence[TestRecord], coverage: CoverageMatrix) -> List[TestRecord]:
    """Copy statement sets from a coverage matrix onto label records (missing -> empty)."""
    return [
        TestRecord(r.test_id, r.labels, coverage.covered.get(r.test_id, frozenset()))
        for r in records
    ]
