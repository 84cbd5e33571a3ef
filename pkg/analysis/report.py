"""
Coverage reports (uncovered labels as JSON and text, per-oracle CSV rows) and the
atomic artifact writers shared with the harness.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence

from models.coverage import CoverageResult
from models.graph import Label


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".sfcov-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: str, data: Any) -> None:
    atomic_write_text(path, dump_json(data))


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    atomic_write_text(path, format_csv(header, rows))


def format_sfc(sfc: Any) -> str:
    return "NA" if sfc is None else f"{sfc:.3f}"


@dataclass
class UncoveredEntry:
    label: Label
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label.short, "field": self.label.field,
                "kind": self.label.kind, "reason": self.reason}


@dataclass
class UncoveredReport:
    targets: List[str]
    universe_size: int
    covered_size: int
    sfc: Any
    groups: Dict[str, List[UncoveredEntry]] = field(default_factory=dict)

    @property
    def is_na(self) -> bool:
        return self.sfc is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "targets": self.targets,
            "status": "na" if self.is_na else "ok",
            "universe": self.universe_size,
            "covered": self.covered_size,
            "sfc": self.sfc,
            "uncovered": {cls: [e.to_dict() for e in entries] for cls, entries in self.groups.items()},
        }

    def to_text(self) -> str:
        targets = ", ".join(self.targets) or "<none>"
        if self.is_na:
            return f"SFC NA for {targets}: stateless target: no coverable labels\n"
        lines = [f"SFC {self.covered_size}/{self.universe_size} = {format_sfc(self.sfc)} for {targets}"]
        missing = sum(len(v) for v in self.groups.values())
        if not missing:
            lines.append("All labels covered.")
        else:
            lines.append(f"Uncovered labels ({missing}):")
            for cls, entries in self.groups.items():
                lines.append(f"  {cls}")
                width = max(len(e.label.short) for e in entries)
                for e in entries:
                    lines.append(f"    {e.label.short.ljust(width)}  {e.reason}")
        return "\n".join(lines) + "\n"


def uncovered_report(result: CoverageResult) -> UncoveredReport:
    """Group the uncovered labels by declaring class, explaining each one."""
    report = UncoveredReport(
        targets=list(result.targets),
        universe_size=len(result.universe),
        covered_size=len(result.covered),
        sfc=result.sfc,
    )
    for label in result.uncovered:
        reason = "not iterated" if label.is_plus else "never accessed"
        report.groups.setdefault(label.declaring_class, []).append(UncoveredEntry(label, reason))
    return report


def coverage_rows(result: CoverageResult) -> List[List[Any]]:
    """Per-oracle CSV rows followed by the aggregate row."""
    total = len(result.universe)
    rows: List[List[Any]] = [
        [o.oracle_id, len(o.covered), total, format_sfc(o.sfc), ";".join(o.covered.shorts())]
        for o in result.per_oracle
    ]
    rows.append(["<all>", len(result.covered), total, format_sfc(result.sfc), ";".join(result.covered.shorts())])
    return rows


COVERAGE_CSV_HEADER = ("oracle", "covered", "universe", "sfc", "labels")
