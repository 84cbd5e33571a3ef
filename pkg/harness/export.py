"""
Writers for the prioritization artifacts: curves.csv, apfd.csv, first_fault.csv,
growth.csv and report.json.
"""
from __future__ import annotations

import os
from typing import Any, Dict, List, Optional, Sequence

from analysis.report import write_csv, write_json
from models.harness import OrderingResult

from .metrics import CURVE_HEADER, FIRST_FAULT_HEADER, prefix_curves

APFD_HEADER = ("strategy", "percent", "prefix", "apfd")
GROWTH_HEADER = ("percent", "size", "sfc", "mutation_score")


def write_curves(out_dir: str, orderings: Sequence[OrderingResult]) -> str:
    path = os.path.join(out_dir, "curves.csv")
    write_csv(path, CURVE_HEADER, prefix_curves(orderings))
    return path


def write_apfd(out_dir: str, progressions: Dict[str, List[tuple]]) -> str:
    """`progressions` maps an ordering name to (percent, prefix, apfd) rows."""
    path = os.path.join(out_dir, "apfd.csv")
    rows = [[name, pct, k, value] for name, rows_ in progressions.items() for pct, k, value in rows_]
    write_csv(path, APFD_HEADER, rows)
    return path


def write_first_fault(out_dir: str, row: Optional[Dict[str, Any]]) -> str:
    path = os.path.join(out_dir, "first_fault.csv")
    rows = [[row[h] for h in FIRST_FAULT_HEADER]] if row else []
    write_csv(path, FIRST_FAULT_HEADER, rows)
    return path


def write_growth(out_dir: str, growth: Sequence[Dict[str, Any]]) -> str:
    path = os.path.join(out_dir, "growth.csv")
    write_csv(path, GROWTH_HEADER, [[g[h] for h in GROWTH_HEADER] for g in growth])
    return path


def write_report(out_dir: str, report: Dict[str, Any]) -> str:
    path = os.path.join(out_dir, "report.json")
    write_json(path, report)
    return path
