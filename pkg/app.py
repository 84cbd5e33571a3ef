"""
sfcov report viewer: a read-only Flask app serving one output directory as JSON.
Run with `python main.py serve --out-dir <dir>`.
"""
from __future__ import annotations

import csv
import json
import os
from typing import Any, Dict, List, Optional

from flask import Flask, jsonify

from models.constants import TOOL_NAME, TOOL_VERSION

ARTIFACTS = (
    "coverage.json",
    "uncovered.json",
    "coverage.csv",
    "coverage.txt",
    "labels.json",
    "curves.csv",
    "apfd.csv",
    "first_fault.csv",
    "growth.csv",
    "report.json",
)


def _read_json(path: str) -> Optional[Any]:
    if not os.path.isfile(path):
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _read_csv(path: str) -> Optional[List[Dict[str, str]]]:
    if not os.path.isfile(path):
        return None
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def create_app(out_dir: str) -> Flask:
    """Build the viewer for `out_dir`. Missing artifacts answer 404 with a JSON error."""
    app = Flask(__name__)
    app.config["SFCOV_OUT_DIR"] = os.path.abspath(out_dir)

    def artifact(name: str) -> str:
        return os.path.join(app.config["SFCOV_OUT_DIR"], name)

    def missing(name: str):
        return jsonify({"error": f"{name} not found in {app.config['SFCOV_OUT_DIR']}"}), 404

    @app.route("/api/artifacts")
    def api_artifacts():
        """List which known artifacts and graph exports exist."""
        root = app.config["SFCOV_OUT_DIR"]
        present = sorted(os.listdir(root)) if os.path.isdir(root) else []
        graphs = [n[len("graph-"):-len(".json")] for n in present
                  if n.startswith("graph-") and n.endswith(".json")]
        return jsonify({
            "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
            "out_dir": root,
            "artifacts": [n for n in ARTIFACTS if n in present],
            "graphs": graphs,
        })

    @app.route("/api/coverage")
    def api_coverage():
        data = _read_json(artifact("coverage.json"))
        if data is None:
            return missing("coverage.json")
        return jsonify(data)

    @app.route("/api/uncovered")
    def api_uncovered():
        data = _read_json(artifact("uncovered.json"))
        if data is None:
            return missing("uncovered.json")
        return jsonify(data)

    @app.route("/api/graph/<path:root>")
    def api_graph(root: str):
        """Type graph export for one root class, e.g. /api/graph/LinkedList."""
        name = f"graph-{root}.json"
        if os.path.basename(name) != name:
            return jsonify({"error": "Invalid root name"}), 400
        data = _read_json(artifact(name))
        if data is None:
            return missing(name)
        return jsonify(data)

    @app.route("/api/curves")
    def api_curves():
        """Per-prefix curves grouped by ordering name."""
        rows = _read_csv(artifact("curves.csv"))
        if rows is None:
            return missing("curves.csv")
        grouped: Dict[str, List[Dict[str, str]]] = {}
        for row in rows:
            grouped.setdefault(row["strategy"], []).append(row)
        apfd = _read_csv(artifact("apfd.csv")) or []
        return jsonify({"curves": grouped, "apfd": apfd})

    @app.route("/api/report")
    def api_report():
        data = _read_json(artifact("report.json"))
        if data is None:
            return missing("report.json")
        return jsonify(data)

    return app
