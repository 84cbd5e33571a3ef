"""
Tests for the read-only report viewer.

Usage:
    python -m pytest test_app.py
"""
import pytest

from app import create_app
from cli import main
from fixtures import load_fixture


@pytest.fixture
def out_dir(tmp_path):
    src = load_fixture("linkedlist").src_dir
    common = ["--sources", src, "--roots", "LinkedList", "--out-dir", str(tmp_path)]
    assert main(["graph", *common]) == 0
    assert main(["coverage", *common, "--selector", "isEmpty|checkSize"]) == 0
    return tmp_path


def test_artifacts_listing(out_dir):
    client = create_app(str(out_dir)).test_client()
    data = client.get("/api/artifacts").get_json()
    assert data["tool"]["name"] == "sfcov"
    assert data["graphs"] == ["LinkedList"]
    assert "coverage.json" in data["artifacts"]
    assert "report.json" not in data["artifacts"]


def test_coverage_and_uncovered(out_dir):
    client = create_app(str(out_dir)).test_client()
    coverage = client.get("/api/coverage")
    assert coverage.status_code == 200
    assert coverage.get_json()["graphs"] == [{"root": "LinkedList", "labels": 9}]
    assert client.get("/api/uncovered").status_code == 200


def test_graph_route(out_dir):
    client = create_app(str(out_dir)).test_client()
    graph = client.get("/api/graph/LinkedList").get_json()
    assert graph["root"] == "LinkedList"
    assert client.get("/api/graph/Nope").status_code == 404
    assert client.get("/api/graph/a/b").status_code == 400


def test_missing_artifacts_are_json_404(tmp_path):
    client = create_app(str(tmp_path / "empty")).test_client()
    assert client.get("/api/artifacts").get_json()["artifacts"] == []
    for route in ("/api/coverage", "/api/uncovered", "/api/curves", "/api/report"):
        response = client.get(route)
        assert response.status_code == 404
        assert "not found" in response.get_json()["error"]


def test_curves_grouped_by_strategy(tmp_path):
    (tmp_path / "curves.csv").write_text(
        "strategy,prefix,labels,sfc,statements,mutation_score\n"
        "sfc-greedy,1,2,0.5,,\n"
        "sfc-greedy,2,4,1.0,,\n"
        "random#0,1,1,0.25,,\n",
        encoding="utf-8",
    )
    data = create_app(str(tmp_path)).test_client().get("/api/curves").get_json()
    assert sorted(data["curves"]) == ["random#0", "sfc-greedy"]
    assert [r["prefix"] for r in data["curves"]["sfc-greedy"]] == ["1", "2"]
    assert data["apfd"] == []
