"""
Tests for the prioritization harness: matrix loading, mutation score, orderings,
APFD and the first-fault table.

Usage:
    python -m pytest test_harness.py
"""
import itertools
import logging
import math
import random

import pytest

from harness import (
    additional_greedy,
    apfd,
    apfd_progression,
    average_curve,
    correlation_pairs,
    first_fault_index,
    first_fault_row,
    first_fault_summary,
    greedy_sfc_order,
    greedy_statement_order,
    load_coverage_matrix,
    load_failing_tests,
    load_kill_matrix,
    load_label_cache,
    mutation_score,
    prefix_curves,
    random_order,
    random_subset_growth,
    save_label_cache,
    similar_coverage_subset,
)
from harness.metrics import CURVE_HEADER, FIRST_FAULT_HEADER
from models import (
    CoverageMatrix,
    FormatError,
    KillMatrix,
    Label,
    LabelSet,
    NoDetectableFaults,
    TestRecord,
    UnknownOutcomeCode,
    UnknownTestId,
)


def _labels(*names):
    return LabelSet(Label("Suite", n) for n in names)


def _records(table):
    return [TestRecord(t, _labels(*names)) for t, names in table.items()]


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _kill_matrix(rows):
    """rows: test -> {mutant: code}"""
    tests = list(rows)
    mutants = sorted({m for cells in rows.values() for m in cells})
    return KillMatrix(tests=tests, mutants=mutants, outcomes={t: dict(c) for t, c in rows.items()})


# Four mutants, m4 trivial for the whole suite; A kills m1, B kills m1 and m2.
SCORED = _kill_matrix({
    "A": {"m1": "K", "m2": "S", "m3": "S", "m4": "T"},
    "B": {"m1": "K", "m2": "K", "m3": "S", "m4": "T"},
})


# --- Matrices ---

def test_kill_matrix_with_trivial_column(tmp_path):
    path = _write(tmp_path, "kills.csv", "test_id,m1,m2,m3\nT1,K,T,S\nT2,S,T,K\n")
    matrix = load_kill_matrix(path)
    assert matrix.tests == ["T1", "T2"]
    assert matrix.trivial_mutants == {"m2"}
    assert matrix.scorable_mutants == ["m1", "m3"]
    assert mutation_score(matrix, ["T1", "T2"]) == 1.0


def test_kill_matrix_without_mutants(tmp_path):
    matrix = load_kill_matrix(_write(tmp_path, "kills.csv", "test_id\nT1\nT2\n"))
    assert matrix.mutants == []
    assert mutation_score(matrix, ["T1"]) is None


@pytest.mark.parametrize("text, line", [
    ("test_id,m1\nT1,K\nT1,S\n", 3),
    ("test_id,m1,m2\nT1,K\n", 2),
    ("name,m1\nT1,K\n", 1),
    ("test_id,m1,m1\nT1,K,K\n", 1),
    (",m1\n", 1),
])
def test_kill_matrix_format_errors(tmp_path, text, line):
    with pytest.raises(FormatError) as err:
        load_kill_matrix(_write(tmp_path, "kills.csv", text))
    assert err.value.line == line
    assert err.value.exit_code == 4


def test_kill_matrix_unknown_code(tmp_path):
    with pytest.raises(UnknownOutcomeCode) as err:
        load_kill_matrix(_write(tmp_path, "kills.csv", "test_id,m1\nT1,X\n"))
    assert err.value.line == 2


def test_coverage_matrix(tmp_path):
    path = _write(tmp_path, "cov.csv", "test_id,statements\nT1,s1;s2\nT2,\nT3,s2; s3\n")
    matrix = load_coverage_matrix(path)
    assert matrix.covered == {"T1": {"s1", "s2"}, "T2": frozenset(), "T3": {"s2", "s3"}}
    assert matrix.statements == {"s1", "s2", "s3"}
    assert matrix.ratio("T1") == pytest.approx(2 / 3)


def test_failing_tests(tmp_path):
    path = _write(tmp_path, "failing.txt", "# bug 7\nT2\n\nT5  # flaky\nT2\n")
    assert load_failing_tests(path) == ["T2", "T5"]


def test_failing_tests_keep_method_ids(tmp_path):
    path = _write(tmp_path, "failing.txt", "# from the bug report\nLinkedListTest#testEmpty\n  #LinkedListTest#testIndirect\n")
    failing = load_failing_tests(path)
    assert failing == ["LinkedListTest#testEmpty"]
    order = ["LinkedListTest#testSizeConsistent", "LinkedListTest#testEmpty"]
    assert first_fault_index(order, failing) == 2


def test_label_cache(tmp_path):
    path = str(tmp_path / "labels.json")
    universe = _labels("a", "b", "c")
    save_label_cache(path, universe, _records({"T2": ["b"], "T1": ["a"]}), {"run": 1})
    loaded_universe, records = load_label_cache(path)
    assert loaded_universe == universe
    assert [r.test_id for r in records] == ["T1", "T2"]
    assert records[1].labels == _labels("b")


def test_label_cache_malformed(tmp_path):
    with pytest.raises(FormatError):
        load_label_cache(_write(tmp_path, "labels.json", "{not json"))


# --- Mutation score ---

def test_mutation_score_excludes_trivial():
    assert mutation_score(SCORED, ["A"]) == pytest.approx(1 / 3)
    assert mutation_score(SCORED, ["A", "B"]) == pytest.approx(2 / 3)
    assert mutation_score(SCORED, []) == 0.0


def test_mutation_score_unknown_test():
    with pytest.raises(UnknownTestId):
        mutation_score(SCORED, ["Z"])


# --- Orderings ---

GREEDY = {"T1": ["a"], "T2": ["a", "b"], "T3": ["c"]}


def test_greedy_sfc_order():
    result = greedy_sfc_order(_records(GREEDY), _labels("a", "b", "c"))
    assert result.order == ["T2", "T3", "T1"]
    curve = [(p.size, p.labels, p.sfc) for p in result.prefixes]
    assert curve == [(1, 2, pytest.approx(2 / 3)), (2, 3, 1.0), (3, 3, 1.0)]


def test_greedy_gains_never_grow():
    rng = random.Random(5)
    for _ in range(100):
        items = {
            f"T{i}": frozenset(rng.sample("abcdefg", rng.randint(0, 4)))
            for i in range(rng.randint(1, 6))
        }
        order = additional_greedy(items)
        assert sorted(order) == sorted(items)
        assert len(items[order[0]]) == max(len(s) for s in items.values())
        covered, gains = set(), []
        for t in order:
            gains.append(len(items[t] - covered))
            covered |= items[t]
        assert gains == sorted(gains, reverse=True)


def _follows_greedy_rule(order, items):
    """True if every step picks the smallest id among the largest gains, and the tail
    after the gains run out is in id order."""
    covered = set()
    for i, test in enumerate(order):
        gains = {t: len(items[t] - covered) for t in order[i:]}
        best = max(gains.values())
        if best == 0:
            return list(order[i:]) == sorted(order[i:])
        if test != min(t for t, g in gains.items() if g == best):
            return False
        covered |= items[test]
    return True


def test_greedy_matches_exhaustive_search():
    rng = random.Random(11)
    universe = _labels(*"abcdefghij")
    for _ in range(40):
        table = {
            f"T{i}": rng.sample("abcdefghij", rng.randint(0, 5))
            for i in range(rng.randint(1, 6))
        }
        items = {t: frozenset(names) for t, names in table.items()}
        valid = [p for p in itertools.permutations(sorted(items)) if _follows_greedy_rule(p, items)]
        assert len(valid) == 1, table
        result = greedy_sfc_order(_records(table), universe)
        assert result.order == list(valid[0])
        covered = set()
        for prefix, test in zip(result.prefixes, valid[0]):
            covered |= items[test]
            assert prefix.labels == len(covered)
        assert result.prefixes[0].labels == max(len(s) for s in items.values())


def test_greedy_ties_and_leftovers_are_lexicographic():
    assert greedy_sfc_order(_records({"b": [], "a": [], "c": []}), _labels()).order == ["a", "b", "c"]
    assert greedy_sfc_order(_records({"only": ["a"]}), _labels("a")).order == ["only"]
    assert additional_greedy({"T1": frozenset("x"), "T2": frozenset("y"), "T0": frozenset("x")}) == ["T0", "T2", "T1"]


def test_greedy_appends_leftovers_in_id_order():
    items = {"T4": frozenset("ab"), "T3": frozenset("a"), "T1": frozenset("b"), "T2": frozenset()}
    assert additional_greedy(items) == ["T4", "T1", "T2", "T3"]


def test_random_order():
    records = _records({f"T{i}": [] for i in range(6)})
    shuffles = random_order(records, seed=1, repetitions=10)
    assert len(shuffles) == 10
    for r in shuffles:
        assert sorted(r.order) == sorted(t.test_id for t in records)
    assert [r.name for r in shuffles[:2]] == ["random#0", "random#1"]
    again = random_order(list(reversed(records)), seed=1, repetitions=10)
    assert [r.order for r in shuffles] == [r.order for r in again]
    other = random_order(records, seed=2, repetitions=10)
    assert [r.order for r in other] != [r.order for r in shuffles]


def test_random_order_single_test():
    shuffles = random_order(_records({"T": []}), seed=3, repetitions=4)
    assert {tuple(r.order) for r in shuffles} == {("T",)}


def test_greedy_statement_order():
    coverage = CoverageMatrix({"T1": frozenset({"s1"}), "T2": frozenset({"s1", "s2", "s3"})})
    assert greedy_statement_order(_records({"T1": [], "T2": []}), coverage).order == ["T2", "T1"]
    disjoint = CoverageMatrix({"B": frozenset({"s1"}), "A": frozenset({"s2"})})
    assert greedy_statement_order(_records({"A": [], "B": []}), disjoint).order == ["A", "B"]
    assert greedy_statement_order(_records({"B": [], "A": []}), CoverageMatrix()).order == ["A", "B"]


def test_greedy_statement_order_warns_on_missing(caplog):
    coverage = CoverageMatrix({"T1": frozenset({"s1"})})
    with caplog.at_level(logging.WARNING):
        result = greedy_statement_order(_records({"T1": [], "T9": []}), coverage)
    assert result.order == ["T1", "T9"]
    assert "T9" in caplog.text


def test_similar_coverage_subset():
    coverage = CoverageMatrix({
        "T1": frozenset({"s1"}),
        "T2": frozenset({"s2"}),
        "T3": frozenset({"s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"}),
        "T4": frozenset({"s3"}),
    })
    assert similar_coverage_subset(["T1", "T2", "T3", "T4"], coverage) == ["T1", "T2", "T4"]


# --- Curves ---

def _curve_fixture():
    records = _records({"A": ["a"], "B": ["a", "b"]})
    universe = _labels("a", "b")
    orderings = [greedy_sfc_order(records, universe, SCORED), *random_order(records, 1, 3, universe, SCORED)]
    return orderings


def test_prefix_metrics_are_monotone():
    for ordering in _curve_fixture():
        for before, after in zip(ordering.prefixes, ordering.prefixes[1:]):
            assert after.labels >= before.labels
            assert after.mutation_score >= before.mutation_score


def test_full_suite_point_is_invariant():
    expected = mutation_score(SCORED, ["A", "B"])
    for ordering in _curve_fixture():
        assert ordering.prefixes[-1].mutation_score == pytest.approx(expected)
        assert ordering.prefixes[-1].sfc == 1.0


def test_prefix_curves_rows():
    orderings = _curve_fixture()
    rows = prefix_curves(orderings)
    assert len(rows) == 2 * len(orderings)
    assert len(rows[0]) == len(CURVE_HEADER)
    assert rows[0][:3] == ["sfc-greedy", 1, 2]


def test_average_curve():
    shuffles = _curve_fixture()[1:]
    mean = average_curve(shuffles)
    assert mean.name == "random-mean"
    assert mean.prefixes[-1].sfc == 1.0
    expected = sum(o.prefixes[0].labels for o in shuffles) / len(shuffles)
    assert mean.prefixes[0].labels == pytest.approx(expected)


def _richer_tests_kill_more():
    """Three tests with four labels each that kill five mutants apiece, seven tests with
    one label that only kill a shared mutant, and a mutant every test crashes on."""
    table, rows = {}, {}
    mutants = [f"m{i}" for i in range(15)] + ["mp", "mt"]
    for i in range(3):
        test = f"rich{i}"
        table[test] = [f"r{i}{j}" for j in range(4)]
        kills = {f"m{5 * i + j}" for j in range(5)}
        rows[test] = {m: "K" if m in kills else "S" for m in mutants}
    for i in range(7):
        test = f"poor{i}"
        table[test] = [f"p{i}"]
        rows[test] = {m: "K" if m == "mp" else "S" for m in mutants}
    for cells in rows.values():
        cells["mt"] = "T"
    return _records(table), _labels(*(n for names in table.values() for n in names)), _kill_matrix(rows)


def test_greedy_dominates_random_early():
    records, universe, matrix = _richer_tests_kill_more()
    assert matrix.trivial_mutants == {"mt"}
    assert len(matrix.scorable_mutants) == 16
    greedy = greedy_sfc_order(records, universe, matrix)
    mean = average_curve(random_order(records, 7, 20, universe, matrix))
    assert greedy.order[:3] == ["rich0", "rich1", "rich2"]
    assert [p.mutation_score for p in greedy.prefixes[:3]] == [
        pytest.approx(5 / 16), pytest.approx(10 / 16), pytest.approx(15 / 16),
    ]
    cutoff = math.ceil(0.3 * len(records))
    for k in range(cutoff):
        assert greedy.prefixes[k].mutation_score >= mean.prefixes[k].mutation_score - 1e-12
    assert greedy.prefixes[cutoff - 1].mutation_score > mean.prefixes[cutoff - 1].mutation_score
    assert greedy.prefixes[-1].mutation_score == pytest.approx(1.0)
    assert mean.prefixes[-1].mutation_score == pytest.approx(1.0)
    assert greedy.prefixes[-1].sfc == mean.prefixes[-1].sfc == 1.0


def test_random_subset_growth():
    records = _records({"A": ["a"], "B": ["a", "b"], "C": []})
    matrix = _kill_matrix({
        "A": {"m1": "K", "m2": "S"},
        "B": {"m1": "S", "m2": "K"},
        "C": {"m1": "S", "m2": "S"},
    })
    rows = random_subset_growth(records, _labels("a", "b"), matrix, seed=4, runs=5, percentages=[50, 100])
    assert [(r["percent"], r["size"]) for r in rows] == [(50, 2), (100, 3)]
    assert rows[-1]["sfc"] == 1.0 and rows[-1]["mutation_score"] == 1.0
    assert len(correlation_pairs(rows)) == 10
    again = random_subset_growth(records, _labels("a", "b"), matrix, seed=4, runs=5, percentages=[50, 100])
    assert rows == again


# --- APFD ---

def test_apfd_closed_forms():
    faults = {"f": {"T1"}}
    assert apfd(["T1", "T2"], faults) == pytest.approx(0.75)
    assert apfd(["T2", "T1"], faults) == pytest.approx(0.25)


def test_apfd_without_detection():
    with pytest.raises(NoDetectableFaults):
        apfd(["T1", "T2"], {"f": set()})
    with pytest.raises(NoDetectableFaults):
        apfd([], {"f": {"T1"}})


def _brute_apfd(order, faults):
    n = len(order)
    firsts = []
    for detecting in faults.values():
        positions = [i + 1 for i, t in enumerate(order) if t in detecting]
        if positions:
            firsts.append(positions[0])
    m = len(firsts)
    return 1 - sum(firsts) / (n * m) + 1 / (2 * n)


def test_apfd_matches_brute_force():
    rng = random.Random(11)
    for _ in range(200):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        tests = [f"T{i}" for i in range(n)]
        rows = {t: {f"m{j}": rng.choice("KKSST") for j in range(m)} for t in tests}
        matrix = _kill_matrix(rows)
        detections = matrix.detections()
        if not any(detections.values()):
            continue
        order = tests[:]
        rng.shuffle(order)
        value = apfd(order, matrix)
        assert abs(value - _brute_apfd(order, detections)) < 1e-12
        assert 0 < value <= 1


def test_apfd_can_drop_as_prefixes_grow():
    faults = {"f1": {"T1"}, "f2": {"T4"}}
    rows = apfd_progression(["T1", "T2", "T3", "T4"], faults, [50, 100])
    assert rows == [(50, 2, pytest.approx(0.75)), (100, 4, pytest.approx(0.5))]


def test_apfd_progression_without_detection():
    rows = apfd_progression(["T2", "T3"], {"f": {"T1"}}, [50])
    assert rows == [(50, 1, None)]


# --- First-fault table ---

def test_first_fault_index():
    assert first_fault_index(["T3", "T1", "T2"], {"T1"}) == 2
    assert first_fault_index(["T3", "T1", "T2"], set()) is None


def test_first_fault_row_layout():
    row = first_fault_row("Math", "2", 3, ["T3", "T1", "T2"], [["T1", "T2", "T3"], ["T2", "T3", "T1"]], ["T1"])
    assert tuple(row) == FIRST_FAULT_HEADER
    assert row["SFC"] == 2
    assert row["Random"] == pytest.approx(2.0)


def test_first_fault_summary():
    rows = [
        {"SFC": 1, "Random": 4.0},
        {"SFC": 3, "Random": 2.0},
        {"SFC": 2, "Random": 2.0},
        {"SFC": None, "Random": 1.0},
    ]
    summary = first_fault_summary(rows)
    assert summary["times_better"] == 1
    assert summary["times_worse"] == 1
    assert summary["ties"] == 1
    assert summary["average_improvement"] == pytest.approx(0.75)
