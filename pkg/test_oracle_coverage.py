"""
Tests for oracle extraction, reachability and state field coverage.

Besides the golden fixtures, every fixture is cross-checked against a small
brute-force walker that works straight on javalang parse trees: it follows calls by
name and arity, tracks loop nesting, and maps field names onto the label universe.

Usage:
    python -m pytest test_oracle_coverage.py
"""
import logging

import javalang
import pytest
from javalang import tree as jt

from analysis import (
    AnalysisOptions,
    aggregate_sfc,
    build_type_graph,
    coverable_labels,
    decompose_properties,
    extract_oracles,
    harness_test_ids,
    mean_sfc_by_property_count,
    reachable_code,
    state_field_coverage,
    uncovered_report,
)
from fixtures import list_fixtures, load_fixture
from models import ConfigError, FieldAccess, LabelSet, MethodNotFound, NoOraclesFound
from parsing import parse_corpus, resolve_types

DECOMPOSITION = [n for n in list_fixtures() if load_fixture(n).mode == "decomposition"]
DIRECT = [n for n in list_fixtures() if n not in DECOMPOSITION]


def _corpus(*sources):
    return resolve_types(parse_corpus([(f"F{i}.java", s) for i, s in enumerate(sources)]))


def _oracles(case, corpus):
    if case.mode == "decomposition":
        return decompose_properties(corpus, case.root, case.properties)
    return extract_oracles(corpus, [case.root], case.mode, case.selector)


def _run(name, options=AnalysisOptions()):
    case = load_fixture(name)
    corpus = case.corpus()
    universe = coverable_labels(build_type_graph(corpus, case.root))
    oracles = _oracles(case, corpus)
    return case, corpus, oracles, state_field_coverage(corpus, oracles, universe, options)


def _by_id(result):
    return {o.oracle_id: o for o in result.per_oracle}


# --- Golden fixtures ---

@pytest.mark.parametrize("name", list_fixtures())
def test_fixture_per_oracle_coverage(name):
    case, _, _, result = _run(name)
    got = _by_id(result)
    expected = case.expected_coverage["oracles"]
    if case.mode != "decomposition":
        assert sorted(got) == sorted(o["id"] for o in expected)
    for exp in expected:
        actual = got[exp["id"]]
        assert actual.covered == LabelSet.from_list(exp["covered"]), exp["id"]
        if exp["sfc"] is None:
            assert actual.sfc is None
        else:
            assert actual.sfc == pytest.approx(exp["sfc"])


@pytest.mark.parametrize("name", DIRECT)
def test_fixture_aggregate_coverage(name):
    case, _, _, result = _run(name)
    expected = case.expected_coverage["aggregate"]
    assert result.covered == LabelSet.from_list(expected["covered"])
    if expected["sfc"] is None:
        assert result.sfc is None
    else:
        assert result.sfc == pytest.approx(expected["sfc"])


def test_linkedlist_worked_example():
    _, _, _, result = _run("linkedlist")
    got = _by_id(result)
    assert got["LinkedList#isEmpty/0"].covered.shorts() == ["size"]
    assert got["LinkedList#isEmpty/0"].sfc == pytest.approx(1 / 9)
    assert got["LinkedList#checkSize/0"].covered.shorts() == ["first", "size", "next", "next+"]
    assert got["LinkedList#checkSize/0"].sfc == pytest.approx(4 / 9)


def test_stateless_target_is_na():
    _, _, _, result = _run("stateless")
    assert result.sfc is None
    assert result.is_na
    warnings = [d for d in result.diagnostics if d.severity == "warning"]
    assert [d.code for d in warnings] == ["empty-universe"]
    assert warnings[0].path.endswith("StringUtils.java")
    assert warnings[0].line > 0
    assert warnings[0].format().startswith(warnings[0].path + ":")
    text = uncovered_report(result).to_text()
    assert text.startswith("SFC NA for StringUtils")
    assert "stateless target: no coverable labels" in text


def test_assertion_free_test_covers_nothing():
    _, _, _, result = _run("test-assertions")
    got = _by_id(result)
    assert len(got["LinkedListTest#testNoAsserts/0"].covered) == 0
    # the call happens outside the assertion, so it does not count
    assert len(got["LinkedListTest#testIndirect/0"].covered) == 0


def test_recursion_as_iteration():
    case, _, _, result = _run("binary-tree", AnalysisOptions(recursion_as_iteration=True))
    for oracle_id, labels in case.expected_coverage["recursion_as_iteration"].items():
        assert _by_id(result)[oracle_id].covered == LabelSet.from_list(labels)


# --- Brute-force walker ---

class _BruteForce:
    """Name-based reference walk over javalang trees."""

    def __init__(self, sources, universe):
        self.methods = {}
        for text in sources.values():
            for _, node in javalang.parse.parse(text).filter(jt.MethodDeclaration):
                self.methods.setdefault((node.name, len(node.parameters)), []).append(node)
        self.universe = universe
        self.fields = {l.field for l in universe}
        self.hits = set()
        self.seen = set()

    def call(self, name, arity, in_loop):
        for decl in self.methods.get((name, arity), []):
            if (id(decl), in_loop) in self.seen:
                continue
            self.seen.add((id(decl), in_loop))
            self.walk(decl.body, in_loop)

    def assertion(self, decl):
        for _, node in decl.filter(jt.MethodInvocation):
            if node.member.startswith("assert"):
                self.walk(node.arguments, False)
        for _, node in decl.filter(jt.AssertStatement):
            self.walk(node.condition, False)

    def _touch(self, qualifier, member, in_loop):
        names = (qualifier.split(".") if qualifier else []) + ([member] if member else [])
        for n in names:
            if n in self.fields:
                self.hits.add((n, in_loop))

    def walk(self, node, in_loop):
        if isinstance(node, (list, tuple)):
            for child in node:
                self.walk(child, in_loop)
            return
        if not isinstance(node, javalang.ast.Node):
            return
        if isinstance(node, jt.MemberReference):
            self._touch(node.qualifier, node.member, in_loop)
        elif isinstance(node, jt.MethodInvocation):
            self._touch(node.qualifier, None, in_loop)
            self.call(node.member, len(node.arguments), in_loop)
        if isinstance(node, (jt.WhileStatement, jt.DoStatement)):
            self.walk(node.condition, True)
            self.walk(node.body, True)
            return
        if isinstance(node, jt.ForStatement):
            control = node.control
            if isinstance(control, jt.EnhancedForControl):
                self.walk(control.var, in_loop)
                self.walk(control.iterable, True)
            else:
                self.walk(control.init, in_loop)
                self.walk(control.condition, True)
                self.walk(control.update, True)
            self.walk(node.body, True)
            return
        for child in node.children:
            self.walk(child, in_loop)

    def labels(self):
        out = set()
        for name, in_loop in self.hits:
            for label in self.universe.plain().named(name):
                out.add(label)
                if in_loop and label.plus() in self.universe:
                    out.add(label.plus())
        return LabelSet(out)


def _brute_force(case, oracle, universe):
    walker = _BruteForce(case.sources, universe)
    if oracle.test_method:
        name = oracle.test_method.split("#")[1].split("/")[0]
        for decl in walker.methods[(name, 0)]:
            walker.assertion(decl)
    else:
        for _, name, arity in oracle.entry_points:
            walker.call(name, arity, False)
    return walker.labels()


@pytest.mark.parametrize("name", list_fixtures())
def test_brute_force_walker_agrees(name):
    case, _, oracles, result = _run(name)
    got = _by_id(result)
    for oracle in oracles:
        assert got[oracle.id].covered == _brute_force(case, oracle, result.universe), oracle.id


# --- Reachability rules ---

CHAIN = (
    "class Box {\n"
    "    int[] f;\n"
    "    boolean h() { return g(); }\n"
    "    boolean g() { return k(); }\n"
    "    boolean k() { int i = 0; while (i < 3) { i = i + f[i]; } return true; }\n"
    "}\n",
    "class BoxTest {\n"
    "    @Test public void testChain() { Box b = new Box(); assertTrue(b.h()); }\n"
    "}\n",
)


def test_helper_chain_reaches_loop_body():
    corpus = _corpus(*CHAIN)
    [oracle] = extract_oracles(corpus, ["Box"], "tests")
    reach = reachable_code(corpus, oracle)
    f_accesses = [a for a in reach.accesses if a.field == "f"]
    assert f_accesses and all(a.in_loop for a in f_accesses)
    assert f_accesses[0].declaring_class == "Box"
    assert {"Box#h/0", "Box#g/0", "Box#k/0"} <= set(reach.methods)


WALKER = (
    "class Walker {\n"
    "    Walker next;\n"
    "    boolean checkWalk() {\n"
    "        Walker w = this;\n"
    "        while (w != null) { w = step(w); }\n"
    "        return true;\n"
    "    }\n"
    "    Walker step(Walker w) { return w.next; }\n"
    "}\n"
)


def _walker_coverage(options):
    corpus = _corpus(WALKER)
    universe = coverable_labels(build_type_graph(corpus, "Walker"))
    oracles = extract_oracles(corpus, ["Walker"])
    return state_field_coverage(corpus, oracles, universe, options).covered


def test_loop_context_flows_into_callees():
    assert _walker_coverage(AnalysisOptions()).shorts() == ["next", "next+"]


def test_strict_loop_bodies_stop_at_calls():
    assert _walker_coverage(AnalysisOptions(strict_loop_bodies=True)).shorts() == ["next"]


def test_unknown_receiver_matches_by_name():
    corpus = _corpus(
        "class Gadget {\n"
        "    int level;\n"
        "    boolean checkLevel(Widget w) { return w.level > 0 && w.frobnicate(); }\n"
        "}\n"
    )
    universe = coverable_labels(build_type_graph(corpus, "Gadget"))
    result = state_field_coverage(corpus, extract_oracles(corpus, ["Gadget"]), universe)
    assert result.covered.shorts() == ["level"]
    unresolved = [d for d in result.diagnostics if d.code == "unresolved-call"]
    assert len(unresolved) == 1 and unresolved[0].severity == "info"


def test_unknown_receiver_dispatches_to_every_match():
    corpus = _corpus(
        "class Pair {\n"
        "    int a;\n"
        "    int b;\n"
        "    boolean checkPair(Thing t) { return t.peek(); }\n"
        "    boolean peek() { return a > 0; }\n"
        "}\n",
        "class Other { int c; boolean peek() { return c > 0; } }\n",
    )
    reach = reachable_code(corpus, extract_oracles(corpus, ["Pair"], selector="checkPair")[0])
    assert {"Pair#peek/0", "Other#peek/0"} <= set(reach.methods)
    assert FieldAccess("Pair", "a", False, "Pair#peek/0", 5) in reach.accesses


def test_loop_setup_is_not_iteration():
    corpus = _corpus(
        "class Chain {\n"
        "    Chain link;\n"
        "    boolean checkHead() {\n"
        "        for (Chain c = link; false; ) { }\n"
        "        return true;\n"
        "    }\n"
        "}\n"
    )
    universe = coverable_labels(build_type_graph(corpus, "Chain"))
    result = state_field_coverage(corpus, extract_oracles(corpus, ["Chain"]), universe)
    assert result.covered.shorts() == ["link"]


# --- Oracle extraction ---

def test_default_invariant_selector():
    corpus = load_fixture("linkedlist").corpus()
    assert [o.id for o in extract_oracles(corpus, ["LinkedList"])] == ["LinkedList#checkSize/0"]


def test_explicit_selectors():
    corpus = load_fixture("linkedlist").corpus()
    by_regex = extract_oracles(corpus, ["LinkedList"], selector="isEmpty|checkSize")
    assert [o.id for o in by_regex] == ["LinkedList#isEmpty/0", "LinkedList#checkSize/0"]
    by_list = extract_oracles(corpus, ["LinkedList"], selector=["isEmpty"])
    assert [o.id for o in by_list] == ["LinkedList#isEmpty/0"]


def test_non_boolean_methods_are_not_invariants():
    corpus = load_fixture("linkedlist").corpus()
    with pytest.raises(NoOraclesFound) as err:
        extract_oracles(corpus, ["LinkedList"], selector="size")
    assert err.value.exit_code == 3


def test_invalid_selector():
    corpus = load_fixture("linkedlist").corpus()
    with pytest.raises(ConfigError):
        extract_oracles(corpus, ["LinkedList"], selector="(")


def test_test_oracles_record_assertions():
    corpus = load_fixture("test-assertions").corpus()
    oracles = {o.id: o for o in extract_oracles(corpus, ["LinkedList"], "tests")}
    assert len(oracles) == 4
    assert len(oracles["LinkedListTest#testSizeConsistent/0"].assertions) == 4
    assert oracles["LinkedListTest#testNoAsserts/0"].assertions == []


def test_custom_assert_prefix():
    corpus = _corpus(
        "class Cell { int v; int get() { return v; } }",
        "class CellTest { @Test public void testGet() { Cell c = new Cell(); check(c.get() == 0); } }",
    )
    universe = coverable_labels(build_type_graph(corpus, "Cell"))
    default = state_field_coverage(corpus, extract_oracles(corpus, ["Cell"], "tests"), universe)
    assert len(default.covered) == 0
    oracles = extract_oracles(corpus, ["Cell"], "tests", assert_prefixes=("check",))
    custom = state_field_coverage(corpus, oracles, universe, AnalysisOptions(assert_prefixes=("check",)))
    assert custom.covered.shorts() == ["v"]


def test_overloaded_tests_keep_distinct_harness_ids(caplog):
    corpus = _corpus(
        "class Cell { int v; }",
        "class CellTest {"
        " @Test public void testV() { Cell c = new Cell(); assertTrue(c.v == 0); }"
        " @Test public void testV(int x) { Cell c = new Cell(); assertTrue(c.v == x); }"
        " @Test public void testOther() { assertTrue(true); } }",
    )
    oracles = extract_oracles(corpus, ["Cell"], "tests")
    with caplog.at_level(logging.WARNING):
        ids = harness_test_ids(oracles)
    assert ids == {
        "CellTest#testV/0": "CellTest#testV/0",
        "CellTest#testV/1": "CellTest#testV/1",
        "CellTest#testOther/0": "CellTest#testOther",
    }
    assert len(set(ids.values())) == len(oracles)
    assert "CellTest#testV" in caplog.text


# --- Invariant decomposition ---

def test_decomposition_ids():
    corpus = load_fixture("heap-array").corpus()
    ids = [o.id for o in decompose_properties(corpus, "BinaryHeap", ["usedInRange", "allocated", "heapOrdered"])]
    assert ids == [
        "BinaryHeap{allocated}",
        "BinaryHeap{heapOrdered}",
        "BinaryHeap{usedInRange}",
        "BinaryHeap{allocated,heapOrdered}",
        "BinaryHeap{allocated,usedInRange}",
        "BinaryHeap{heapOrdered,usedInRange}",
        "BinaryHeap{allocated,heapOrdered,usedInRange}",
    ]


def test_decomposition_unknown_property():
    corpus = load_fixture("heap-array").corpus()
    with pytest.raises(MethodNotFound):
        decompose_properties(corpus, "BinaryHeap", ["allocated", "balanced"])


@pytest.mark.parametrize("name", DECOMPOSITION)
def test_mean_sfc_grows_with_conjoined_properties(name):
    case, _, oracles, result = _run(name)
    means = mean_sfc_by_property_count(oracles, result)
    expected = {int(k): v for k, v in case.expected_coverage["mean_by_property_count"].items()}
    assert means == pytest.approx(expected)
    values = [means[k] for k in sorted(means)]
    assert values == sorted(values)


# --- Properties and reports ---

@pytest.mark.parametrize("name", list_fixtures())
def test_coverage_properties(name):
    _, _, _, result = _run(name)
    assert result.covered <= result.universe
    for o in result.per_oracle:
        assert o.covered <= result.covered
        for label in o.covered.plus():
            assert label.plain() in o.covered
        if o.sfc is not None:
            assert 0.0 <= o.sfc <= 1.0


def test_coverage_is_deterministic():
    _, _, _, first = _run("test-assertions")
    _, _, _, second = _run("test-assertions")
    assert first.to_dict() == second.to_dict()


def test_parallel_workers_match_serial():
    case = load_fixture("test-assertions")
    corpus = case.corpus()
    universe = coverable_labels(build_type_graph(corpus, case.root))
    oracles = extract_oracles(corpus, [case.root], "tests")
    serial = state_field_coverage(corpus, oracles, universe)
    parallel = state_field_coverage(corpus, oracles, universe, workers=4)
    assert serial.to_dict() == parallel.to_dict()


def test_uncovered_report_reasons():
    case = load_fixture("heap-array")
    corpus = case.corpus()
    universe = coverable_labels(build_type_graph(corpus, case.root))
    oracles = extract_oracles(corpus, [case.root], selector="usedInRange")
    report = uncovered_report(state_field_coverage(corpus, oracles, universe))
    entries = report.groups["BinaryHeap"]
    assert [(e.label.short, e.reason) for e in entries] == [("heap+", "not iterated")]
    assert "heap+" in report.to_text()


def test_uncovered_plus_labels_are_not_iterated():
    case = load_fixture("linkedlist")
    corpus = case.corpus()
    universe = coverable_labels(build_type_graph(corpus, case.root))
    oracles = extract_oracles(corpus, [case.root], selector="isEmpty")
    report = uncovered_report(state_field_coverage(corpus, oracles, universe))
    reasons = {e.label.short: e.reason for entries in report.groups.values() for e in entries}
    assert reasons["next+"] == reasons["prev+"] == reasons["item+"] == "not iterated"
    assert reasons["next"] == reasons["first"] == "never accessed"
    assert "size" not in reasons
    text = report.to_text()
    assert "not iterated" in text
    assert "SFC 1/9" in text


def test_aggregate_sfc_across_targets():
    _, _, _, linked = _run("linkedlist")
    _, _, _, stateless = _run("stateless")
    counted = aggregate_sfc([linked, stateless])
    assert counted["mean"] == pytest.approx(2 / 9)
    assert counted["warning"] is True and counted["na"] == 1
    excluded = aggregate_sfc([linked, stateless], exclude_stateless=True)
    assert excluded["mean"] == pytest.approx(4 / 9)
    assert excluded["warning"] is False
