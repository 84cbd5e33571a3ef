"""
Type graph construction and label universes.

Nodes are types reachable from a root class through instance fields; each field is
one edge. A field edge is iterable when the field holds a container or array, or
when its source type sits on a directed cycle (a recursive structure).
"""
from __future__ import annotations

import logging
from dataclasses import replace
from typing import Iterable, Iterator, List, Set, Tuple

import networkx as nx

from models.constants import KIND_CLASS, LABEL_PLAIN, LABEL_PLUS
from models.errors import RootNotFound
from models.graph import FieldEdge, Label, LabelSet, TypeGraph
from models.source import ClassDecl, FieldDecl, SourceCorpus
from parsing.resolve import resolve_types

logger = logging.getLogger(__name__)


def find_root(corpus: SourceCorpus, root: str) -> ClassDecl:
    if root in corpus.classes:
        return corpus.classes[root]
    candidates = corpus.find_class(root)
    if not candidates:
        raise RootNotFound(root)
    return candidates[0]


def _instance_fields(corpus: SourceCorpus, qualified: str, include_inherited: bool) -> Iterator[FieldDecl]:
    chain = corpus.superclass_chain(qualified)
    if not include_inherited:
        chain = chain[:1]
    for cls in chain:
        for f in cls.instance_fields:
            yield f


def cyclic_nodes(graph: nx.MultiDiGraph) -> Set[str]:
    """Nodes in a non-trivial strongly connected component or carrying a self-loop."""
    nodes: Set[str] = set(nx.nodes_with_selfloops(graph))
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            nodes |= component
    return nodes


def build_type_graph(corpus: SourceCorpus, root: str, include_inherited: bool = True) -> TypeGraph:
    """Build the type graph reachable from `root` (qualified or simple name).

    With include_inherited, fields declared on corpus superclasses become edges of the
    subclass node, labeled with the declaring superclass. Each (declaring class, field)
    pair appears on one edge only; when two reachable subclasses inherit the same
    field, the first one visited owns it.
    """
    corpus = resolve_types(corpus)
    root_cls = find_root(corpus, root)

    g = nx.MultiDiGraph()
    g.add_node(root_cls.qualified, kind=KIND_CLASS)
    seen_edges: Set[Tuple[str, str]] = set()
    pending = [root_cls.qualified]
    visited: Set[str] = set()

    while pending:
        current = pending.pop()
        if current in visited:
            continue
        visited.add(current)
        for f in _instance_fields(corpus, current, include_inherited):
            key = (f.declaring_class, f.name)
            if key in seen_edges:
                continue
            seen_edges.add(key)
            target, target_kind = f.type_ref.node_id, f.type_ref.node_kind
            if target not in g:
                g.add_node(target, kind=target_kind)
            if target_kind == KIND_CLASS and target not in visited:
                pending.append(target)
            edge = FieldEdge(
                source=current,
                target=target,
                field=f.name,
                declaring_class=f.declaring_class,
                iterable=f.type_ref.is_iterable,
                type_display=f.type_ref.display(),
            )
            g.add_edge(current, target, key=f"{f.declaring_class}.{f.name}", edge=edge)

    on_cycle = cyclic_nodes(g)
    iterable: Set[Tuple[str, str]] = set()
    for u, v, k, data in g.edges(keys=True, data=True):
        edge = data["edge"]
        if edge.iterable or u in on_cycle:
            data["edge"] = replace(edge, iterable=True)
            iterable.add((edge.declaring_class, edge.field))

    graph = TypeGraph(root=root_cls.qualified, graph=g, iterable_edges=frozenset(iterable))
    logger.info("Type graph for %s: %d node(s), %d edge(s), %d iterable",
                graph.root, g.number_of_nodes(), g.number_of_edges(), len(iterable))
    return graph


def iterable_fields(graph: TypeGraph) -> List[FieldEdge]:
    return [e for e in graph.edges() if e.iterable]


def coverable_labels(graph: TypeGraph) -> LabelSet:
    """One plain label per edge plus one plus label per iterable edge."""
    labels: List[Label] = []
    for e in graph.edges():
        labels.append(Label(e.declaring_class, e.field, LABEL_PLAIN))
        if e.iterable:
            labels.append(Label(e.declaring_class, e.field, LABEL_PLUS))
    return LabelSet(labels)


def merge_label_universes(graphs: Iterable[TypeGraph]) -> LabelSet:
    merged = LabelSet()
    for graph in graphs:
        merged = merged | coverable_labels(graph)
    return merged


def graph_to_json(graph: TypeGraph) -> dict:
    data = graph.to_dict()
    data["labels"] = coverable_labels(graph).to_list()
    return data


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(graph: TypeGraph) -> str:
    """Graphviz rendering: iterable edges carry a '+' and a dashed style."""
    lines = [f"digraph {_dot_id(graph.root)} {{", "  rankdir=LR;"]
    for node in graph.nodes():
        shape = "box" if node.kind == KIND_CLASS else "ellipse"
        lines.append(f"  {_dot_id(node.id)} [shape={shape}, label={_dot_id(node.id)}];")
    for e in graph.edges():
        label = f"{e.field}+" if e.iterable else e.field
        style = ", style=dashed" if e.iterable else ""
        lines.append(f"  {_dot_id(e.source)} -> {_dot_id(e.target)} [label={_dot_id(label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
