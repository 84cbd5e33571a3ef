"""
Type graph and label DTOs.

A TypeGraph wraps a networkx MultiDiGraph: nodes are types, edges are instance
fields. Labels are the unit of coverage: one plain label per field edge and one
plus label per iterable edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional

import networkx as nx

from .constants import LABEL_PLAIN, LABEL_PLUS


@dataclass(frozen=True)
class TypeNode:
    id: str
    kind: str

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "kind": self.kind}


@dataclass(frozen=True)
class FieldEdge:
    source: str
    target: str
    field: str
    declaring_class: str
    iterable: bool = False
    type_display: str = ""

    @property
    def sort_key(self) -> tuple:
        return (self.declaring_class, self.field)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "from": self.source,
            "to": self.target,
            "field": self.field,
            "declaring_class": self.declaring_class,
            "iterable": self.iterable,
            "type": self.type_display,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FieldEdge":
        return cls(
            source=data.get("from", ""),
            target=data.get("to", ""),
            field=data.get("field", ""),
            declaring_class=data.get("declaring_class", ""),
            iterable=bool(data.get("iterable", False)),
            type_display=data.get("type", ""),
        )


@dataclass(frozen=True, order=True)
class Label:
    """Membership is (declaring class, field, kind); plain sorts before plus."""

    declaring_class: str
    field: str
    kind: str = LABEL_PLAIN

    @property
    def is_plus(self) -> bool:
        return self.kind == LABEL_PLUS

    @property
    def short(self) -> str:
        return f"{self.field}+" if self.is_plus else self.field

    @property
    def key(self) -> str:
        return f"{self.declaring_class}.{self.short}"

    def plain(self) -> "Label":
        return Label(self.declaring_class, self.field, LABEL_PLAIN)

    def plus(self) -> "Label":
        return Label(self.declaring_class, self.field, LABEL_PLUS)

    @classmethod
    def parse(cls, key: str) -> "Label":
        """Inverse of `key`: 'LinkedList.Node.next+' -> (LinkedList.Node, next, plus)."""
        kind = LABEL_PLAIN
        if key.endswith("+"):
            kind = LABEL_PLUS
            key = key[:-1]
        declaring, _, name = key.rpartition(".")
        if not declaring or not name:
            raise ValueError(f"Malformed label {key!r}")
        return cls(declaring, name, kind)


class LabelSet:
    """Immutable set of labels iterated in canonical order."""

    __slots__ = ("_labels",)

    def __init__(self, labels: Iterable[Label] = ()):
        self._labels = frozenset(labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(sorted(self._labels))

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._labels

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LabelSet):
            return self._labels == other._labels
        if isinstance(other, (set, frozenset)):
            return self._labels == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._labels)

    def __or__(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self._labels | set(other))

    def __and__(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self._labels & set(other))

    def __sub__(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self._labels - set(other))

    def __le__(self, other: "LabelSet") -> bool:
        return self._labels <= set(other)

    def __repr__(self) -> str:
        return f"LabelSet({[l.key for l in self]})"

    @property
    def frozen(self) -> frozenset:
        return self._labels

    def plain(self) -> "LabelSet":
        return LabelSet(l for l in self._labels if not l.is_plus)

    def plus(self) -> "LabelSet":
        return LabelSet(l for l in self._labels if l.is_plus)

    def named(self, field_name: str) -> "LabelSet":
        return LabelSet(l for l in self._labels if l.field == field_name)

    def shorts(self) -> List[str]:
        return [l.short for l in self]

    def to_list(self) -> List[str]:
        return [l.key for l in self]

    @classmethod
    def from_list(cls, keys: Iterable[str]) -> "LabelSet":
        return cls(Label.parse(k) for k in keys)


@dataclass
class TypeGraph:
    """Type graph rooted at one class. Node and edge iteration is canonical:
    nodes by id, edges by (declaring class, field)."""

    root: str
    graph: nx.MultiDiGraph = field(default_factory=nx.MultiDiGraph)
    iterable_edges: frozenset = frozenset()  # (declaring_class, field) pairs

    def nodes(self) -> List[TypeNode]:
        return [TypeNode(n, self.graph.nodes[n]["kind"]) for n in sorted(self.graph.nodes)]

    def edges(self) -> List[FieldEdge]:
        edges = [data["edge"] for _, _, data in self.graph.edges(data=True)]
        return sorted(edges, key=lambda e: e.sort_key)

    def edge(self, declaring_class: str, field_name: str) -> Optional[FieldEdge]:
        for e in self.edges():
            if e.declaring_class == declaring_class and e.field == field_name:
                return e
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "root": self.root,
            "nodes": [n.to_dict() for n in self.nodes()],
            "edges": [e.to_dict() for e in self.edges()],
        }
