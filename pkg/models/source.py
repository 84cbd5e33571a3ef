"""
Source model DTOs: the language-neutral view of a Java-subset corpus.

Classes, fields, methods and a small statement/expression tree that keeps what the
analysis needs: field accesses with their receivers, call sites, loop nesting and
local declarations for receiver typing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .constants import (
    KIND_ARRAY,
    KIND_CLASS,
    KIND_CONTAINER,
    KIND_PRIMITIVE,
    KIND_TYPE_PARAMETER,
    KIND_UNRESOLVED,
)

# Expression kinds
EXPR_FIELD = "field-access"
EXPR_CALL = "method-call"
EXPR_IDENT = "identifier"
EXPR_BINARY = "binary"
EXPR_UNARY = "unary"
EXPR_LITERAL = "literal"
EXPR_INDEX = "array-index"
EXPR_ASSIGN = "assignment"
EXPR_CONDITIONAL = "conditional"
EXPR_THIS = "this"
EXPR_SUPER = "super"
EXPR_NEW = "new"
EXPR_CAST = "cast"
EXPR_LAMBDA = "lambda"

# Statement kinds
STMT_BLOCK = "block"
STMT_IF = "if"
STMT_FOR = "for"
STMT_FOREACH = "foreach"
STMT_WHILE = "while"
STMT_DO = "do"
STMT_RETURN = "return"
STMT_EXPRESSION = "expression"
STMT_LOCAL = "local"
STMT_ASSERT = "assert"
STMT_THROW = "throw"
STMT_TRY = "try"
STMT_SWITCH = "switch"
STMT_SYNC = "synchronized"
STMT_OTHER = "other"

LOOP_KINDS = frozenset({STMT_FOR, STMT_FOREACH, STMT_WHILE, STMT_DO})


def scope_affinity(context: Optional[str], qualified: str) -> int:
    """Number of leading name segments `qualified` shares with the context class.
    An exact top-level name match scores as the outermost scope."""
    if context is None:
        return 0
    ctx = context.split(".")
    parts = qualified.split(".")
    n = 0
    while n < min(len(ctx), len(parts) - 1) and ctx[n] == parts[n]:
        n += 1
    return n


@dataclass(frozen=True)
class Span:
    path: str
    line: int
    column: int = 1
    offset: int = 0


@dataclass
class Diagnostic:
    """A recoverable problem reported alongside a result."""

    path: str
    line: int
    message: str
    severity: str = "warning"  # "error" | "warning" | "info"
    code: str = ""

    def format(self) -> str:
        return f"{self.path}:{self.line}: {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "line": self.line,
            "message": self.message,
            "severity": self.severity,
            "code": self.code,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Diagnostic":
        return cls(
            path=data.get("path", ""),
            line=data.get("line", 0),
            message=data.get("message", ""),
            severity=data.get("severity", "warning"),
            code=data.get("code", ""),
        )


@dataclass(frozen=True)
class TypeRef:
    """A declared type. `target` is the qualified class for kind=class and the declaring
    class for kind=type-parameter; `element` is set for arrays and containers."""

    kind: str
    name: str
    target: str = ""
    element: Optional["TypeRef"] = None
    arguments: Tuple["TypeRef", ...] = ()

    @property
    def is_iterable(self) -> bool:
        return self.kind in (KIND_ARRAY, KIND_CONTAINER)

    @property
    def node_id(self) -> str:
        """Identity of the type-graph node this type lands on."""
        if self.kind == KIND_CLASS:
            return self.target
        if self.kind == KIND_TYPE_PARAMETER:
            return f"{self.name}@{self.target}"
        if self.kind in (KIND_ARRAY, KIND_CONTAINER):
            return self.element.node_id if self.element is not None else self.name
        return self.name

    @property
    def node_kind(self) -> str:
        if self.kind in (KIND_ARRAY, KIND_CONTAINER):
            return self.element.node_kind if self.element is not None else KIND_UNRESOLVED
        return self.kind

    def display(self) -> str:
        if self.kind == KIND_ARRAY:
            return f"{self.element.display() if self.element else self.name}[]"
        if self.arguments:
            return f"{self.name}<{', '.join(a.display() for a in self.arguments)}>"
        return self.name

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "name": self.name, "target": self.target}
        if self.element is not None:
            data["element"] = self.element.to_dict()
        if self.arguments:
            data["arguments"] = [a.to_dict() for a in self.arguments]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TypeRef":
        element = data.get("element")
        return cls(
            kind=data.get("kind", KIND_UNRESOLVED),
            name=data.get("name", ""),
            target=data.get("target", ""),
            element=cls.from_dict(element) if element else None,
            arguments=tuple(cls.from_dict(a) for a in data.get("arguments", [])),
        )

    @classmethod
    def primitive(cls, name: str) -> "TypeRef":
        return cls(kind=KIND_PRIMITIVE, name=name)


@dataclass(eq=False)
class Expr:
    """Expression node. `args` holds operands: call arguments, binary/unary operands,
    [target, index] for array-index, [target, value] for assignment, [cond, then, else]
    for conditional. `receiver` is None for an implicit `this`."""

    kind: str
    span: Span
    name: str = ""
    receiver: Optional["Expr"] = None
    args: List["Expr"] = field(default_factory=list)
    type_ref: Optional[TypeRef] = None

    def children(self) -> List["Expr"]:
        if self.receiver is None:
            return list(self.args)
        return [self.receiver, *self.args]

    def walk(self) -> Iterator["Expr"]:
        """Pre-order traversal; lambda bodies are opaque."""
        yield self
        for child in self.children():
            yield from child.walk()


@dataclass
class LocalVar:
    name: str
    type_ref: TypeRef
    initializer: Optional[Expr] = None


@dataclass(eq=False)
class Stmt:
    """Statement node. For loops, `exprs` is the per-iteration header (condition, updates,
    or the enhanced-for iterable) and `setup` is the one-shot for-init."""

    kind: str
    span: Span
    index: int = 0
    exprs: List[Expr] = field(default_factory=list)
    body: List["Stmt"] = field(default_factory=list)
    orelse: List["Stmt"] = field(default_factory=list)
    setup: List["Stmt"] = field(default_factory=list)
    declares: List[LocalVar] = field(default_factory=list)

    @property
    def is_loop(self) -> bool:
        return self.kind in LOOP_KINDS

    def walk(self) -> Iterator["Stmt"]:
        yield self
        for child in (*self.setup, *self.body, *self.orelse):
            yield from child.walk()


@dataclass
class FieldDecl:
    name: str
    type_ref: TypeRef
    declaring_class: str
    is_static: bool = False
    span: Optional[Span] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "type": self.type_ref.to_dict(),
            "declaring_class": self.declaring_class,
            "static": self.is_static,
        }


@dataclass
class MethodDecl:
    name: str
    declaring_class: str
    parameters: List[LocalVar] = field(default_factory=list)
    return_type: Optional[TypeRef] = None
    body: List[Stmt] = field(default_factory=list)
    is_static: bool = False
    annotations: Tuple[str, ...] = ()
    span: Optional[Span] = None

    @property
    def arity(self) -> int:
        return len(self.parameters)

    @property
    def key(self) -> str:
        return f"{self.declaring_class}#{self.name}/{self.arity}"

    @property
    def is_constructor(self) -> bool:
        return self.name == "<init>"

    @property
    def returns_boolean(self) -> bool:
        return self.return_type is not None and self.return_type.name in ("boolean", "Boolean")

    def statements(self) -> Iterator[Stmt]:
        for stmt in self.body:
            yield from stmt.walk()


@dataclass
class ClassDecl:
    name: str
    qualified: str
    kind: str = "class"  # "class" | "interface" | "enum"
    type_parameters: Tuple[str, ...] = ()
    superclass: Optional[TypeRef] = None
    fields: List[FieldDecl] = field(default_factory=list)
    methods: List[MethodDecl] = field(default_factory=list)
    outer: Optional[str] = None
    inner: List[str] = field(default_factory=list)  # qualified names of directly nested types
    is_static: bool = False
    path: str = ""
    span: Optional[Span] = None

    @property
    def instance_fields(self) -> List[FieldDecl]:
        return [f for f in self.fields if not f.is_static]

    @property
    def is_stateless(self) -> bool:
        return not self.instance_fields and all(
            m.is_static for m in self.methods if not m.is_constructor
        )

    def field_named(self, name: str) -> Optional[FieldDecl]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "qualified": self.qualified,
            "kind": self.kind,
            "type_parameters": list(self.type_parameters),
            "superclass": self.superclass.to_dict() if self.superclass else None,
            "fields": [f.to_dict() for f in self.fields],
            "methods": [m.key for m in self.methods],
            "outer": self.outer,
            "inner": list(self.inner),
            "path": self.path,
        }


@dataclass
class SourceCorpus:
    """All classes recovered from a set of source files, keyed by qualified name."""

    files: Dict[str, str] = field(default_factory=dict)
    classes: Dict[str, ClassDecl] = field(default_factory=dict)
    diagnostics: List[Diagnostic] = field(default_factory=list)
    resolved: bool = False

    def find_class(self, name: str, context: Optional[str] = None) -> List[ClassDecl]:
        """Classes a (possibly dotted) name can denote, closest lexical scope first."""
        suffix = "." + name
        candidates = [c for q, c in self.classes.items() if q == name or q.endswith(suffix)]
        return sorted(candidates, key=lambda c: (-scope_affinity(context, c.qualified), c.qualified))

    def superclass_chain(self, qualified: str) -> List[ClassDecl]:
        """The class itself followed by its corpus superclasses, nearest first."""
        chain: List[ClassDecl] = []
        seen: set[str] = set()
        current = self.classes.get(qualified)
        while current is not None and current.qualified not in seen:
            chain.append(current)
            seen.add(current.qualified)
            sup = current.superclass
            if sup is None or sup.kind != KIND_CLASS:
                break
            current = self.classes.get(sup.target)
        return chain

    def enclosing_chain(self, qualified: str) -> List[ClassDecl]:
        """The class followed by its lexically enclosing classes, innermost first."""
        chain: List[ClassDecl] = []
        current = self.classes.get(qualified)
        while current is not None:
            chain.append(current)
            current = self.classes.get(current.outer) if current.outer else None
        return chain

    def methods(self) -> Iterator[MethodDecl]:
        for cls in self.classes.values():
            yield from cls.methods

    def to_dict(self) -> Dict[str, Any]:
        return {
            "files": sorted(self.files),
            "classes": [c.to_dict() for c in self.classes.values()],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "resolved": self.resolved,
        }
