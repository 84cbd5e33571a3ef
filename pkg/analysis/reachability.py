"""
Reachability from an oracle's entry points.

A worklist over (method, loop context) pairs. Calls are resolved by the static type
of their receiver; when that type is unknown every corpus method with the same name
and arity is taken. Loop context is inherited by callees unless strict loop bodies
are requested.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from models.constants import (
    CONTAINER_ELEMENT_METHODS,
    DEFAULT_ASSERT_PREFIXES,
    KIND_ARRAY,
    KIND_CLASS,
    KIND_CONTAINER,
    KIND_TYPE_PARAMETER,
    KIND_UNRESOLVED,
    MODE_TESTS,
)
from models.coverage import FieldAccess, OracleSpec, ReachableCode
from models.source import (
    EXPR_ASSIGN,
    EXPR_CALL,
    EXPR_CAST,
    EXPR_CONDITIONAL,
    EXPR_FIELD,
    EXPR_IDENT,
    EXPR_INDEX,
    EXPR_LAMBDA,
    EXPR_NEW,
    EXPR_SUPER,
    EXPR_THIS,
    Diagnostic,
    Expr,
    FieldDecl,
    MethodDecl,
    SourceCorpus,
    Stmt,
    TypeRef,
)
from parsing.resolve import TypeResolver, find_methods, locate_method, resolve_types

from .oracles import is_assertion_call

logger = logging.getLogger(__name__)

Env = Dict[str, Optional[TypeRef]]


@dataclass(frozen=True)
class AnalysisOptions:
    strict_loop_bodies: bool = False
    recursion_as_iteration: bool = False
    assert_prefixes: Tuple[str, ...] = DEFAULT_ASSERT_PREFIXES


def _opaque(t: Optional[TypeRef]) -> bool:
    """No corpus class behind this type: its members can only be matched by name."""
    return t is None or t.kind in (KIND_UNRESOLVED, KIND_TYPE_PARAMETER)


def _class_type(qualified: str) -> TypeRef:
    return TypeRef(kind=KIND_CLASS, name=qualified.rsplit(".", 1)[-1], target=qualified)


class _Reacher:
    def __init__(self, corpus: SourceCorpus, options: AnalysisOptions):
        self.corpus = corpus
        self.options = options
        self.resolver = TypeResolver(corpus)
        self.reach = ReachableCode()
        self.queue: Deque[Tuple[MethodDecl, bool]] = deque()
        self.done: Set[Tuple[str, bool]] = set()
        self.by_signature: Dict[Tuple[str, int], List[MethodDecl]] = {}
        for m in sorted(corpus.methods(), key=lambda m: m.key):
            self.by_signature.setdefault((m.name, m.arity), []).append(m)
        self._reported: Set[Tuple[str, int, str]] = set()

    # --- Worklist ---

    def enqueue(self, method: MethodDecl, in_loop: bool) -> None:
        if (method.key, in_loop) not in self.done:
            self.done.add((method.key, in_loop))
            self.queue.append((method, in_loop))

    def run(self) -> None:
        while self.queue:
            method, in_loop = self.queue.popleft()
            self.reach.methods[method.key] = self.reach.methods.get(method.key, False) or in_loop
            env: Env = {p.name: p.type_ref for p in method.parameters}
            self._block(method, method.body, env, in_loop, self._expr, mark=True)

    # --- Statements ---

    def _block(self, method: MethodDecl, stmts: Sequence[Stmt], env: Env, in_loop: bool,
               visit: Callable, mark: bool) -> None:
        scope = dict(env)
        for stmt in stmts:
            self._stmt(method, stmt, scope, in_loop, visit, mark)

    def _declare(self, method: MethodDecl, stmt: Stmt, env: Env) -> None:
        for local in stmt.declares:
            t = local.type_ref
            if t is not None and t.name == "var":
                if local.initializer is not None:
                    t = self.type_of(method, local.initializer, env)
                elif stmt.is_loop and stmt.exprs:
                    iterable = self.type_of(method, stmt.exprs[0], env)
                    t = iterable.element if iterable is not None else None
                else:
                    t = None
            env[local.name] = t

    def _stmt(self, method: MethodDecl, stmt: Stmt, env: Env, in_loop: bool,
              visit: Callable, mark: bool) -> None:
        if mark:
            self.reach.mark((method.key, stmt.index), in_loop)
        if stmt.is_loop:
            loop_env = dict(env)
            for setup in stmt.setup:
                self._stmt(method, setup, loop_env, in_loop, visit, mark)
            for expr in stmt.exprs:
                visit(method, expr, loop_env, True)
            self._declare(method, stmt, loop_env)
            self._block(method, stmt.body, loop_env, True, visit, mark)
            return

        inner = dict(env)
        for setup in stmt.setup:
            self._stmt(method, setup, inner, in_loop, visit, mark)
        for expr in stmt.exprs:
            visit(method, expr, env, in_loop)
        self._declare(method, stmt, env)
        self._block(method, stmt.body, inner if stmt.setup else env, in_loop, visit, mark)
        self._block(method, stmt.orelse, env, in_loop, visit, mark)

    # --- Expressions ---

    def _expr(self, method: MethodDecl, expr: Expr, env: Env, in_loop: bool) -> None:
        if expr.kind == EXPR_LAMBDA:
            return
        for child in expr.children():
            self._expr(method, child, env, in_loop)

        if expr.kind == EXPR_FIELD:
            self._record_access(method, expr, env, in_loop)
        elif expr.kind in (EXPR_CALL, EXPR_NEW):
            callees = self.dispatch(method, expr, env)
            if callees is None:
                self._unresolved(method, expr)
                return
            callee_loop = False if self.options.strict_loop_bodies else in_loop
            for callee in callees:
                self.reach.call_edges.append((method.key, callee.key))
                self.enqueue(callee, callee_loop)

    def _record_access(self, method: MethodDecl, expr: Expr, env: Env, in_loop: bool) -> None:
        decl = self.field_decl(method, expr, env)
        if decl is not None:
            declaring: Optional[str] = decl.declaring_class
        elif expr.receiver is not None and expr.receiver.kind not in (EXPR_THIS, EXPR_SUPER) \
                and _opaque(self.type_of(method, expr.receiver, env)):
            declaring = None  # unknown receiver type; matched by field name
        else:
            return
        self.reach.accesses.append(FieldAccess(declaring, expr.name, in_loop, method.key, expr.span.line))

    def _unresolved(self, method: MethodDecl, expr: Expr) -> None:
        key = (method.key, expr.span.line, expr.name)
        if key in self._reported:
            return
        self._reported.add(key)
        self.reach.diagnostics.append(Diagnostic(
            expr.span.path, expr.span.line,
            f"unresolved call {expr.name}/{len(expr.args)} in {method.key}; treated as no-op",
            "info", "unresolved-call",
        ))

    # --- Typing and lookup ---

    def _fields_from(self, qualified: str, name: str) -> Optional[FieldDecl]:
        for cls in self.corpus.superclass_chain(qualified):
            f = cls.field_named(name)
            if f is not None:
                return f
        return None

    def _superclass(self, qualified: str) -> Optional[str]:
        cls = self.corpus.classes.get(qualified)
        if cls is None or cls.superclass is None:
            return None
        return cls.superclass.target

    def field_decl(self, method: MethodDecl, expr: Expr, env: Env) -> Optional[FieldDecl]:
        receiver = expr.receiver
        if receiver is None:
            for cls in self.corpus.enclosing_chain(method.declaring_class):
                f = self._fields_from(cls.qualified, expr.name)
                if f is not None:
                    return f
            return None
        if receiver.kind == EXPR_THIS:
            return self._fields_from(method.declaring_class, expr.name)
        if receiver.kind == EXPR_SUPER:
            sup = self._superclass(method.declaring_class)
            return self._fields_from(sup, expr.name) if sup else None
        t = self.type_of(method, receiver, env)
        if t is not None and t.kind == KIND_CLASS:
            return self._fields_from(t.target, expr.name)
        return None

    def type_of(self, method: MethodDecl, expr: Expr, env: Env) -> Optional[TypeRef]:
        """Static type of an expression, or None when it cannot be determined."""
        kind = expr.kind
        if kind == EXPR_IDENT:
            return env.get(expr.name)
        if kind == EXPR_THIS:
            return _class_type(method.declaring_class)
        if kind == EXPR_SUPER:
            sup = self._superclass(method.declaring_class)
            return _class_type(sup) if sup else None
        if kind == EXPR_FIELD:
            decl = self.field_decl(method, expr, env)
            if decl is not None:
                return decl.type_ref
            return self._static_reference(method, expr, env)
        if kind == EXPR_CALL:
            receiver_type = self.type_of(method, expr.receiver, env) if expr.receiver is not None else None
            if receiver_type is not None and receiver_type.kind == KIND_CONTAINER \
                    and expr.name in CONTAINER_ELEMENT_METHODS:
                return receiver_type.element
            for callee in self.dispatch(method, expr, env) or []:
                if callee.return_type is not None:
                    return callee.return_type
            return None
        if kind == EXPR_INDEX:
            t = self.type_of(method, expr.args[0], env)
            if t is not None and t.kind in (KIND_ARRAY, KIND_CONTAINER):
                return t.element
            return None
        if kind in (EXPR_NEW, EXPR_CAST):
            return expr.type_ref
        if kind == EXPR_ASSIGN:
            return self.type_of(method, expr.args[0], env)
        if kind == EXPR_CONDITIONAL:
            return self.type_of(method, expr.args[1], env) or self.type_of(method, expr.args[2], env)
        return None

    def _static_reference(self, method: MethodDecl, expr: Expr, env: Env) -> Optional[TypeRef]:
        """`Name` or `Outer.Inner` used as a type (static member access)."""
        if expr.receiver is None:
            cls = self.resolver.lookup_class(expr.name, method.declaring_class)
            return _class_type(cls.qualified) if cls else None
        outer = self.type_of(method, expr.receiver, env)
        if outer is not None and outer.kind == KIND_CLASS:
            nested = f"{outer.target}.{expr.name}"
            if nested in self.corpus.classes:
                return _class_type(nested)
        return None

    def _constructors(self, qualified: Optional[str], arity: int) -> List[MethodDecl]:
        cls = self.corpus.classes.get(qualified or "")
        if cls is None:
            return []
        return [m for m in cls.methods if m.is_constructor and m.arity == arity]

    def dispatch(self, method: MethodDecl, expr: Expr, env: Env) -> Optional[List[MethodDecl]]:
        """Corpus methods a call may invoke. An empty list means the callee lies outside
        the corpus; None means nothing matched an unknown receiver."""
        arity = len(expr.args)
        if expr.kind == EXPR_NEW:
            t = expr.type_ref
            return self._constructors(t.target, arity) if t is not None and t.kind == KIND_CLASS else []

        receiver = expr.receiver
        if receiver is None:
            for cls in self.corpus.enclosing_chain(method.declaring_class):
                found = find_methods(self.corpus, cls.qualified, expr.name, arity)
                if found:
                    return found
            return []
        if receiver.kind == EXPR_THIS:
            if expr.name == "<init>":
                return self._constructors(method.declaring_class, arity)
            return find_methods(self.corpus, method.declaring_class, expr.name, arity)
        if receiver.kind == EXPR_SUPER:
            sup = self._superclass(method.declaring_class)
            if sup is None:
                return []
            if expr.name == "<init>":
                return self._constructors(sup, arity)
            return find_methods(self.corpus, sup, expr.name, arity)

        t = self.type_of(method, receiver, env)
        if _opaque(t):
            return list(self.by_signature.get((expr.name, arity), [])) or None
        if t.kind == KIND_CLASS:
            return find_methods(self.corpus, t.target, expr.name, arity)
        return []

    # --- Test-assertion seeding ---

    def seed_assertions(self, test: MethodDecl, assertions: Sequence[Expr]) -> None:
        """Walk the test body for scoping only; analyze just the assertion arguments."""
        # matched by position: the oracle may have been extracted from another copy of the corpus
        wanted = {_expr_position(a) for a in assertions}
        prefixes = self.options.assert_prefixes

        def seek(method: MethodDecl, expr: Expr, env: Env, in_loop: bool) -> None:
            for sub in expr.walk():
                if _expr_position(sub) not in wanted:
                    continue
                seeds = sub.args if is_assertion_call(sub, prefixes) else [sub]
                for seed in seeds:
                    self._expr(method, seed, env, in_loop)

        env: Env = {p.name: p.type_ref for p in test.parameters}
        self._block(test, test.body, env, False, seek, mark=False)


def _expr_position(expr: Expr) -> tuple:
    return (expr.span.path, expr.span.line, expr.span.column, expr.kind, expr.name, len(expr.args))


def _recursive_methods(edges: Sequence[Tuple[str, str]]) -> Set[str]:
    graph = nx.DiGraph()
    graph.add_edges_from(edges)
    recursive: Set[str] = set(nx.nodes_with_selfloops(graph))
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            recursive |= component
    return recursive


def reachable_code(corpus: SourceCorpus, oracle: OracleSpec,
                   options: AnalysisOptions = AnalysisOptions()) -> ReachableCode:
    """Statements and field accesses reachable from one oracle.

    invariants: the entry methods are analyzed in full. tests: only expressions inside
    assertion-call arguments seed the closure; earlier statements of the test body
    only provide local variable types.
    """
    corpus = resolve_types(corpus)
    reacher = _Reacher(corpus, options)

    if oracle.mode == MODE_TESTS:
        test = next((m for m in corpus.methods() if m.key == oracle.test_method), None)
        if test is not None:
            reacher.seed_assertions(test, oracle.assertions)
    else:
        for cls, name, arity in oracle.entry_points:
            reacher.enqueue(locate_method(corpus, cls, name, arity), False)
    reacher.run()

    reach = reacher.reach
    if options.recursion_as_iteration and reach.call_edges:
        recursive = _recursive_methods(reach.call_edges)
        reach.accesses = [
            FieldAccess(a.declaring_class, a.field, True, a.method, a.line) if a.method in recursive else a
            for a in reach.accesses
        ]
        for key in list(reach.statements):
            if key[0] in recursive:
                reach.statements[key] = True
    logger.debug("Oracle %s reaches %d method(s), %d field access(es)",
                 oracle.id, len(reach.methods), len(reach.accesses))
    return reach
