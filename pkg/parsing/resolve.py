"""
Name resolution over a parsed corpus: type references and method lookup.
"""
from __future__ import annotations

import copy
import logging
from dataclasses import replace
from typing import Dict, List, Optional, Tuple

from models.constants import (
    CONTAINER_TYPES,
    KIND_ARRAY,
    KIND_CLASS,
    KIND_CONTAINER,
    KIND_TYPE_PARAMETER,
    KIND_UNRESOLVED,
)
from models.errors import MethodNotFound
from models.source import (
    ClassDecl,
    Diagnostic,
    Expr,
    MethodDecl,
    SourceCorpus,
    TypeRef,
    scope_affinity,
)

logger = logging.getLogger(__name__)


class TypeResolver:
    """Resolves source type names against a corpus, inner scopes before outer ones."""

    def __init__(self, corpus: SourceCorpus):
        self.corpus = corpus
        self.diagnostics: List[Diagnostic] = []
        self._cache: Dict[Tuple[TypeRef, str], TypeRef] = {}
        self._reported: set[Tuple[str, str]] = set()

    def resolve(self, ref: Optional[TypeRef], context: str) -> Optional[TypeRef]:
        if ref is None:
            return None
        key = (ref, context)
        if key not in self._cache:
            self._cache[key] = self._resolve(ref, context)
        return self._cache[key]

    def _resolve(self, ref: TypeRef, context: str) -> TypeRef:
        if ref.kind == KIND_ARRAY:
            return replace(ref, element=self.resolve(ref.element, context))
        if ref.kind != KIND_UNRESOLVED:
            return ref

        args = tuple(self.resolve(a, context) for a in ref.arguments)
        if "." not in ref.name:
            param_owner = self._type_parameter_owner(ref.name, context)
            if param_owner is not None:
                return TypeRef(kind=KIND_TYPE_PARAMETER, name=ref.name, target=param_owner)

        cls = self.lookup_class(ref.name, context)
        if cls is not None:
            return TypeRef(kind=KIND_CLASS, name=ref.name, target=cls.qualified, arguments=args)

        simple = ref.name.rsplit(".", 1)[-1]
        if simple in CONTAINER_TYPES:
            element = args[-1] if args else None
            return TypeRef(kind=KIND_CONTAINER, name=simple, target=simple, element=element, arguments=args)
        return replace(ref, arguments=args)

    def _type_parameter_owner(self, name: str, context: str) -> Optional[str]:
        for cls in self.corpus.enclosing_chain(context):
            if name in cls.type_parameters:
                return cls.qualified
            if cls.is_static:
                break
        return None

    def lookup_class(self, name: str, context: Optional[str]) -> Optional[ClassDecl]:
        candidates = self.corpus.find_class(name, context)
        if not candidates:
            return None
        best = candidates[0]
        if len(candidates) > 1 and (
            scope_affinity(context, candidates[1].qualified) == scope_affinity(context, best.qualified)
        ):
            key = (name, context or "")
            if key not in self._reported:
                self._reported.add(key)
                cls = self.corpus.classes.get(context or "")
                self.diagnostics.append(Diagnostic(
                    cls.path if cls else "",
                    cls.span.line if cls and cls.span else 0,
                    f"ambiguous type {name} in {context}: "
                    f"{', '.join(c.qualified for c in candidates)}; using {best.qualified}",
                    "warning",
                    "ambiguous-type",
                ))
        return best


def _resolve_exprs(resolver: TypeResolver, exprs: List[Expr], context: str) -> None:
    for root in exprs:
        for expr in root.walk():
            if expr.type_ref is not None:
                expr.type_ref = resolver.resolve(expr.type_ref, context)


def resolve_types(corpus: SourceCorpus) -> SourceCorpus:
    """Return a copy of the corpus with every type reference resolved.

    Names declared in the corpus become kind=class, type parameters of an enclosing
    class become kind=type-parameter, known collection names become containers, and
    anything else stays unresolved. Already-resolved corpora are returned as-is.
    """
    if corpus.resolved:
        return corpus
    out = copy.deepcopy(corpus)
    resolver = TypeResolver(out)

    for cls in out.classes.values():
        ctx = cls.qualified
        cls.superclass = resolver.resolve(cls.superclass, ctx)
        if cls.superclass is not None and cls.superclass.kind != KIND_CLASS:
            cls.superclass = None  # library superclass; contributes no fields
        for f in cls.fields:
            f.type_ref = resolver.resolve(f.type_ref, ctx)
        for method in cls.methods:
            method.return_type = resolver.resolve(method.return_type, ctx)
            for p in method.parameters:
                p.type_ref = resolver.resolve(p.type_ref, ctx)
            for stmt in method.statements():
                for local in stmt.declares:
                    local.type_ref = resolver.resolve(local.type_ref, ctx)
                _resolve_exprs(resolver, stmt.exprs, ctx)

    out.diagnostics.extend(resolver.diagnostics)
    out.resolved = True
    logger.debug("Resolved types for %d class(es)", len(out.classes))
    return out


def find_methods(corpus: SourceCorpus, class_name: str, name: str, arity: int) -> List[MethodDecl]:
    """Methods `name/arity` visible on a class: its own declaration or the nearest
    superclass declaration."""
    for cls in corpus.superclass_chain(class_name):
        matches = [m for m in cls.methods if m.name == name and m.arity == arity]
        if matches:
            return matches
    return []


def locate_method(corpus: SourceCorpus, class_name: str, name: str, arity: int) -> MethodDecl:
    """Find `name/arity` on a class or its superclasses; raises MethodNotFound."""
    qualified = class_name
    if qualified not in corpus.classes:
        candidates = corpus.find_class(class_name)
        if candidates:
            qualified = candidates[0].qualified
    matches = find_methods(corpus, qualified, name, arity)
    if not matches:
        raise MethodNotFound(class_name, name, arity)
    return matches[0]
