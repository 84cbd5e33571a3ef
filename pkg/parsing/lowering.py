"""
Lowering of javalang syntax trees into the sfcov source model.

One `_Lowerer` handles one file. It tracks local scopes so that a bare name is
lowered to an identifier when it denotes a local or parameter and to an implicit
`this` field access otherwise.
"""
from __future__ import annotations

import logging
from typing import Any, Iterable, List, Optional

from javalang import tree as jt

from models.constants import (
    BOXED_TYPES,
    KIND_ARRAY,
    KIND_UNRESOLVED,
    PRIMITIVE_TYPES,
)
from models.source import (
    EXPR_ASSIGN,
    EXPR_BINARY,
    EXPR_CALL,
    EXPR_CAST,
    EXPR_CONDITIONAL,
    EXPR_FIELD,
    EXPR_IDENT,
    EXPR_INDEX,
    EXPR_LAMBDA,
    EXPR_LITERAL,
    EXPR_NEW,
    EXPR_SUPER,
    EXPR_THIS,
    EXPR_UNARY,
    STMT_ASSERT,
    STMT_BLOCK,
    STMT_DO,
    STMT_EXPRESSION,
    STMT_FOR,
    STMT_FOREACH,
    STMT_IF,
    STMT_LOCAL,
    STMT_OTHER,
    STMT_RETURN,
    STMT_SWITCH,
    STMT_SYNC,
    STMT_THROW,
    STMT_TRY,
    STMT_WHILE,
    ClassDecl,
    Expr,
    FieldDecl,
    LocalVar,
    MethodDecl,
    Span,
    Stmt,
    TypeRef,
)

logger = logging.getLogger(__name__)

_TYPE_DECLS = (jt.ClassDeclaration, jt.InterfaceDeclaration, jt.EnumDeclaration)


def _position(node: Any) -> Optional[tuple[int, int]]:
    pos = getattr(node, "position", None) or getattr(node, "_position", None)
    if pos is None:
        return None
    line = getattr(pos, "line", None)
    if line is None:
        line, column = pos[0], pos[1]
    else:
        column = pos.column
    return int(line), int(column)


def _ops(node: Any, attr: str) -> List[str]:
    return list(getattr(node, attr, None) or [])


class _Lowerer:
    def __init__(self, path: str, text: str):
        self.path = path
        self.text = text
        self.line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.line_starts.append(i + 1)
        self.scopes: List[set[str]] = []
        self.stmt_counter = 0
        self.current_span = Span(path, 1, 1, 0)

    # --- Spans and scopes ---

    def span(self, node: Any) -> Span:
        pos = _position(node)
        if pos is None:
            return self.current_span
        line, column = pos
        line = max(1, min(line, len(self.line_starts)))
        offset = min(self.line_starts[line - 1] + max(column, 1) - 1, len(self.text))
        return Span(self.path, line, column, offset)

    def push(self, names: Iterable[str] = ()) -> None:
        self.scopes.append(set(names))

    def pop(self) -> None:
        self.scopes.pop()

    def declare(self, name: str) -> None:
        if self.scopes:
            self.scopes[-1].add(name)

    def is_local(self, name: str) -> bool:
        return any(name in scope for scope in self.scopes)

    # --- Types ---

    def lower_type(self, node: Any, extra_dims: int = 0) -> Optional[TypeRef]:
        if node is None:
            return None
        dims = len(getattr(node, "dimensions", None) or []) + extra_dims
        if isinstance(node, jt.BasicType):
            base = TypeRef.primitive(node.name)
        else:
            parts = [node.name]
            arguments = getattr(node, "arguments", None)
            sub = getattr(node, "sub_type", None)
            while sub is not None:
                parts.append(sub.name)
                arguments = getattr(sub, "arguments", None)
                sub = getattr(sub, "sub_type", None)
            # drop package segments (java.util.List -> List)
            while len(parts) > 1 and parts[0][:1].islower():
                parts.pop(0)
            name = ".".join(parts)
            args = tuple(self._type_argument(a) for a in arguments or [])
            if name in PRIMITIVE_TYPES or name in BOXED_TYPES:
                base = TypeRef.primitive(name)
            else:
                base = TypeRef(kind=KIND_UNRESOLVED, name=name, arguments=args)
        if dims:
            return TypeRef(kind=KIND_ARRAY, name=base.name, element=base)
        return base

    def _type_argument(self, arg: Any) -> TypeRef:
        inner = getattr(arg, "type", arg) if isinstance(arg, jt.TypeArgument) else arg
        lowered = self.lower_type(inner) if inner is not None else None
        return lowered or TypeRef(kind=KIND_UNRESOLVED, name="?")

    # --- Expressions ---

    def lower_expr(self, node: Any) -> Expr:
        span = self.span(node)
        expr = self._lower_primary(node, span)
        for sel in _ops(node, "selectors"):
            expr = self._apply_selector(expr, sel)
        for op in _ops(node, "postfix_operators"):
            expr = Expr(EXPR_UNARY, span, name=f"post{op}", args=[expr])
        for op in reversed(_ops(node, "prefix_operators")):
            expr = Expr(EXPR_UNARY, span, name=op, args=[expr])
        return expr

    def _lower_primary(self, node: Any, span: Span) -> Expr:
        if isinstance(node, jt.Literal):
            return Expr(EXPR_LITERAL, span, name=str(node.value))
        if isinstance(node, jt.This):
            return Expr(EXPR_THIS, span)
        if isinstance(node, jt.MemberReference):
            receiver = self._qualifier_chain(node.qualifier, span)
            if receiver is None and self.is_local(node.member):
                return Expr(EXPR_IDENT, span, name=node.member)
            return Expr(EXPR_FIELD, span, name=node.member, receiver=receiver)
        if isinstance(node, jt.SuperMemberReference):
            return Expr(EXPR_FIELD, span, name=node.member, receiver=Expr(EXPR_SUPER, span))
        if isinstance(node, jt.SuperMethodInvocation):
            return Expr(EXPR_CALL, span, name=node.member, receiver=Expr(EXPR_SUPER, span),
                        args=self._args(node.arguments))
        if isinstance(node, jt.SuperConstructorInvocation):
            return Expr(EXPR_CALL, span, name="<init>", receiver=Expr(EXPR_SUPER, span),
                        args=self._args(node.arguments))
        if isinstance(node, jt.ExplicitConstructorInvocation):
            return Expr(EXPR_CALL, span, name="<init>", receiver=Expr(EXPR_THIS, span),
                        args=self._args(node.arguments))
        if isinstance(node, jt.MethodInvocation):
            receiver = self._qualifier_chain(node.qualifier, span)
            return Expr(EXPR_CALL, span, name=node.member, receiver=receiver,
                        args=self._args(node.arguments))
        if isinstance(node, jt.ClassCreator):
            return Expr(EXPR_NEW, span, name="<init>", type_ref=self.lower_type(node.type),
                        args=self._args(node.arguments))
        if isinstance(node, jt.ArrayCreator):
            dims = [self.lower_expr(d) for d in node.dimensions or [] if d is not None]
            init = [self.lower_expr(node.initializer)] if node.initializer is not None else []
            return Expr(EXPR_NEW, span, name="[]",
                        type_ref=self.lower_type(node.type, extra_dims=max(1, len(node.dimensions or []))),
                        args=dims + init)
        if isinstance(node, jt.ArrayInitializer):
            return Expr(EXPR_NEW, span, name="{}", args=self._args(node.initializers))
        if isinstance(node, jt.BinaryOperation):
            return Expr(EXPR_BINARY, span, name=node.operator,
                        args=[self.lower_expr(node.operandl), self.lower_expr(node.operandr)])
        if isinstance(node, jt.TernaryExpression):
            return Expr(EXPR_CONDITIONAL, span, args=[
                self.lower_expr(node.condition),
                self.lower_expr(node.if_true),
                self.lower_expr(node.if_false),
            ])
        if isinstance(node, jt.Assignment):
            return Expr(EXPR_ASSIGN, span, name=node.type,
                        args=[self.lower_expr(node.expressionl), self.lower_expr(node.value)])
        if isinstance(node, jt.Cast):
            return Expr(EXPR_CAST, span, type_ref=self.lower_type(node.type),
                        args=[self.lower_expr(node.expression)])
        if isinstance(node, (jt.LambdaExpression, jt.MethodReference)):
            return Expr(EXPR_LAMBDA, span)
        if isinstance(node, jt.ClassReference):
            return Expr(EXPR_LITERAL, span, name="class")
        logger.debug("%s:%d: unsupported expression %s", self.path, span.line, type(node).__name__)
        return Expr(EXPR_LITERAL, span, name=type(node).__name__)

    def _args(self, nodes: Optional[list]) -> List[Expr]:
        return [self.lower_expr(a) for a in nodes or []]

    def _qualifier_chain(self, qualifier: Optional[str], span: Span) -> Optional[Expr]:
        """'a.b' -> field b of (local a | implicit field a)."""
        if not qualifier:
            return None
        parts = qualifier.split(".")
        head = parts[0]
        if self.is_local(head):
            expr = Expr(EXPR_IDENT, span, name=head)
        else:
            expr = Expr(EXPR_FIELD, span, name=head)
        for part in parts[1:]:
            expr = Expr(EXPR_FIELD, span, name=part, receiver=expr)
        return expr

    def _apply_selector(self, base: Expr, sel: Any) -> Expr:
        span = self.span(sel) if _position(sel) else base.span
        if isinstance(sel, jt.MethodInvocation):
            return Expr(EXPR_CALL, span, name=sel.member, receiver=base, args=self._args(sel.arguments))
        if isinstance(sel, jt.MemberReference):
            return Expr(EXPR_FIELD, span, name=sel.member, receiver=base)
        if isinstance(sel, jt.ArraySelector):
            return Expr(EXPR_INDEX, span, args=[base, self.lower_expr(sel.index)])
        if isinstance(sel, jt.ClassCreator):
            return Expr(EXPR_NEW, span, name="<init>", type_ref=self.lower_type(sel.type),
                        args=self._args(sel.arguments))
        return base

    # --- Statements ---

    def _stmt(self, kind: str, node: Any, **kwargs: Any) -> Stmt:
        stmt = Stmt(kind, self.span(node), index=self.stmt_counter, **kwargs)
        self.stmt_counter += 1
        return stmt

    def lower_block(self, nodes: Optional[list]) -> List[Stmt]:
        self.push()
        try:
            return [s for s in (self.lower_stmt(n) for n in nodes or []) if s is not None]
        finally:
            self.pop()

    def lower_stmt(self, node: Any) -> Optional[Stmt]:
        if node is None:
            return None
        if _position(node) is not None:
            self.current_span = self.span(node)

        if isinstance(node, jt.BlockStatement):
            stmt = self._stmt(STMT_BLOCK, node)
            stmt.body = self.lower_block(node.statements)
            return stmt
        if isinstance(node, jt.VariableDeclaration):  # also LocalVariableDeclaration
            return self._lower_local(node)
        if isinstance(node, jt.StatementExpression):
            stmt = self._stmt(STMT_EXPRESSION, node)
            stmt.exprs = [self.lower_expr(node.expression)]
            return stmt
        if isinstance(node, jt.ReturnStatement):
            stmt = self._stmt(STMT_RETURN, node)
            stmt.exprs = [self.lower_expr(node.expression)] if node.expression is not None else []
            return stmt
        if isinstance(node, jt.IfStatement):
            stmt = self._stmt(STMT_IF, node)
            stmt.exprs = [self.lower_expr(node.condition)]
            stmt.body = self._single(node.then_statement)
            stmt.orelse = self._single(node.else_statement)
            return stmt
        if isinstance(node, jt.WhileStatement):
            stmt = self._stmt(STMT_WHILE, node)
            stmt.exprs = [self.lower_expr(node.condition)]
            stmt.body = self._single(node.body)
            return stmt
        if isinstance(node, jt.DoStatement):
            stmt = self._stmt(STMT_DO, node)
            stmt.body = self._single(node.body)
            stmt.exprs = [self.lower_expr(node.condition)]
            return stmt
        if isinstance(node, jt.ForStatement):
            return self._lower_for(node)
        if isinstance(node, jt.AssertStatement):
            stmt = self._stmt(STMT_ASSERT, node)
            stmt.exprs = [self.lower_expr(node.condition)]
            if node.value is not None:
                stmt.exprs.append(self.lower_expr(node.value))
            return stmt
        if isinstance(node, jt.ThrowStatement):
            stmt = self._stmt(STMT_THROW, node)
            stmt.exprs = [self.lower_expr(node.expression)]
            return stmt
        if isinstance(node, jt.SynchronizedStatement):
            stmt = self._stmt(STMT_SYNC, node)
            stmt.exprs = [self.lower_expr(node.lock)]
            stmt.body = self.lower_block(node.block)
            return stmt
        if isinstance(node, jt.TryStatement):
            return self._lower_try(node)
        if isinstance(node, jt.SwitchStatement):
            stmt = self._stmt(STMT_SWITCH, node)
            stmt.exprs = [self.lower_expr(node.expression)]
            self.push()
            try:
                for case in node.cases or []:
                    labels = case.case if isinstance(case.case, list) else [case.case]
                    stmt.exprs.extend(self.lower_expr(c) for c in labels if c is not None and not isinstance(c, str))
                    stmt.body.extend(s for s in (self.lower_stmt(n) for n in case.statements or []) if s is not None)
            finally:
                self.pop()
            return stmt
        return self._stmt(STMT_OTHER, node)

    def _single(self, node: Any) -> List[Stmt]:
        self.push()
        try:
            stmt = self.lower_stmt(node)
        finally:
            self.pop()
        return [stmt] if stmt is not None else []

    def _lower_local(self, node: Any) -> Stmt:
        stmt = self._stmt(STMT_LOCAL, node)
        for decl in node.declarators or []:
            type_ref = self.lower_type(node.type, extra_dims=len(decl.dimensions or []))
            init = self.lower_expr(decl.initializer) if decl.initializer is not None else None
            self.declare(decl.name)
            stmt.declares.append(LocalVar(decl.name, type_ref, init))
            if init is not None:
                stmt.exprs.append(init)
        return stmt

    def _lower_for(self, node: Any) -> Stmt:
        control = node.control
        self.push()
        try:
            if isinstance(control, jt.EnhancedForControl):
                stmt = self._stmt(STMT_FOREACH, node)
                stmt.exprs = [self.lower_expr(control.iterable)]
                var = control.var
                declarator = var.declarators[0]
                stmt.declares = [LocalVar(declarator.name, self.lower_type(var.type))]
                self.declare(declarator.name)
            else:
                stmt = self._stmt(STMT_FOR, node)
                init = control.init
                if isinstance(init, jt.VariableDeclaration):
                    stmt.setup = [self._lower_local(init)]
                elif init:
                    for e in init if isinstance(init, list) else [init]:
                        setup = self._stmt(STMT_EXPRESSION, e)
                        setup.exprs = [self.lower_expr(e)]
                        stmt.setup.append(setup)
                if control.condition is not None:
                    stmt.exprs.append(self.lower_expr(control.condition))
                update = control.update or []
                stmt.exprs.extend(self.lower_expr(u) for u in (update if isinstance(update, list) else [update]))
            stmt.body = self._single(node.body)
        finally:
            self.pop()
        return stmt

    def _lower_try(self, node: Any) -> Stmt:
        stmt = self._stmt(STMT_TRY, node)
        self.push()
        try:
            for res in node.resources or []:
                local = self._stmt(STMT_LOCAL, res)
                init = self.lower_expr(res.value) if res.value is not None else None
                local.declares = [LocalVar(res.name, self.lower_type(res.type), init)]
                local.exprs = [init] if init is not None else []
                self.declare(res.name)
                stmt.setup.append(local)
            stmt.body = self.lower_block(node.block)
        finally:
            self.pop()
        for catch in node.catches or []:
            param = catch.parameter
            handler = self._stmt(STMT_BLOCK, catch)
            type_name = (param.types or ["Exception"])[0]
            handler.declares = [LocalVar(param.name, TypeRef(kind=KIND_UNRESOLVED, name=type_name))]
            self.push([param.name])
            try:
                handler.body = self.lower_block(catch.block)
            finally:
                self.pop()
            stmt.orelse.append(handler)
        if node.finally_block:
            final = self._stmt(STMT_BLOCK, node)
            final.body = self.lower_block(node.finally_block)
            stmt.orelse.append(final)
        return stmt

    # --- Declarations ---

    def lower_method(self, node: Any, owner: ClassDecl) -> MethodDecl:
        self.stmt_counter = 0
        self.current_span = self.span(node) if _position(node) else Span(self.path, owner.span.line if owner.span else 1)
        is_ctor = isinstance(node, jt.ConstructorDeclaration)
        params = []
        for p in node.parameters or []:
            type_ref = self.lower_type(p.type, extra_dims=1 if getattr(p, "varargs", False) else 0)
            params.append(LocalVar(p.name, type_ref))
        method = MethodDecl(
            name="<init>" if is_ctor else node.name,
            declaring_class=owner.qualified,
            parameters=params,
            return_type=None if is_ctor else self.lower_type(node.return_type),
            is_static="static" in (node.modifiers or set()),
            annotations=tuple(a.name.split(".")[-1] for a in node.annotations or []),
            span=self.current_span,
        )
        self.push(p.name for p in params)
        try:
            method.body = self.lower_block(node.body)
        finally:
            self.pop()
        return method

    def lower_type_decl(self, node: Any, outer: Optional[ClassDecl] = None) -> List[ClassDecl]:
        """Lower one class/interface/enum and its nested type declarations."""
        kind = "interface" if isinstance(node, jt.InterfaceDeclaration) else (
            "enum" if isinstance(node, jt.EnumDeclaration) else "class"
        )
        modifiers = node.modifiers or set()
        qualified = f"{outer.qualified}.{node.name}" if outer else node.name
        superclass = None
        if isinstance(node, jt.ClassDeclaration) and node.extends is not None:
            superclass = self.lower_type(node.extends)
        cls = ClassDecl(
            name=node.name,
            qualified=qualified,
            kind=kind,
            type_parameters=tuple(tp.name for tp in getattr(node, "type_parameters", None) or []),
            superclass=superclass,
            outer=outer.qualified if outer else None,
            is_static=outer is not None and (
                "static" in modifiers or kind != "class" or outer.kind == "interface"
            ),
            path=self.path,
            span=self.span(node),
        )

        body = node.body
        members: list = []
        if isinstance(body, jt.EnumBody):
            for const in body.constants or []:
                cls.fields.append(FieldDecl(
                    const.name,
                    TypeRef(kind=KIND_UNRESOLVED, name=node.name),
                    qualified,
                    is_static=True,
                    span=self.span(const),
                ))
            members = list(body.declarations or [])
        else:
            members = list(body or [])

        nested: List[ClassDecl] = []
        for member in members:
            if isinstance(member, jt.FieldDeclaration):
                is_static = kind == "interface" or "static" in (member.modifiers or set())
                for decl in member.declarators or []:
                    cls.fields.append(FieldDecl(
                        decl.name,
                        self.lower_type(member.type, extra_dims=len(decl.dimensions or [])),
                        qualified,
                        is_static=is_static,
                        span=self.span(member),
                    ))
            elif isinstance(member, (jt.MethodDeclaration, jt.ConstructorDeclaration)):
                cls.methods.append(self.lower_method(member, cls))
            elif isinstance(member, _TYPE_DECLS):
                lowered = self.lower_type_decl(member, cls)
                cls.inner.append(lowered[0].qualified)
                nested.extend(lowered)
        return [cls, *nested]


def lower_compilation_unit(path: str, text: str, unit: Any) -> List[ClassDecl]:
    """All class declarations of a parsed file, outer classes before their nested ones."""
    lowerer = _Lowerer(path, text)
    classes: List[ClassDecl] = []
    for decl in unit.types or []:
        if isinstance(decl, _TYPE_DECLS):
            classes.extend(lowerer.lower_type_decl(decl))
    return classes
