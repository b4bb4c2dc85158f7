"""Block-scope analysis for Java snippets.

Builds a nested scope tree with declaration records, supporting
visibility queries (is a name declared and in scope at a byte offset?)
and innermost-declaration lookup with shadowing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..syntax import SyntaxTree

# node kinds that open a scope
_SCOPE_KINDS = frozenset([
    "method_declaration", "constructor_declaration", "block",
    "for_statement", "enhanced_for_statement", "catch_clause",
    "try_statement", "initializer_block",
])


@dataclass(frozen=True)
class Declaration:
    name: str
    name_leaf: int  # leaf id of the declared name
    end: int  # byte offset after which the declaration is usable
    scope_id: int
    is_param: bool


@dataclass
class Scope:
    start: int
    end: int
    parent: int  # -1 for the root scope
    depth: int
    children: list[int] = field(default_factory=list)
    declarations: list[int] = field(default_factory=list)


class ScopeTree:
    def __init__(self) -> None:
        self.scopes: list[Scope] = []
        self.declarations: list[Declaration] = []

    def add_scope(self, start: int, end: int, parent: int) -> int:
        depth = 0 if parent < 0 else self.scopes[parent].depth + 1
        self.scopes.append(Scope(start, end, parent, depth))
        sid = len(self.scopes) - 1
        if parent >= 0:
            self.scopes[parent].children.append(sid)
        return sid

    def add_declaration(self, name: str, name_leaf: int, end: int,
                        scope_id: int, is_param: bool = False) -> int:
        self.declarations.append(
            Declaration(name, name_leaf, end, scope_id, is_param))
        did = len(self.declarations) - 1
        self.scopes[scope_id].declarations.append(did)
        return did

    def visible_at(self, name: str, offset: int) -> bool:
        """True iff some declaration of name is usable at the offset."""
        return self.lookup(name, offset) is not None

    def lookup(self, name: str, offset: int) -> Declaration | None:
        """Innermost usable declaration of name at offset (shadowing)."""
        best: Declaration | None = None
        best_rank = (-1, -1)
        for d in self.declarations:
            if d.name != name or d.end > offset:
                continue
            sc = self.scopes[d.scope_id]
            if not (sc.start <= offset < sc.end):
                continue
            rank = (sc.depth, d.end)
            if rank > best_rank:
                best, best_rank = d, rank
        return best

    def local_declarations(self) -> list[Declaration]:
        """Declarations of local variables (parameters excluded)."""
        return [d for d in self.declarations if not d.is_param]


def _declarator_name_leaf(tree: SyntaxTree, declarator: int) -> int:
    name = tree.children(declarator)[0]
    assert tree.kind(name) == "identifier"
    return name


def build_scope_tree(tree: SyntaxTree) -> ScopeTree:
    """One scope per method/block/for-header/catch; declarations recorded
    with their end offsets.  Method parameters live in the method scope,
    which also covers the body."""
    st = ScopeTree()

    def visit(nid: int, scope: int) -> None:
        kind = tree.kind(nid)
        if kind in _SCOPE_KINDS:
            start, end = tree.span(nid)
            if kind in ("method_declaration", "constructor_declaration"):
                # scope starts at the parameter list
                params = next((c for c in tree.children(nid)
                               if tree.kind(c) == "formal_parameters"), None)
                if params is not None:
                    start = tree.span(params)[0]
            scope = st.add_scope(start, end, scope)
        if kind in ("formal_parameter", "spread_parameter"):
            name = next(c for c in reversed(tree.children(nid))
                        if tree.kind(c) == "identifier")
            st.add_declaration(tree.leaf_text(name), name, tree.span(nid)[1],
                               scope, is_param=True)
        elif kind == "local_variable_declaration":
            for c in tree.children(nid):
                if tree.kind(c) == "variable_declarator":
                    name = _declarator_name_leaf(tree, c)
                    st.add_declaration(tree.leaf_text(name), name,
                                       tree.span(c)[1], scope)
        elif kind == "resource":
            name = next(c for c in tree.children(nid)
                        if tree.kind(c) == "identifier")
            st.add_declaration(tree.leaf_text(name), name,
                               tree.span(nid)[1], scope)
        elif kind == "enhanced_for_statement":
            name = next(c for c in tree.children(nid)
                        if tree.kind(c) == "identifier")
            st.add_declaration(tree.leaf_text(name), name,
                               tree.span(name)[1], scope)
        elif kind == "catch_clause":
            name = next(c for c in tree.children(nid)
                        if tree.kind(c) == "identifier")
            st.add_declaration(tree.leaf_text(name), name,
                               tree.span(name)[1], scope, is_param=True)
        for c in tree.children(nid):
            visit(c, scope)

    root_scope = st.add_scope(*tree.span(tree.root), parent=-1)
    visit(tree.root, root_scope)
    return st
