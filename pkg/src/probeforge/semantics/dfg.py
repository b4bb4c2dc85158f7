"""Data-flow-graph extraction over Java syntax trees.

Edge semantics:

* ``comesFrom`` — a variable use outside an assignment right-hand side is
  linked to every reaching definition of the variable; a variable whose
  initializer/assigned value is a bare literal is linked to that literal.
* ``computedFrom`` — an assigned variable is linked to every variable
  occurrence in its right-hand side (uses inside an RHS contribute these
  edges instead of ``comesFrom`` edges).

Reaching definitions are computed per method by abstract interpretation
of the statement tree with merge at branch joins and fixpoint iteration
at loops.  Only simple-name locals participate; field accesses, method
callees and member names are opaque.  Assignments to undeclared simple
names (common in snippet corpora) introduce a synthetic method-level
variable.

Edges are flattened to source-position order: ``src`` is always the
earlier leaf, ``dst`` the later one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..syntax import SyntaxTree, STATEMENT_KINDS
from .scopes import ScopeTree, build_scope_tree

COMES_FROM = "comesFrom"
COMPUTED_FROM = "computedFrom"

_LITERAL_SUFFIX = "_literal"

_MAX_LOOP_ITER = 32


@dataclass(frozen=True, order=True)
class DfgEdge:
    src: int  # leaf id, earlier in source order
    dst: int  # leaf id, later in source order
    kind: str


@dataclass(frozen=True)
class CandidatePair:
    a: int
    b: int
    label: str  # none | comesFrom | computedFrom


def _is_literal(tree: SyntaxTree, nid: int) -> bool:
    return tree.kind(nid).endswith(_LITERAL_SUFFIX)


class _MethodDfg:
    """Abstract interpreter for one method body."""

    def __init__(self, tree: SyntaxTree, scopes: ScopeTree):
        self.tree = tree
        self.scopes = scopes
        self.decl_by_leaf = {d.name_leaf: i for i, d in enumerate(scopes.declarations)}
        self.synthetic: dict[str, str] = {}
        self.edges: set[tuple[int, int, str]] = set()

    # --- symbols --------------------------------------------------------

    def _resolve_use(self, leaf: int):
        name = self.tree.leaf_text(leaf)
        d = self.scopes.lookup(name, self.tree.span(leaf)[0])
        if d is not None:
            return ("d", self.scopes.declarations.index(d))
        if name in self.synthetic:
            return ("s", name)
        return None

    def _resolve_target(self, leaf: int):
        sym = self._resolve_use(leaf)
        if sym is not None:
            return sym
        name = self.tree.leaf_text(leaf)
        self.synthetic[name] = name
        return ("s", name)

    # --- edges ----------------------------------------------------------

    def _emit(self, a: int, b: int, kind: str) -> None:
        if a == b:
            return
        if self.tree.span(a)[0] > self.tree.span(b)[0]:
            a, b = b, a
        self.edges.add((a, b, kind))

    def _comes_from_defs(self, use_leaf: int, env, sym) -> None:
        for def_leaf in env.get(sym, ()):  # no defs -> no edge
            self._emit(def_leaf, use_leaf, COMES_FROM)

    # --- expression walking --------------------------------------------

    def _use_occurrences(self, nid: int, env) -> list[int]:
        """Identifier use occurrences in an expression, processing nested
        assignments/updates along the way (those mutate env and do not
        contribute occurrences)."""
        t = self.tree
        kind = t.kind(nid)
        if kind == "identifier":
            return [nid]
        if kind == "assignment_expression":
            self._assignment(nid, env)
            return []
        if kind == "update_expression":
            self._update(nid, env)
            return []
        if kind == "method_invocation":
            kids = t.children(nid)
            out: list[int] = []
            # [name, args] or [obj, '.', name, args]: skip the callee name
            for c in kids[:-1][:-1] if len(kids) > 2 else []:
                out.extend(self._use_occurrences(c, env))
            out.extend(self._use_occurrences(kids[-1], env))
            return out
        if kind == "field_access":
            # walk the object only; the member name is opaque
            return self._use_occurrences(t.children(nid)[0], env)
        if kind in ("cast_expression", "instanceof_expression",
                    "object_creation_expression", "array_creation_expression"):
            out = []
            for c in t.children(nid):
                ck = t.kind(c)
                if ck.endswith("_type") or ck in ("type_identifier", "generic_type",
                                                  "scoped_type_identifier"):
                    continue
                out.extend(self._use_occurrences(c, env))
            return out
        if t.is_leaf(nid):
            return []
        out = []
        for c in t.children(nid):
            out.extend(self._use_occurrences(c, env))
        return out

    def _eval_uses(self, nid: int, env) -> None:
        """Plain-use context: every resolved occurrence links to its
        reaching definitions."""
        for leaf in self._use_occurrences(nid, env):
            sym = self._resolve_use(leaf)
            if sym is not None:
                self._comes_from_defs(leaf, env, sym)

    def _strip_parens(self, nid: int) -> int:
        while self.tree.kind(nid) == "parenthesized_expression":
            nid = self.tree.children(nid)[1]
        return nid

    def _bind_rhs(self, target_leaf: int, sym, rhs: int, env) -> None:
        """Common RHS handling for declarators and simple assignments."""
        rhs_core = self._strip_parens(rhs)
        if _is_literal(self.tree, rhs_core):
            self._emit(target_leaf, rhs_core, COMES_FROM)
        else:
            for leaf in self._use_occurrences(rhs, env):
                if self._resolve_use(leaf) is not None:
                    self._emit(target_leaf, leaf, COMPUTED_FROM)
        env[sym] = frozenset([target_leaf])

    def _assignment(self, nid: int, env) -> None:
        kids = self.tree.children(nid)
        lhs, rhs = kids[0], kids[-1]
        op = "".join(self.tree.leaf_text(c) for c in kids[1:-1])
        if self.tree.kind(lhs) == "identifier":
            sym = self._resolve_target(lhs)
            if op != "=":  # compound assignment also reads the target
                self._comes_from_defs(lhs, env, sym)
            self._bind_rhs(lhs, sym, rhs, env)
        else:
            # opaque target (field/array element): everything is a plain use
            self._eval_uses(lhs, env)
            self._eval_uses(rhs, env)

    def _update(self, nid: int, env) -> None:
        operand = next((c for c in self.tree.children(nid)
                        if self.tree.kind(c) not in ("++", "--")), None)
        if operand is not None and self.tree.kind(operand) == "identifier":
            sym = self._resolve_target(operand)
            self._comes_from_defs(operand, env, sym)
            env[sym] = frozenset([operand])
        elif operand is not None:
            self._eval_uses(operand, env)

    # --- statements -----------------------------------------------------

    def _declaration(self, nid: int, env) -> None:
        for c in self.tree.children(nid):
            if self.tree.kind(c) != "variable_declarator":
                continue
            kids = self.tree.children(c)
            name = kids[0]
            did = self.decl_by_leaf.get(name)
            sym = ("d", did) if did is not None else self._resolve_target(name)
            eq = next((i for i, k in enumerate(kids)
                       if self.tree.is_leaf(k) and self.tree.leaf_text(k) == "="), None)
            if eq is None:
                env[sym] = frozenset()  # declared, no value yet
            else:
                self._bind_rhs(name, sym, kids[eq + 1], env)

    def transfer(self, nid: int, env):
        t = self.tree
        kind = t.kind(nid)
        if kind == "block":
            for c in t.children(nid):
                if not t.is_leaf(c):
                    env = self.transfer(c, env)
            return env
        if kind == "local_variable_declaration":
            self._declaration(nid, env)
            return env
        if kind == "expression_statement":
            self._eval_uses(t.children(nid)[0], env)
            return env
        if kind == "if_statement":
            kids = t.children(nid)
            self._eval_uses(kids[2], env)
            then_env = self.transfer(kids[4], dict(env))
            else_env = self.transfer(kids[6], dict(env)) if len(kids) > 6 else env
            return _merge(then_env, else_env)
        if kind == "while_statement":
            kids = t.children(nid)
            return self._loop(env, cond=kids[2], body=kids[4])
        if kind == "do_statement":
            kids = t.children(nid)
            env = self.transfer(kids[1], env)
            self._eval_uses(kids[4], env)
            return self._loop(env, cond=kids[4], body=kids[1])
        if kind == "for_statement":
            return self._for(nid, env)
        if kind == "enhanced_for_statement":
            return self._enhanced_for(nid, env)
        if kind in ("return_statement", "throw_statement"):
            kids = t.children(nid)
            if len(kids) > 2 or (len(kids) == 2 and t.kind(kids[1]) != ";"):
                self._eval_uses(kids[1], env)
            return env
        if kind == "try_statement":
            return self._try(nid, env)
        if kind == "switch_statement":
            kids = t.children(nid)
            self._eval_uses(kids[2], env)
            body_env = dict(env)
            for c in kids[5:-1]:
                if t.kind(c) == "switch_label":
                    for e in t.children(c):
                        if not t.is_leaf(e):
                            self._eval_uses(e, body_env)
                elif not t.is_leaf(c):
                    body_env = self.transfer(c, body_env)
            return _merge(env, body_env)
        if kind == "synchronized_statement":
            kids = t.children(nid)
            self._eval_uses(kids[2], env)
            return self.transfer(kids[4], env)
        if kind == "assert_statement":
            for c in t.children(nid):
                if not t.is_leaf(c):
                    self._eval_uses(c, env)
            return env
        if kind == "labeled_statement":
            return self.transfer(t.children(nid)[2], env)
        if kind in ("empty_statement", "break_statement", "continue_statement"):
            return env
        if kind in STATEMENT_KINDS:
            return env
        return env

    def _loop(self, env_in, cond: int | None, body: int):
        env_head = dict(env_in)
        for _ in range(_MAX_LOOP_ITER):
            if cond is not None:
                self._eval_uses(cond, env_head)
            body_out = self.transfer(body, dict(env_head))
            merged = _merge(env_in, body_out)
            if merged == env_head:
                return env_head
            env_head = merged
        return env_head

    def _for(self, nid: int, env):
        t = self.tree
        kids = t.children(nid)
        body = kids[-1]
        inner = kids[2:-2]  # between '(' and ')'
        i = 0
        init_nodes: list[int] = []
        if inner and t.kind(inner[0]) == "local_variable_declaration":
            init_nodes = [inner[0]]
            i = 1
        else:
            while i < len(inner) and not (t.is_leaf(inner[i]) and t.leaf_text(inner[i]) == ";"):
                init_nodes.append(inner[i])
                i += 1
            i += 1  # skip ';'
        cond = None
        while i < len(inner):
            if t.is_leaf(inner[i]) and t.leaf_text(inner[i]) == ";":
                i += 1
                break
            cond = inner[i]
            i += 1
        updates = [c for c in inner[i:] if not t.is_leaf(c)]

        for c in init_nodes:
            if t.kind(c) == "local_variable_declaration":
                self._declaration(c, env)
            elif not t.is_leaf(c):
                self._eval_uses(c, env)

        def body_and_update(env2):
            env2 = self.transfer(body, env2)
            for u in updates:
                self._eval_uses(u, env2)
            return env2

        env_head = dict(env)
        for _ in range(_MAX_LOOP_ITER):
            if cond is not None:
                self._eval_uses(cond, env_head)
            out = body_and_update(dict(env_head))
            merged = _merge(env, out)
            if merged == env_head:
                return env_head
            env_head = merged
        return env_head

    def _enhanced_for(self, nid: int, env):
        t = self.tree
        kids = t.children(nid)
        body = kids[-1]
        var = next(c for c in kids if t.kind(c) == "identifier")
        colon = kids.index(next(c for c in kids
                                if t.is_leaf(c) and t.leaf_text(c) == ":"))
        iterable = kids[colon + 1]
        self._eval_uses(iterable, env)
        did = self.decl_by_leaf.get(var)
        sym = ("d", did) if did is not None else self._resolve_target(var)
        env[sym] = frozenset([var])
        env_head = dict(env)
        for _ in range(_MAX_LOOP_ITER):
            out = self.transfer(body, dict(env_head))
            merged = _merge(env, out)
            if merged == env_head:
                return env_head
            env_head = merged
        return env_head

    def _try(self, nid: int, env):
        t = self.tree
        kids = t.children(nid)
        for c in kids:
            if t.kind(c) == "resource_specification":
                for r in t.children(c):
                    if t.kind(r) != "resource":
                        continue
                    rkids = t.children(r)
                    name = next(k for k in rkids if t.kind(k) == "identifier")
                    did = self.decl_by_leaf.get(name)
                    sym = ("d", did) if did is not None else self._resolve_target(name)
                    self._bind_rhs(name, sym, rkids[-1], env)
        body = next(c for c in kids if t.kind(c) == "block")
        body_out = self.transfer(body, dict(env))
        outs = [body_out]
        catch_in = _merge(env, body_out)
        for c in kids:
            if t.kind(c) == "catch_clause":
                cblock = t.children(c)[-1]
                outs.append(self.transfer(cblock, dict(catch_in)))
        out = outs[0]
        for o in outs[1:]:
            out = _merge(out, o)
        for c in kids:
            if t.kind(c) == "finally_clause":
                out = self.transfer(t.children(c)[-1], out)
        return out


def _merge(a: dict, b: dict) -> dict:
    if a is b:
        return dict(a)
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, frozenset()) | v
    return out


def _method_bodies(tree: SyntaxTree):
    """(body-ish root, params) per method/constructor/initializer block."""
    for nid in tree.subtree(tree.root):
        kind = tree.kind(nid)
        if kind in ("method_declaration", "constructor_declaration"):
            body = next((c for c in tree.children(nid)
                         if tree.kind(c) == "block"), None)
            params = next((c for c in tree.children(nid)
                           if tree.kind(c) == "formal_parameters"), None)
            if body is not None:
                yield body, params
        elif kind == "initializer_block":
            body = next((c for c in tree.children(nid)
                         if tree.kind(c) == "block"), None)
            if body is not None:
                yield body, None


def extract_dfg(tree: SyntaxTree) -> list[DfgEdge]:
    """All comesFrom/computedFrom edges of a snippet, position-ordered."""
    scopes = build_scope_tree(tree)
    edges: set[tuple[int, int, str]] = set()
    for body, params in _method_bodies(tree):
        m = _MethodDfg(tree, scopes)
        env: dict = {}
        if params is not None:
            for p in tree.children(params):
                if tree.kind(p) in ("formal_parameter", "spread_parameter"):
                    name = next(c for c in reversed(tree.children(p))
                                if tree.kind(c) == "identifier")
                    did = m.decl_by_leaf.get(name)
                    if did is not None:
                        env[("d", did)] = frozenset([name])
        m.transfer(body, env)
        edges |= m.edges
    return sorted(
        (DfgEdge(a, b, k) for a, b, k in edges),
        key=lambda e: (tree.span(e.src), tree.span(e.dst), e.kind),
    )


def sample_negative_pairs(tree: SyntaxTree, edges: list[DfgEdge],
                          count: int, seed: int) -> list[CandidatePair]:
    """Seeded sample of unconnected (identifier|literal, identifier|literal)
    leaf pairs; fewer than count if the pool is exhausted."""
    if count <= 0:
        return []
    pool_leaves = [lid for lid in tree.leaves()
                   if tree.kind(lid) == "identifier" or _is_literal(tree, lid)]
    connected = {(e.src, e.dst) for e in edges}
    connected |= {(b, a) for a, b in connected}
    pairs = [(a, b)
             for i, a in enumerate(pool_leaves)
             for b in pool_leaves[i + 1:]
             if (a, b) not in connected]
    rng = random.Random(seed)
    chosen = rng.sample(pairs, min(count, len(pairs)))
    chosen.sort(key=lambda p: (tree.span(p[0]), tree.span(p[1])))
    return [CandidatePair(a, b, "none") for a, b in chosen]
