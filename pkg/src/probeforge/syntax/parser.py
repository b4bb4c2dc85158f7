"""Recursive-descent parser for a practical subset of Java.

Produces a concrete syntax tree in which every lexed token appears as a
leaf, so leaf spans tile the non-whitespace bytes of the input.  The
subset covers the constructs that occur in ordinary Java functions:
classes/interfaces/enums, fields, methods, constructors, the full
statement repertoire (if/while/do/for/enhanced-for/try/switch/
synchronized/return/throw/break/continue/assert), and expressions with
standard precedence including casts, generics, object/array creation and
array initializers.  Lambdas and method references are not supported;
inputs using them fail with :class:`ParseError`.
"""

from __future__ import annotations

from .lexer import Token, tokenize, LexError

PRIMITIVE_TYPES = frozenset(
    ["boolean", "byte", "char", "short", "int", "long", "float", "double"]
)
MODIFIER_KEYWORDS = frozenset(
    ["public", "protected", "private", "static", "final", "abstract", "native",
     "synchronized", "transient", "volatile", "strictfp", "default"]
)

STATEMENT_KINDS = frozenset(
    ["block", "local_variable_declaration", "expression_statement",
     "if_statement", "while_statement", "do_statement", "for_statement",
     "enhanced_for_statement", "return_statement", "throw_statement",
     "break_statement", "continue_statement", "try_statement",
     "switch_statement", "synchronized_statement", "assert_statement",
     "empty_statement", "labeled_statement"]
)


class ParseError(Exception):
    """Input is not parseable by the supported Java subset."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


class Node:
    __slots__ = ("kind", "children", "start", "end", "text")

    def __init__(self, kind: str, children: list["Node"], start: int, end: int,
                 text: str | None = None):
        self.kind = kind
        self.children = children
        self.start = start
        self.end = end
        self.text = text

    @property
    def is_leaf(self) -> bool:
        return self.text is not None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Node({self.kind!r}, [{self.start},{self.end}))"


def _leaf(tok: Token) -> Node:
    return Node(tok.kind, [], tok.start, tok.end, tok.text)


def _node(kind: str, children: list[Node]) -> Node:
    if not children:
        raise ParseError(f"empty {kind} node")
    return Node(kind, children, children[0].start, children[-1].end)


_ASSIGN_OPS = frozenset(["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="])

# Binary precedence levels, loosest first.  '>'-based shift ops are handled
# specially (adjacent '>' tokens).
_BINARY_LEVELS = [
    ["||"], ["&&"], ["|"], ["^"], ["&"], ["==", "!="],
    ["<", ">", "<=", ">=", "instanceof"],
    ["<<"],  # '>>'/'>>>' matched by adjacency at this level
    ["+", "-"], ["*", "/", "%"],
]
_SHIFT_LEVEL = 7


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.n = len(tokens)

    # --- token helpers -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.toks[i] if i < self.n else None

    def at(self, kind: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t is not None and t.kind == kind

    def accept(self, kind: str) -> Node | None:
        if self.at(kind):
            tok = self.toks[self.pos]
            self.pos += 1
            return _leaf(tok)
        return None

    def expect(self, kind: str) -> Node:
        got = self.accept(kind)
        if got is None:
            t = self.peek()
            where = t.start if t else (self.toks[-1].end if self.toks else 0)
            found = t.kind if t else "<eof>"
            raise ParseError(f"expected {kind!r}, found {found!r}", where)
        return got

    def take(self) -> Node:
        if self.pos >= self.n:
            raise ParseError("unexpected end of input")
        tok = self.toks[self.pos]
        self.pos += 1
        return _leaf(tok)

    def _adjacent(self, a: int, b: int) -> bool:
        ta, tb = self.peek(a), self.peek(b)
        return ta is not None and tb is not None and ta.end == tb.start

    # --- entry points --------------------------------------------------

    def compilation_unit(self) -> Node:
        children: list[Node] = []
        if self.at("package"):
            kids = [self.take(), self._qualified_name(), self.expect(";")]
            children.append(_node("package_declaration", kids))
        while self.at("import"):
            kids = [self.take()]
            if self.at("static"):
                kids.append(self.take())
            kids.append(self._qualified_name())
            if self.at("."):
                kids.append(self.take())
                kids.append(self.expect("*"))
            kids.append(self.expect(";"))
            children.append(_node("import_declaration", kids))
        while self.pos < self.n:
            children.append(self._type_declaration())
        if not children:
            raise ParseError("empty compilation unit")
        return _node("program", children)

    # --- declarations --------------------------------------------------

    def _qualified_name(self) -> Node:
        parts = [self.expect("identifier")]
        while self.at(".") and self.at("identifier", 1):
            parts.append(self.take())
            parts.append(self.take())
        return parts[0] if len(parts) == 1 else _node("scoped_identifier", parts)

    def _modifiers(self) -> Node | None:
        kids: list[Node] = []
        while True:
            t = self.peek()
            if t is None:
                break
            if t.kind in MODIFIER_KEYWORDS:
                # 'default' only acts as a modifier inside interface bodies;
                # 'synchronized' only when not followed by '('
                if t.kind == "synchronized" and self.at("(", 1):
                    break
                kids.append(self.take())
            elif t.kind == "@" and self.at("interface", 1):
                break
            elif t.kind == "@":
                kids.append(self._annotation())
            else:
                break
        return _node("modifiers", kids) if kids else None

    def _annotation(self) -> Node:
        kids = [self.expect("@"), self._qualified_name()]
        if self.at("("):
            kids.append(self._balanced_parens())
        return _node("annotation", kids)

    def _balanced_parens(self) -> Node:
        kids = [self.expect("(")]
        depth = 1
        while depth > 0:
            t = self.peek()
            if t is None:
                raise ParseError("unbalanced annotation arguments")
            if t.kind == "(":
                depth += 1
            elif t.kind == ")":
                depth -= 1
            kids.append(self.take())
        return _node("annotation_argument_list", kids)

    def _type_declaration(self) -> Node:
        mods = self._modifiers()
        prefix = [mods] if mods else []
        if self.at("class"):
            return self._class_declaration(prefix)
        if self.at("interface"):
            return self._interface_declaration(prefix)
        if self.at("enum"):
            return self._enum_declaration(prefix)
        t = self.peek()
        raise ParseError("expected type declaration", t.start if t else -1)

    def _class_declaration(self, prefix: list[Node]) -> Node:
        kids = prefix + [self.expect("class"), self.expect("identifier")]
        if self.at("<"):
            kids.append(self._type_parameters())
        if self.at("extends"):
            kids.append(_node("superclass", [self.take(), self._type()]))
        if self.at("implements"):
            sub = [self.take(), self._type()]
            while self.at(","):
                sub.append(self.take())
                sub.append(self._type())
            kids.append(_node("super_interfaces", sub))
        kids.append(self._class_body())
        return _node("class_declaration", kids)

    def _interface_declaration(self, prefix: list[Node]) -> Node:
        kids = prefix + [self.expect("interface"), self.expect("identifier")]
        if self.at("<"):
            kids.append(self._type_parameters())
        if self.at("extends"):
            sub = [self.take(), self._type()]
            while self.at(","):
                sub.append(self.take())
                sub.append(self._type())
            kids.append(_node("extends_interfaces", sub))
        kids.append(self._class_body())
        return _node("interface_declaration", kids)

    def _enum_declaration(self, prefix: list[Node]) -> Node:
        kids = prefix + [self.expect("enum"), self.expect("identifier")]
        if self.at("implements"):
            sub = [self.take(), self._type()]
            while self.at(","):
                sub.append(self.take())
                sub.append(self._type())
            kids.append(_node("super_interfaces", sub))
        body = [self.expect("{")]
        while self.at("identifier") or self.at("@"):
            const = []
            while self.at("@"):
                const.append(self._annotation())
            const.append(self.expect("identifier"))
            if self.at("("):
                const.append(self._argument_list())
            if self.at("{"):
                const.append(self._class_body())
            body.append(_node("enum_constant", const))
            if self.at(","):
                body.append(self.take())
            else:
                break
        if self.at(";"):
            body.append(self.take())
            while not self.at("}"):
                body.append(self._class_member())
        body.append(self.expect("}"))
        kids.append(_node("enum_body", body))
        return _node("enum_declaration", kids)

    def _type_parameters(self) -> Node:
        kids = [self.expect("<")]
        while True:
            sub = [self.expect("identifier")]
            if self.at("extends"):
                sub.append(self.take())
                sub.append(self._type())
                while self.at("&"):
                    sub.append(self.take())
                    sub.append(self._type())
            kids.append(_node("type_parameter", sub))
            if self.at(","):
                kids.append(self.take())
            else:
                break
        kids.append(self.expect(">"))
        return _node("type_parameters", kids)

    def _class_body(self) -> Node:
        kids = [self.expect("{")]
        while not self.at("}"):
            kids.append(self._class_member())
        kids.append(self.expect("}"))
        return _node("class_body", kids)

    def _class_member(self) -> Node:
        if self.at(";"):
            return _node("empty_statement", [self.take()])
        if self.at("{"):
            return _node("initializer_block", [self.block()])
        if self.at("static") and self.at("{", 1):
            return _node("initializer_block", [self.take(), self.block()])
        mods = self._modifiers()
        prefix = [mods] if mods else []
        if self.at("class"):
            return self._class_declaration(prefix)
        if self.at("interface"):
            return self._interface_declaration(prefix)
        if self.at("enum"):
            return self._enum_declaration(prefix)
        if self.at("<"):
            prefix.append(self._type_parameters())
        # constructor: Name (
        if self.at("identifier") and self.at("(", 1):
            kids = prefix + [self.take(), self._formal_parameters()]
            if self.at("throws"):
                kids.append(self._throws_clause())
            kids.append(self.block())
            return _node("constructor_declaration", kids)
        # method or field: starts with a type (or void)
        if self.at("void"):
            type_node = _node("void_type", [self.take()])
        else:
            type_node = self._type()
        name = self.expect("identifier")
        if self.at("("):
            kids = prefix + [type_node, name, self._formal_parameters()]
            while self.at("[") and self.at("]", 1):
                kids.append(self.take())
                kids.append(self.take())
            if self.at("throws"):
                kids.append(self._throws_clause())
            if self.at(";"):
                kids.append(self.take())
            else:
                kids.append(self.block())
            return _node("method_declaration", kids)
        kids = prefix + [type_node, self._variable_declarator(first_name=name)]
        while self.at(","):
            kids.append(self.take())
            kids.append(self._variable_declarator())
        kids.append(self.expect(";"))
        return _node("field_declaration", kids)

    def _throws_clause(self) -> Node:
        kids = [self.expect("throws"), self._type()]
        while self.at(","):
            kids.append(self.take())
            kids.append(self._type())
        return _node("throws", kids)

    def _formal_parameters(self) -> Node:
        kids = [self.expect("(")]
        if not self.at(")"):
            while True:
                kids.append(self._formal_parameter())
                if self.at(","):
                    kids.append(self.take())
                else:
                    break
        kids.append(self.expect(")"))
        return _node("formal_parameters", kids)

    def _formal_parameter(self) -> Node:
        sub: list[Node] = []
        while self.at("final") or self.at("@"):
            sub.append(self.take() if self.at("final") else self._annotation())
        sub.append(self._type())
        spread = False
        if self.at("..."):
            sub.append(self.take())
            spread = True
        sub.append(self.expect("identifier"))
        while self.at("[") and self.at("]", 1):
            sub.append(self.take())
            sub.append(self.take())
        return _node("spread_parameter" if spread else "formal_parameter", sub)

    # --- types ---------------------------------------------------------

    def _type(self) -> Node:
        t = self.peek()
        if t is None:
            raise ParseError("expected type")
        if t.kind in PRIMITIVE_TYPES:
            base = _node("primitive_type", [self.take()])
        elif t.kind == "identifier":
            base = self._class_type()
        else:
            raise ParseError(f"expected type, found {t.kind!r}", t.start)
        dims: list[Node] = []
        while self.at("[") and self.at("]", 1):
            dims.append(self.take())
            dims.append(self.take())
        if dims:
            return _node("array_type", [base] + dims)
        return base

    def _class_type(self) -> Node:
        kids = [self.expect("identifier")]
        if self.at("<"):
            kids.append(self._type_arguments())
        while self.at(".") and self.at("identifier", 1):
            kids.append(self.take())
            kids.append(self.take())
            if self.at("<"):
                kids.append(self._type_arguments())
        if len(kids) == 1:
            return _node("type_identifier", kids)
        return _node("generic_type" if any(k.kind == "type_arguments" for k in kids)
                     else "scoped_type_identifier", kids)

    def _type_arguments(self) -> Node:
        kids = [self.expect("<")]
        if not self.at(">"):
            while True:
                if self.at("?"):
                    sub = [self.take()]
                    if self.at("extends") or self.at("super"):
                        sub.append(self.take())
                        sub.append(self._type())
                    kids.append(_node("wildcard", sub))
                else:
                    kids.append(self._type())
                if self.at(","):
                    kids.append(self.take())
                else:
                    break
        kids.append(self.expect(">"))
        return _node("type_arguments", kids)

    # --- statements ----------------------------------------------------

    def block(self) -> Node:
        kids = [self.expect("{")]
        while not self.at("}"):
            kids.append(self.statement())
        kids.append(self.expect("}"))
        return _node("block", kids)

    def statement(self) -> Node:
        t = self.peek()
        if t is None:
            raise ParseError("expected statement")
        k = t.kind
        if k == "{":
            return self.block()
        if k == ";":
            return _node("empty_statement", [self.take()])
        if k == "if":
            return self._if_statement()
        if k == "while":
            kids = [self.take(), self.expect("("), self.expression(),
                    self.expect(")"), self.statement()]
            return _node("while_statement", kids)
        if k == "do":
            kids = [self.take(), self.statement(), self.expect("while"),
                    self.expect("("), self.expression(), self.expect(")"),
                    self.expect(";")]
            return _node("do_statement", kids)
        if k == "for":
            return self._for_statement()
        if k == "return":
            kids = [self.take()]
            if not self.at(";"):
                kids.append(self.expression())
            kids.append(self.expect(";"))
            return _node("return_statement", kids)
        if k == "throw":
            return _node("throw_statement",
                         [self.take(), self.expression(), self.expect(";")])
        if k in ("break", "continue"):
            kids = [self.take()]
            if self.at("identifier"):
                kids.append(self.take())
            kids.append(self.expect(";"))
            return _node(f"{k}_statement", kids)
        if k == "try":
            return self._try_statement()
        if k == "switch":
            return self._switch_statement()
        if k == "synchronized":
            kids = [self.take(), self.expect("("), self.expression(),
                    self.expect(")"), self.block()]
            return _node("synchronized_statement", kids)
        if k == "assert":
            kids = [self.take(), self.expression()]
            if self.at(":"):
                kids.append(self.take())
                kids.append(self.expression())
            kids.append(self.expect(";"))
            return _node("assert_statement", kids)
        if k == "identifier" and self.at(":", 1):
            return _node("labeled_statement",
                         [self.take(), self.take(), self.statement()])
        decl = self._try_parse(self._local_variable_declaration)
        if decl is not None:
            return decl
        expr = self.expression()
        return _node("expression_statement", [expr, self.expect(";")])

    def _try_parse(self, fn):
        saved = self.pos
        try:
            return fn()
        except ParseError:
            self.pos = saved
            return None

    def _local_variable_declaration(self, consume_semi: bool = True) -> Node:
        kids: list[Node] = []
        while self.at("final") or self.at("@"):
            kids.append(self.take() if self.at("final") else self._annotation())
        kids.append(self._type())
        if not self.at("identifier"):
            raise ParseError("not a declaration")
        nxt = self.peek(1)
        if nxt is None or nxt.kind not in ("=", ",", ";", "[", ")"):
            raise ParseError("not a declaration")
        kids.append(self._variable_declarator())
        while self.at(","):
            kids.append(self.take())
            kids.append(self._variable_declarator())
        if consume_semi:
            kids.append(self.expect(";"))
        return _node("local_variable_declaration", kids)

    def _variable_declarator(self, first_name: Node | None = None) -> Node:
        kids = [first_name if first_name is not None else self.expect("identifier")]
        while self.at("[") and self.at("]", 1):
            kids.append(self.take())
            kids.append(self.take())
        if self.at("="):
            kids.append(self.take())
            kids.append(self._variable_initializer())
        return _node("variable_declarator", kids)

    def _variable_initializer(self) -> Node:
        if self.at("{"):
            return self._array_initializer()
        return self.expression()

    def _array_initializer(self) -> Node:
        kids = [self.expect("{")]
        while not self.at("}"):
            kids.append(self._variable_initializer())
            if self.at(","):
                kids.append(self.take())
            else:
                break
        kids.append(self.expect("}"))
        return _node("array_initializer", kids)

    def _if_statement(self) -> Node:
        kids = [self.expect("if"), self.expect("("), self.expression(),
                self.expect(")"), self.statement()]
        if self.at("else"):
            kids.append(self.take())
            kids.append(self.statement())
        return _node("if_statement", kids)

    def _for_statement(self) -> Node:
        kids = [self.expect("for"), self.expect("(")]
        enhanced = self._try_parse(self._enhanced_for_header)
        if enhanced is not None:
            kids.extend(enhanced)
            kids.append(self.expect(")"))
            kids.append(self.statement())
            return _node("enhanced_for_statement", kids)
        if self.at(";"):
            kids.append(self.take())
        else:
            decl = self._try_parse(self._local_variable_declaration)
            if decl is not None:
                kids.append(decl)  # declaration consumes the ';'
            else:
                kids.append(self.expression())
                while self.at(","):
                    kids.append(self.take())
                    kids.append(self.expression())
                kids.append(self.expect(";"))
        if not self.at(";"):
            kids.append(self.expression())
        kids.append(self.expect(";"))
        if not self.at(")"):
            kids.append(self.expression())
            while self.at(","):
                kids.append(self.take())
                kids.append(self.expression())
        kids.append(self.expect(")"))
        kids.append(self.statement())
        return _node("for_statement", kids)

    def _enhanced_for_header(self) -> list[Node]:
        sub: list[Node] = []
        while self.at("final") or self.at("@"):
            sub.append(self.take() if self.at("final") else self._annotation())
        sub.append(self._type())
        sub.append(self.expect("identifier"))
        sub.append(self.expect(":"))
        sub.append(self.expression())
        return sub

    def _try_statement(self) -> Node:
        kids = [self.expect("try")]
        if self.at("("):
            res = [self.take()]
            while not self.at(")"):
                sub: list[Node] = []
                while self.at("final") or self.at("@"):
                    sub.append(self.take() if self.at("final") else self._annotation())
                sub.append(self._type())
                sub.append(self.expect("identifier"))
                sub.append(self.expect("="))
                sub.append(self.expression())
                res.append(_node("resource", sub))
                if self.at(";"):
                    res.append(self.take())
            res.append(self.expect(")"))
            kids.append(_node("resource_specification", res))
        kids.append(self.block())
        while self.at("catch"):
            sub = [self.take(), self.expect("(")]
            ctypes = [self._type()]
            while self.at("|"):
                ctypes.append(self.take())
                ctypes.append(self._type())
            sub.append(_node("catch_type", ctypes))
            sub.append(self.expect("identifier"))
            sub.append(self.expect(")"))
            sub.append(self.block())
            kids.append(_node("catch_clause", sub))
        if self.at("finally"):
            kids.append(_node("finally_clause", [self.take(), self.block()]))
        return _node("try_statement", kids)

    def _switch_statement(self) -> Node:
        kids = [self.expect("switch"), self.expect("("), self.expression(),
                self.expect(")"), self.expect("{")]
        while not self.at("}"):
            if self.at("case"):
                sub = [self.take(), self.expression()]
                while self.at(","):
                    sub.append(self.take())
                    sub.append(self.expression())
                sub.append(self.expect(":"))
                kids.append(_node("switch_label", sub))
            elif self.at("default"):
                kids.append(_node("switch_label", [self.take(), self.expect(":")]))
            else:
                kids.append(self.statement())
        kids.append(self.expect("}"))
        return _node("switch_statement", kids)

    # --- expressions ---------------------------------------------------

    def expression(self) -> Node:
        return self._assignment()

    def _assignment(self) -> Node:
        lhs = self._ternary()
        t = self.peek()
        if t is None:
            return lhs
        if t.kind in _ASSIGN_OPS and lhs.kind in (
                "identifier", "field_access", "array_access"):
            op = self.take()
            rhs = self._assignment()
            return _node("assignment_expression", [lhs, op, rhs])
        # '>>=' / '>>>=' appear as adjacent '>' tokens followed by '>='
        if t.kind == ">" and lhs.kind in ("identifier", "field_access", "array_access"):
            if self._adjacent(0, 1) and self.at(">=", 1):
                ops = [self.take(), self.take()]
                return _node("assignment_expression", [lhs] + ops + [self._assignment()])
            if (self._adjacent(0, 1) and self.at(">", 1)
                    and self._adjacent(1, 2) and self.at(">=", 2)):
                ops = [self.take(), self.take(), self.take()]
                return _node("assignment_expression", [lhs] + ops + [self._assignment()])
        return lhs

    def _ternary(self) -> Node:
        cond = self._binary(0)
        if self.at("?"):
            q = self.take()
            then = self.expression()
            colon = self.expect(":")
            other = self._ternary()
            return _node("ternary_expression", [cond, q, then, colon, other])
        return cond

    def _binary(self, level: int) -> Node:
        if level >= len(_BINARY_LEVELS):
            return self._unary()
        ops = _BINARY_LEVELS[level]
        left = self._binary(level + 1)
        while True:
            t = self.peek()
            if t is None:
                return left
            if level == _SHIFT_LEVEL and t.kind == ">" and self.at(">", 1) and self._adjacent(0, 1):
                # '>>' or '>>>'; reject '>>=' (handled by assignment)
                third = self.at(">", 2) and self._adjacent(1, 2)
                if third and self.at("=", 3) and self._adjacent(2, 3):
                    return left
                if not third and self.at("=", 2) and self._adjacent(1, 2):
                    return left
                op_leaves = [self.take(), self.take()]
                if third:
                    op_leaves.append(self.take())
                right = self._binary(level + 1)
                left = _node("binary_expression", [left] + op_leaves + [right])
                continue
            if t.kind == "instanceof" and "instanceof" in ops:
                left = _node("instanceof_expression", [left, self.take(), self._type()])
                continue
            if t.kind in ops and t.kind != "instanceof":
                if (t.kind == ">" and self._adjacent(0, 1)
                        and (self.at(">", 1) or self.at(">=", 1))):
                    return left  # shift or '>>='/'>>>=', not a comparison
                op = self.take()
                right = self._binary(level + 1)
                left = _node("binary_expression", [left, op, right])
                continue
            return left

    def _unary(self) -> Node:
        t = self.peek()
        if t is None:
            raise ParseError("expected expression")
        if t.kind in ("+", "-", "!", "~"):
            return _node("unary_expression", [self.take(), self._unary()])
        if t.kind in ("++", "--"):
            return _node("update_expression", [self.take(), self._unary()])
        if t.kind == "(":
            cast = self._try_parse(self._cast_expression)
            if cast is not None:
                return cast
        return self._postfix()

    def _cast_expression(self) -> Node:
        lp = self.expect("(")
        ty = self._type()
        rp = self.expect(")")
        nxt = self.peek()
        if nxt is None:
            raise ParseError("not a cast")
        ambiguous = ty.kind in ("type_identifier", "scoped_type_identifier")
        if ambiguous:
            # '(name) x' is a cast only when followed by something that can
            # only start an operand, not a binary operator continuation
            if nxt.kind not in ("identifier", "(", "!", "~", "new", "this",
                               "string_literal", "character_literal",
                               "decimal_integer_literal", "hex_integer_literal",
                               "binary_integer_literal",
                               "decimal_floating_point_literal",
                               "boolean_literal", "null_literal"):
                raise ParseError("not a cast")
        else:
            if nxt.kind in (")", ";", ",", "]", "?", ":", "*", "/", "%",
                            "==", "!=", "<=", ">=", "&&", "||", "<", ">"):
                raise ParseError("not a cast")
        operand = self._unary()
        return _node("cast_expression", [lp, ty, rp, operand])

    def _postfix(self) -> Node:
        expr = self._primary()
        while True:
            t = self.peek()
            if t is None:
                return expr
            if t.kind == "." and self.at("identifier", 1):
                dot = self.take()
                name = self.take()
                if self.at("("):
                    expr = _node("method_invocation",
                                 [expr, dot, name, self._argument_list()])
                else:
                    expr = _node("field_access", [expr, dot, name])
                continue
            if t.kind == "." and (self.at("this", 1) or self.at("class", 1)):
                expr = _node("field_access", [expr, self.take(), self.take()])
                continue
            if t.kind == "(" and expr.kind == "identifier":
                expr = _node("method_invocation", [expr, self._argument_list()])
                continue
            if t.kind == "[" and not self.at("]", 1):
                lb = self.take()
                idx = self.expression()
                rb = self.expect("]")
                expr = _node("array_access", [expr, lb, idx, rb])
                continue
            if t.kind in ("++", "--"):
                expr = _node("update_expression", [expr, self.take()])
                continue
            return expr

    def _argument_list(self) -> Node:
        kids = [self.expect("(")]
        if not self.at(")"):
            while True:
                kids.append(self.expression())
                if self.at(","):
                    kids.append(self.take())
                else:
                    break
        kids.append(self.expect(")"))
        return _node("argument_list", kids)

    def _primary(self) -> Node:
        t = self.peek()
        if t is None:
            raise ParseError("expected expression")
        k = t.kind
        if k in ("decimal_integer_literal", "hex_integer_literal",
                 "binary_integer_literal", "decimal_floating_point_literal",
                 "string_literal", "character_literal", "boolean_literal",
                 "null_literal", "identifier", "this"):
            return self.take()
        if k == "super":
            return self.take()
        if k == "(":
            lp = self.take()
            inner = self.expression()
            rp = self.expect(")")
            return _node("parenthesized_expression", [lp, inner, rp])
        if k == "new":
            return self._creation()
        if k in PRIMITIVE_TYPES or k == "void":
            # e.g. 'int.class' / 'void.class'
            base = self.take()
            return base
        raise ParseError(f"unexpected token {k!r} in expression", t.start)

    def _creation(self) -> Node:
        kids = [self.expect("new")]
        if self.peek() and self.peek().kind in PRIMITIVE_TYPES:
            ty: Node = _node("primitive_type", [self.take()])
        else:
            ty = self._class_type()
        if self.at("("):
            kids.append(ty)
            kids.append(self._argument_list())
            if self.at("{"):
                kids.append(self._class_body())
            return _node("object_creation_expression", kids)
        if self.at("["):
            kids.append(ty)
            while self.at("["):
                kids.append(self.take())
                if not self.at("]"):
                    kids.append(self.expression())
                kids.append(self.expect("]"))
            if self.at("{"):
                kids.append(self._array_initializer())
            return _node("array_creation_expression", kids)
        raise ParseError("expected '(' or '[' after new-type")


def parse_tokens(tokens: list[Token]) -> Node:
    """Parse a full compilation unit from a token list."""
    p = Parser(tokens)
    root = p.compilation_unit()
    if p.pos != p.n:
        t = p.peek()
        raise ParseError(f"trailing input {t.kind!r}", t.start)
    return root


def parse_bytes(data: bytes) -> Node:
    try:
        return parse_tokens(tokenize(data))
    except LexError as e:
        raise ParseError(str(e), e.offset) from e
