"""Lexer and parser tests: token golden cases, structural invariants."""

import random

import pytest

from probeforge import syntax
from probeforge.syntax.lexer import tokenize, LexError

from conftest import make_snippet


class TestLexer:
    def test_token_kinds(self):
        toks = tokenize(b'int x = foo(1, 0x1F, "hi", \'c\', 2.5, true);')
        kinds = [t.kind for t in toks]
        assert kinds == [
            "int", "identifier", "=", "identifier", "(",
            "decimal_integer_literal", ",", "hex_integer_literal", ",",
            "string_literal", ",", "character_literal", ",",
            "decimal_floating_point_literal", ",", "boolean_literal",
            ")", ";",
        ]

    def test_offsets_are_byte_spans(self):
        data = b"x = y + 12;"
        for tok in tokenize(data):
            assert data[tok.start:tok.end].decode() == tok.text

    def test_comments_skipped(self):
        toks = tokenize(b"a /* mid */ b // end\nc")
        assert [t.text for t in toks] == ["a", "b", "c"]

    def test_string_escapes(self):
        (tok,) = tokenize(rb'"a \" b"')
        assert tok.kind == "string_literal"

    def test_greater_than_is_never_fused(self):
        # generics need single '>' tokens; shifts are re-fused by the parser
        toks = tokenize(b"a >> b")
        assert [t.text for t in toks] == ["a", ">", ">", "b"]
        (ge,) = [t for t in tokenize(b"a >= b") if t.text == ">="]
        assert ge.kind == ">="

    def test_unterminated_string_raises(self):
        with pytest.raises(LexError):
            tokenize(b'"oops')

    def test_unterminated_comment_raises(self):
        with pytest.raises(LexError):
            tokenize(b"a /* oops")


SAMPLES = [
    "class A { int f(int x) { return x + 1; } }",
    "int f(int x) { return x * 2; }",  # bare member, wrapped internally
    "void g() { for (int i = 0; i < 10; i++) { h(i); } }",
    "void g() { for (String s : items) { use(s); } }",
    "int h(int a, int b) { if (a > b) { return a; } else { return b; } }",
    "void k() { while (true) { break; } do { x++; } while (x < 3); }",
    "void m() { try (Reader r = open()) { r.read(); } catch (Exception e) "
    "{ log(e); } finally { done(); } }",
    "void n() { switch (x) { case 1: a(); break; default: b(); } }",
    "List<Map<String, Integer>> f() { return new ArrayList<>(); }",
    "void p() { int[] a = new int[3]; a[0] = (int) 2L; x = a.length; }",
    "void q() { long v = x >> 2; v = x >>> 1; v >>= 1; }",
    "void r() { Object o = flag ? \"yes\" : null; assert o != null; }",
    "static synchronized void s() { synchronized (lock) { count += 1; } }",
    "interface I { int f(); }",
    "enum E { A, B, C }",
]


class TestParser:
    @pytest.mark.parametrize("src", SAMPLES)
    def test_samples_parse(self, src):
        tree = syntax.parse(src)
        assert tree.kind(tree.root)

    @pytest.mark.parametrize("src", SAMPLES)
    def test_leaves_tile_source(self, src):
        """Leaves are disjoint, ordered, and gaps hold only whitespace."""
        tree = syntax.parse(src)
        data = tree.data
        pos = None
        for lid in tree.leaves():
            s, e = tree.span(lid)
            assert s < e
            if pos is not None:
                assert s >= pos
                assert data[pos:s].strip() == b""
            assert data[s:e].decode() == tree.leaf_text(lid)
            pos = e

    @pytest.mark.parametrize("src", SAMPLES)
    def test_paths_roundtrip(self, src):
        tree = syntax.parse(src)
        for info in syntax.token_info(tree):
            assert tree.node_at_path(info.path) == info.leaf_id
            assert all(i >= 1 for i in info.path)  # child indices are 1-based

    def test_wrapped_member_spans_are_snippet_relative(self):
        src = "int f(int x) { return x; }"
        tree = syntax.parse(src)
        infos = syntax.token_info(tree)
        assert src[infos[0].span[0]:infos[0].span[1]] == "int"
        texts = [src[a:b] for t in infos for a, b in [t.span]]
        assert texts[-1] == "}"
        assert min(p for t in infos for p in [len(t.path)]) >= 1

    def test_wrapping_does_not_inflate_depth(self):
        # the synthetic wrapper class contributes nothing to paths/depth:
        # the bare method's tokens sit directly under the content root
        bare = syntax.parse("int f() { return 1; }")
        infos = syntax.token_info(bare)
        assert min(len(i.path) for i in infos) == 1
        assert syntax.tree_depth(bare) == max(len(i.path) for i in infos)

    def test_identifier_flags(self):
        tree = syntax.parse("int f(int count) { return count; }")
        flags = {}
        for info in syntax.token_info(tree):
            text = tree.data[info.span[0]:info.span[1]].decode()
            flags.setdefault(text, info.is_identifier)
        assert flags["count"] is True
        assert flags["f"] is True
        assert flags["int"] is False
        assert flags["return"] is False

    def test_bracket_leaves(self):
        tree = syntax.parse("void f() { a[0] = g(1); }")
        brackets = [tree.leaf_text(lid) for lid in syntax.bracket_leaves(tree)]
        assert sorted(brackets) == sorted(
            ["(", ")", "{", "}", "[", "]", "(", ")"])

    def test_invalid_raises(self):
        with pytest.raises(syntax.ParseError):
            syntax.parse("int f( { return; }")
        with pytest.raises(syntax.ParseError):
            syntax.parse("not java at all $$$")

    def test_generated_corpus_parses(self):
        rng = random.Random(5)
        for i in range(100):
            tree = syntax.parse(make_snippet(rng, i))
            assert len(syntax.token_info(tree)) > 5

    def test_depth_equals_longest_path(self):
        tree = syntax.parse("int f(int x) { if (x > 0) { x = x + 1; } return x; }")
        assert syntax.tree_depth(tree) == max(
            len(i.path) for i in syntax.token_info(tree))
