"""Java concrete syntax trees with byte-span leaves.

``parse`` accepts either a full compilation unit or a bare method/member
snippet (which is wrapped in a synthetic ``class __W { ... }`` whose
contribution is stripped from spans, paths and depth).
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexer import tokenize, Token, LexError, BRACKET_CHARS, KEYWORDS
from .parser import Node, ParseError, parse_bytes, STATEMENT_KINDS

__all__ = [
    "SyntaxTree", "TokenInfo", "ParseError", "parse", "token_info",
    "tree_depth", "bracket_leaves", "tokenize", "Token", "STATEMENT_KINDS",
]

_WRAP_PREFIX = "class __W { "
_WRAP_SUFFIX = " }"


class SyntaxTree:
    """Arena view over a parsed snippet.

    Node ids are preorder indices.  ``root`` is the content root: for
    wrapped snippets, the member node corresponding to the snippet itself.
    All spans are byte offsets into the original (unwrapped) text.
    """

    def __init__(self, text: str, parse_root: Node, shift: int):
        self.text = text
        self.data = text.encode("utf-8")
        self._kinds: list[str] = []
        self._spans: list[tuple[int, int]] = []
        self._texts: list[str | None] = []
        self._children: list[list[int]] = []
        self._parent: list[int] = []
        self._child_index: list[int] = []  # 1-based position among siblings

        def visit(node: Node, parent: int, child_idx: int) -> int:
            nid = len(self._kinds)
            self._kinds.append(node.kind)
            self._spans.append((node.start - shift, node.end - shift))
            self._texts.append(node.text)
            self._children.append([])
            self._parent.append(parent)
            self._child_index.append(child_idx)
            for i, ch in enumerate(node.children):
                cid = visit(ch, nid, i + 1)
                self._children[nid].append(cid)
            return nid

        visit(parse_root, -1, 0)
        self.root = self._locate_content_root(shift)

    def _locate_content_root(self, shift: int) -> int:
        if shift == 0:
            return 0
        # program -> class_declaration(__W) -> class_body -> single member
        body = next(
            (i for i in range(len(self._kinds)) if self._kinds[i] == "class_body"),
            0,
        )
        members = [c for c in self._children[body]
                   if self._texts[c] is None or self._texts[c] not in ("{", "}")]
        if len(members) == 1:
            return members[0]
        return body

    # --- arena accessors ------------------------------------------------

    def __len__(self) -> int:
        return len(self._kinds)

    def kind(self, nid: int) -> str:
        return self._kinds[nid]

    def span(self, nid: int) -> tuple[int, int]:
        return self._spans[nid]

    def children(self, nid: int) -> list[int]:
        return self._children[nid]

    def parent(self, nid: int) -> int:
        return self._parent[nid]

    def is_leaf(self, nid: int) -> bool:
        return self._texts[nid] is not None

    def leaf_text(self, nid: int) -> str:
        t = self._texts[nid]
        assert t is not None, "not a leaf"
        return t

    def subtree(self, nid: int):
        """Yield node ids of the subtree rooted at nid, preorder."""
        stack = [nid]
        while stack:
            cur = stack.pop()
            yield cur
            stack.extend(reversed(self._children[cur]))

    def find(self, *kinds: str, root: int | None = None):
        """Yield ids of nodes with any of the given kinds under root."""
        wanted = set(kinds)
        for nid in self.subtree(self.root if root is None else root):
            if self._kinds[nid] in wanted:
                yield nid

    def leaves(self) -> list[int]:
        """Leaf ids of the snippet content, in source order."""
        n = len(self.data)
        out = [nid for nid in self.subtree(self.root)
               if self._texts[nid] is not None
               and self._spans[nid][0] >= 0 and self._spans[nid][1] <= n]
        out.sort(key=lambda i: self._spans[i][0])
        return out

    def path_to(self, leaf_id: int) -> tuple[int, ...]:
        """1-based child-index path from the content root to a leaf."""
        path = []
        cur = leaf_id
        while cur != self.root:
            path.append(self._child_index[cur])
            cur = self._parent[cur]
            if cur < 0:
                raise ValueError("leaf is not under the content root")
        return tuple(reversed(path))

    def node_at_path(self, path: tuple[int, ...]) -> int:
        cur = self.root
        for idx in path:
            cur = self._children[cur][idx - 1]
        return cur

    def to_json(self, nid: int | None = None) -> dict:
        """Serialize a subtree as ``{"kind","span","children":[...]}``."""
        nid = self.root if nid is None else nid
        return {
            "kind": self._kinds[nid],
            "span": list(self._spans[nid]),
            "children": [self.to_json(c) for c in self._children[nid]],
        }


@dataclass(frozen=True)
class TokenInfo:
    leaf_id: int
    span: tuple[int, int]
    kind: str
    path: tuple[int, ...]
    is_identifier: bool


def parse(text: str) -> SyntaxTree:
    """Parse a Java snippet (compilation unit or bare member) into a tree.

    Raises :class:`ParseError` when the snippet is not valid under the
    supported grammar subset; callers are expected to exclude such
    snippets.
    """
    data = text.encode("utf-8")
    try:
        return SyntaxTree(text, parse_bytes(data), 0)
    except ParseError:
        pass
    wrapped = (_WRAP_PREFIX + text + _WRAP_SUFFIX).encode("utf-8")
    root = parse_bytes(wrapped)
    return SyntaxTree(text, root, len(_WRAP_PREFIX))


def token_info(tree: SyntaxTree) -> list[TokenInfo]:
    """Per-leaf info in source order: span, kind, root path, identifier flag."""
    out = []
    for lid in tree.leaves():
        out.append(TokenInfo(
            leaf_id=lid,
            span=tree.span(lid),
            kind=tree.kind(lid),
            path=tree.path_to(lid),
            is_identifier=tree.kind(lid) == "identifier",
        ))
    return out


def tree_depth(tree: SyntaxTree) -> int:
    """Depth of the tree: max leaf path length, root counting as 0."""
    return max((len(tree.path_to(lid)) for lid in tree.leaves()), default=0)


def bracket_leaves(tree: SyntaxTree) -> list[int]:
    """Ids of leaves whose text is one of ``(){}[]``, in source order."""
    return [lid for lid in tree.leaves() if tree.leaf_text(lid) in BRACKET_CHARS]
