"""Generators for the eight probing datasets.

Each generator produces :class:`ProbingExample` records whose target
spans are byte ranges into a variant text ("orig" for untransformed
snippets).  All randomness is derived from per-snippet seeds, so output
is a pure function of (corpus, global_seed).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from . import syntax
from .corpus import Corpus, Snippet, snippet_seed
from .semantics import build_scope_tree, extract_dfg, sample_negative_pairs

PER_SUBTOKEN = "per_subtoken"
PAIR_CONCAT = "pair_concat"
OCCURRENCE_MEAN = "occurrence_mean"
SNIPPET_MEAN = "snippet_mean"

TOKEN_PATH_LENGTH = "token_path_length"
TOKEN_PATH_TYPE = "token_path_type"
AST_DEPTH = "ast_depth"
BRACKET_MISUSED = "bracket_misused"
TOKEN_IS_IDENTIFIER = "token_is_identifier"
DFG_EDGE = "dfg_edge"
IS_VARIABLE_DECLARED = "is_variable_declared"
VARIABLE_NAME = "variable_name"

ALL_TASKS = [
    TOKEN_PATH_LENGTH, TOKEN_PATH_TYPE, AST_DEPTH, BRACKET_MISUSED,
    TOKEN_IS_IDENTIFIER, DFG_EDGE, IS_VARIABLE_DECLARED, VARIABLE_NAME,
]

TASK_FEATURE_MODE = {
    TOKEN_PATH_LENGTH: PER_SUBTOKEN,
    TOKEN_PATH_TYPE: PER_SUBTOKEN,
    AST_DEPTH: SNIPPET_MEAN,
    BRACKET_MISUSED: PER_SUBTOKEN,
    TOKEN_IS_IDENTIFIER: PER_SUBTOKEN,
    DFG_EDGE: PAIR_CONCAT,
    IS_VARIABLE_DECLARED: PER_SUBTOKEN,
    VARIABLE_NAME: OCCURRENCE_MEAN,
}

REGRESSION_TASKS = frozenset([TOKEN_PATH_LENGTH, AST_DEPTH])

VOCAB_SIZE = 15
BRACKETS = "(){}[]"
_PRINT_PREFIX = "System.out.println("


class TaskGenError(Exception):
    pass


@dataclass(frozen=True)
class ProbingExample:
    task: str
    snippet_id: str
    variant_id: str
    target_spans: tuple[tuple[int, int], ...]
    feature_mode: str
    label: int | str


@dataclass(frozen=True)
class Variant:
    snippet_id: str
    variant_id: str
    text: str


@dataclass(frozen=True)
class ClassVocabulary:
    task: str
    classes: tuple[str, ...]
    counts: dict[str, int]


Item = tuple[Snippet, syntax.SyntaxTree]


def parse_corpus(corpus: Corpus) -> list[Item]:
    """Parse every snippet; load_corpus guarantees parseability."""
    return [(s, syntax.parse(s.text)) for s in corpus]


def _path_label(path: tuple[int, ...]) -> str:
    return ".".join(str(i) for i in path)


def build_class_vocab(items: list[Item], task: str, k: int = VOCAB_SIZE) -> ClassVocabulary:
    """Top-k classes by corpus frequency, lexicographic tie-break."""
    counts: dict[str, int] = {}
    if task == TOKEN_PATH_TYPE:
        for _, tree in items:
            for info in syntax.token_info(tree):
                lab = _path_label(info.path)
                counts[lab] = counts.get(lab, 0) + 1
    elif task == VARIABLE_NAME:
        for _, tree in items:
            for d in build_scope_tree(tree).local_declarations():
                counts[d.name] = counts.get(d.name, 0) + 1
    else:
        raise TaskGenError(f"no class vocabulary for task {task!r}")
    if len(counts) < 2:
        raise TaskGenError(f"task {task!r} is degenerate: "
                           f"{len(counts)} distinct classes in corpus")
    ranked = sorted(counts, key=lambda c: (-counts[c], c))[:k]
    return ClassVocabulary(task=task, classes=tuple(ranked),
                           counts={c: counts[c] for c in ranked})


def gen_token_path_length(items: list[Item]) -> list[ProbingExample]:
    out = []
    for snip, tree in items:
        for info in syntax.token_info(tree):
            out.append(ProbingExample(
                TOKEN_PATH_LENGTH, snip.id, "orig", (info.span,),
                PER_SUBTOKEN, len(info.path)))
    return out


def gen_token_path_type(items: list[Item],
                        vocab: ClassVocabulary) -> list[ProbingExample]:
    keep = set(vocab.classes)
    out = []
    for snip, tree in items:
        for info in syntax.token_info(tree):
            lab = _path_label(info.path)
            if lab in keep:
                out.append(ProbingExample(
                    TOKEN_PATH_TYPE, snip.id, "orig", (info.span,),
                    PER_SUBTOKEN, lab))
    return out


def gen_ast_depth(items: list[Item]) -> list[ProbingExample]:
    return [
        ProbingExample(AST_DEPTH, snip.id, "orig", (), SNIPPET_MEAN,
                       syntax.tree_depth(tree))
        for snip, tree in items
    ]


def _corrupt_count(n_brackets: int, rate: float) -> int:
    # round-half-up, at least one when any bracket exists
    return min(n_brackets, max(1, int(n_brackets * rate + 0.5)))


def gen_bracket_misused(items: list[Item], global_seed: int,
                        rate: float = 0.30
                        ) -> tuple[list[Variant], list[ProbingExample]]:
    variants, examples = [], []
    for snip, tree in items:
        brackets = syntax.bracket_leaves(tree)
        if not brackets:
            continue
        rng = random.Random(snippet_seed(global_seed, snip.id, "bracket"))
        k = _corrupt_count(len(brackets), rate)
        chosen = sorted(rng.sample(range(len(brackets)), k))
        data = bytearray(tree.data)
        corrupted = set()
        for idx in chosen:
            lid = brackets[idx]
            start, _ = tree.span(lid)
            orig = tree.leaf_text(lid)
            repl = rng.choice([b for b in BRACKETS if b != orig])
            data[start] = ord(repl)
            corrupted.add(lid)
        variant_text = data.decode("utf-8")
        variants.append(Variant(snip.id, "bracket", variant_text))
        for lid in brackets:
            examples.append(ProbingExample(
                BRACKET_MISUSED, snip.id, "bracket", (tree.span(lid),),
                PER_SUBTOKEN, int(lid in corrupted)))
    return variants, examples


def gen_token_is_identifier(items: list[Item]) -> list[ProbingExample]:
    out = []
    for snip, tree in items:
        for info in syntax.token_info(tree):
            out.append(ProbingExample(
                TOKEN_IS_IDENTIFIER, snip.id, "orig", (info.span,),
                PER_SUBTOKEN, int(info.is_identifier)))
    return out


def gen_dfg_edges(items: list[Item], global_seed: int) -> list[ProbingExample]:
    out = []
    for snip, tree in items:
        edges = extract_dfg(tree)
        for e in edges:
            out.append(ProbingExample(
                DFG_EDGE, snip.id, "orig",
                (tree.span(e.src), tree.span(e.dst)), PAIR_CONCAT, e.kind))
        negs = sample_negative_pairs(
            tree, edges, len(edges),
            snippet_seed(global_seed, snip.id, "dfg_neg"))
        for p in negs:
            out.append(ProbingExample(
                DFG_EDGE, snip.id, "orig",
                (tree.span(p.a), tree.span(p.b)), PAIR_CONCAT, "none"))
    return out


def _statement_boundaries(tree: syntax.SyntaxTree) -> list[int]:
    """End offsets of statements that are direct children of blocks inside
    method/constructor bodies; these are safe insertion points."""
    bodies = []
    for nid in tree.subtree(tree.root):
        if tree.kind(nid) in ("method_declaration", "constructor_declaration"):
            body = next((c for c in tree.children(nid)
                         if tree.kind(c) == "block"), None)
            if body is not None:
                bodies.append(body)
    points = set()
    for body in bodies:
        for nid in tree.subtree(body):
            if tree.kind(nid) != "block":
                continue
            for c in tree.children(nid):
                if tree.kind(c) in syntax.STATEMENT_KINDS:
                    points.add(tree.span(c)[1])
    return sorted(points)


def gen_is_variable_declared(items: list[Item], global_seed: int,
                             max_tries: int = 8
                             ) -> tuple[list[Variant], list[ProbingExample]]:
    variants, examples = [], []
    want = 1  # alternate positive/negative across the corpus where possible
    for snip, tree in items:
        scopes = build_scope_tree(tree)
        decls = scopes.local_declarations()
        points = _statement_boundaries(tree)
        pool = [(d, p) for d in decls for p in points if p > d.end]
        if not pool:
            continue
        rng = random.Random(snippet_seed(global_seed, snip.id, "insertion"))
        decl, point = pool[0]
        label = 0
        for _ in range(max_tries):
            decl, point = rng.choice(pool)
            label = int(scopes.visible_at(decl.name, point))
            if label == want:
                break
        text = snip.text
        inserted = " " + _PRINT_PREFIX + decl.name + ");"
        variant_text = text[:point] + inserted + text[point:]
        try:
            syntax.parse(variant_text)
        except syntax.ParseError:
            continue
        name_start = point + 1 + len(_PRINT_PREFIX)
        span = (name_start, name_start + len(decl.name.encode("utf-8")))
        variants.append(Variant(snip.id, "decl", variant_text))
        examples.append(ProbingExample(
            IS_VARIABLE_DECLARED, snip.id, "decl", (span,),
            PER_SUBTOKEN, label))
        want = 1 - label
    return variants, examples


def gen_variable_name(items: list[Item], vocab: ClassVocabulary,
                      placeholder: str = "var"
                      ) -> tuple[list[Variant], list[ProbingExample]]:
    variants, examples = [], []
    keep = set(vocab.classes)
    for snip, tree in items:
        local_names = sorted({d.name for d in
                              build_scope_tree(tree).local_declarations()
                              if d.name in keep})
        for name in local_names:
            occs = [tree.span(lid) for lid in tree.leaves()
                    if tree.kind(lid) == "identifier"
                    and tree.leaf_text(lid) == name]
            if not occs:
                continue
            data = tree.data
            pieces, new_spans = [], []
            pos = 0
            pb = placeholder.encode("utf-8")
            for a, b in occs:
                pieces.append(data[pos:a])
                start = sum(len(p) for p in pieces)
                pieces.append(pb)
                new_spans.append((start, start + len(pb)))
                pos = b
            pieces.append(data[pos:])
            variant_id = f"name_{name}"
            variants.append(Variant(
                snip.id, variant_id, b"".join(pieces).decode("utf-8")))
            examples.append(ProbingExample(
                VARIABLE_NAME, snip.id, variant_id, tuple(new_spans),
                OCCURRENCE_MEAN, name))
    return variants, examples


def generate_all(corpus: Corpus
                 ) -> tuple[dict[str, list[ProbingExample]], list[Variant]]:
    """Run all eight generators; returns per-task examples and the full
    variants list (including "orig" for every snippet)."""
    items = parse_corpus(corpus)
    seed = corpus.global_seed
    datasets: dict[str, list[ProbingExample]] = {}
    variants: list[Variant] = [
        Variant(s.id, "orig", s.text) for s, _ in items]

    datasets[TOKEN_PATH_LENGTH] = gen_token_path_length(items)
    path_vocab = build_class_vocab(items, TOKEN_PATH_TYPE)
    datasets[TOKEN_PATH_TYPE] = gen_token_path_type(items, path_vocab)
    datasets[AST_DEPTH] = gen_ast_depth(items)
    bvars, datasets[BRACKET_MISUSED] = gen_bracket_misused(items, seed)
    variants.extend(bvars)
    datasets[TOKEN_IS_IDENTIFIER] = gen_token_is_identifier(items)
    datasets[DFG_EDGE] = gen_dfg_edges(items, seed)
    dvars, datasets[IS_VARIABLE_DECLARED] = gen_is_variable_declared(items, seed)
    variants.extend(dvars)
    name_vocab = build_class_vocab(items, VARIABLE_NAME)
    nvars, datasets[VARIABLE_NAME] = gen_variable_name(items, name_vocab)
    variants.extend(nvars)
    return datasets, variants


# --- serialization ------------------------------------------------------

def write_examples(examples: list[ProbingExample], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for e in examples:
            fh.write(json.dumps({
                "task": e.task,
                "snippet_id": e.snippet_id,
                "variant_id": e.variant_id,
                "target_spans": [list(s) for s in e.target_spans],
                "feature_mode": e.feature_mode,
                "label": e.label,
            }, ensure_ascii=False) + "\n")


def read_examples(path: str | Path) -> list[ProbingExample]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            r = json.loads(line)
            out.append(ProbingExample(
                r["task"], r["snippet_id"], r["variant_id"],
                tuple((int(a), int(b)) for a, b in r["target_spans"]),
                r["feature_mode"], r["label"]))
    return out


def write_variants(variants: list[Variant], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for v in variants:
            fh.write(json.dumps({
                "snippet_id": v.snippet_id,
                "variant_id": v.variant_id,
                "text": v.text,
            }, ensure_ascii=False) + "\n")


def read_variants(path: str | Path) -> list[Variant]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append(Variant(r["snippet_id"], r["variant_id"], r["text"]))
    return out
