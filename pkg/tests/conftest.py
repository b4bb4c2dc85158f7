"""Shared fixtures: a deterministic synthetic Java snippet corpus.

The generator produces small, parseable methods with reused variable
names, nested blocks (so scope insertion points with both labels exist),
branches and loops, and varied nesting depth.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from probeforge.corpus import load_corpus

POPULAR_NAMES = [
    "i", "j", "count", "total", "sum", "value", "result", "n", "k",
    "temp", "index", "size", "data", "item", "flag", "limit",
]


def _statements(rng: random.Random, visible: list[str],
                declared_here: set[str], depth: int) -> list[str]:
    out = []
    for _ in range(rng.randint(2, 4)):
        roll = rng.random()
        fresh = [n for n in POPULAR_NAMES if n not in declared_here]
        if (roll < 0.35 or not visible) and fresh:
            name = rng.choice(fresh[:6])
            out.append(f"int {name} = {rng.randint(0, 9)};")
            declared_here.add(name)
            visible.append(name)
        elif roll < 0.55:
            a, b = rng.choice(visible), rng.choice(visible)
            op = rng.choice(["+", "-", "*"])
            out.append(f"{a} = {a} {op} {b};")
        elif roll < 0.70 and depth > 0:
            inner = _statements(rng, list(visible), set(), depth - 1)
            out.append("{ " + " ".join(inner) + " }")
        elif roll < 0.85 and depth > 0:
            c = rng.choice(visible)
            inner = _statements(rng, list(visible), set(), depth - 1)
            out.append(f"if ({c} > {rng.randint(0, 5)}) {{ "
                       + " ".join(inner) + " }")
        elif depth > 0:
            c = rng.choice(visible)
            inner = _statements(rng, list(visible), set(), depth - 1)
            out.append(f"while ({c} > 0) {{ " + " ".join(inner)
                       + f" {c} = {c} - 1; }}")
        else:
            out.append(f"{rng.choice(visible)} = {rng.randint(0, 9)};")
    return out


def make_snippet(rng: random.Random, idx: int) -> str:
    param = rng.choice(POPULAR_NAMES)
    depth = rng.randint(1, 3)
    body = _statements(rng, [param], {param}, depth)
    ret = rng.choice([param] + [s.split()[1] for s in body
                                if s.startswith("int ")])
    return (f"int f{idx}(int {param}) {{ " + " ".join(body)
            + f" return {ret}; }}")


def write_corpus_jsonl(path: Path, n: int, seed: int) -> Path:
    rng = random.Random(seed)
    with path.open("w", encoding="utf-8") as fh:
        for idx in range(n):
            fh.write(json.dumps({"id": f"s{idx:04d}",
                                 "code": make_snippet(rng, idx)}) + "\n")
    return path


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory) -> Path:
    return write_corpus_jsonl(
        tmp_path_factory.mktemp("corpus") / "corpus.jsonl", 60, seed=11)


@pytest.fixture(scope="session")
def corpus(corpus_file):
    return load_corpus(corpus_file, global_seed=7)
