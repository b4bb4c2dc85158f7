"""Corpus loading, preprocessing and deterministic seeding.

A corpus is an id-sorted list of preprocessed Java snippets.  Snippet ids
are content hashes of the preprocessed text, so re-loading equivalent
inputs always produces a byte-identical corpus and snippets that differ
only in comments or whitespace collapse to one entry.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

MAX_SNIPPET_BYTES = 100_000


class CorpusError(Exception):
    pass


class PreprocessError(Exception):
    pass


@dataclass(frozen=True)
class Snippet:
    id: str
    text: str  # preprocessed source, no comments, no newlines
    origin: str


@dataclass
class Corpus:
    snippets: list[Snippet]
    global_seed: int = 0
    skipped: int = 0

    def __iter__(self):
        return iter(self.snippets)

    def __len__(self):
        return len(self.snippets)


def snippet_id(text: str) -> str:
    """Stable 128-bit content hash of the snippet text, hex encoded."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


def snippet_seed(global_seed: int, snippet_id: str, purpose: str) -> int:
    """Derive an independent 64-bit seed for one (snippet, purpose) stream."""
    key = global_seed.to_bytes(8, "little", signed=False)
    h = hashlib.blake2b(f"{snippet_id}\x00{purpose}".encode(), digest_size=8, key=key)
    return int.from_bytes(h.digest(), "little")


def preprocess(raw: str) -> str:
    """Strip comments, collapse whitespace runs to single spaces, trim.

    String and character literals are left untouched (``//`` inside a
    string is content, not a comment).  Raises :class:`PreprocessError`
    on an unterminated block comment or string.
    """
    out: list[str] = []
    i, n = 0, len(raw)

    def space():
        if out and out[-1] != " ":
            out.append(" ")

    while i < n:
        c = raw[i]
        if c == "/" and i + 1 < n and raw[i + 1] == "/":
            j = raw.find("\n", i)
            if j < 0:
                break
            space()
            i = j + 1
        elif c == "/" and i + 1 < n and raw[i + 1] == "*":
            j = raw.find("*/", i + 2)
            if j < 0:
                raise PreprocessError("unterminated block comment")
            space()
            i = j + 2
        elif c in ('"', "'"):
            j = i + 1
            while j < n:
                if raw[j] == "\\":
                    j += 2
                    continue
                if raw[j] == c or raw[j] == "\n":
                    break
                j += 1
            if j >= n or raw[j] == "\n":
                raise PreprocessError("unterminated string literal")
            out.append(raw[i:j + 1])
            i = j + 1
        elif c.isspace():
            space()
            while i < n and raw[i].isspace():
                i += 1
        else:
            out.append(c)
            i += 1
    return "".join(out).strip()


def _iter_raw(path: Path):
    """Yield (origin, raw_text) pairs from a .java directory or a JSONL file."""
    if path.is_dir():
        files = sorted(path.rglob("*.java"))
        if not files:
            raise CorpusError(f"no .java files under {path}")
        for f in files:
            yield str(f.relative_to(path)), f.read_text(encoding="utf-8")
    elif path.is_file():
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    raw = rec["code"]
                    rid = str(rec.get("id", lineno))
                except (json.JSONDecodeError, KeyError, TypeError) as e:
                    raise CorpusError(f"{path}:{lineno}: bad record: {e}") from e
                yield f"{path.name}:{lineno}:{rid}", raw
    else:
        raise CorpusError(f"unreadable corpus path: {path}")


def load_corpus(path: str | Path, limit: int | None = None,
                global_seed: int = 0) -> Corpus:
    """Load and preprocess a corpus, skipping unparseable snippets.

    Snippets are returned sorted by id; duplicates (identical content)
    keep the first origin seen.  Raises :class:`CorpusError` if no valid
    snippet remains.
    """
    from . import syntax  # local import: corpus stays importable standalone

    seen: dict[str, Snippet] = {}
    skipped = 0
    for origin, raw in _iter_raw(Path(path)):
        try:
            text = preprocess(raw)
        except PreprocessError:
            skipped += 1
            continue
        if not text or len(text.encode("utf-8")) > MAX_SNIPPET_BYTES:
            skipped += 1
            continue
        sid = snippet_id(text)
        if sid in seen:
            continue
        try:
            syntax.parse(text)
        except syntax.ParseError:
            skipped += 1
            continue
        seen[sid] = Snippet(id=sid, text=text, origin=origin)
    snippets = [seen[k] for k in sorted(seen)]
    if limit is not None:
        snippets = snippets[:limit]
    if not snippets:
        raise CorpusError(f"no valid snippets in {path}")
    return Corpus(snippets=snippets, global_seed=global_seed, skipped=skipped)


def write_corpus_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Write the canonical corpus JSONL: {"id","text","origin"} per line."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in corpus.snippets:
            fh.write(json.dumps(
                {"id": s.id, "text": s.text, "origin": s.origin},
                ensure_ascii=False) + "\n")
