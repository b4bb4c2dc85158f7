"""Embedding-bundle format, subtoken alignment and feature assembly.

A bundle is a directory holding ``manifest.json`` plus one
``layer_XX.bin`` file per layer; each layer file is the concatenation, in
manifest record order, of row-major little-endian float32 matrices of
shape m x d.  Offsets are byte ranges into the variant text; ``(-1, -1)``
marks special tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import snippet_seed

MAX_SUBTOKENS = 512
DTYPE_TAG = "f32le"
SPECIAL = (-1, -1)

_MOCK_PIECE_BYTES = 4


class BundleError(Exception):
    pass


@dataclass(frozen=True)
class BundleRecord:
    snippet_id: str
    variant_id: str
    m: int
    offsets: tuple[tuple[int, int], ...]

    @property
    def key(self) -> tuple[str, str]:
        return (self.snippet_id, self.variant_id)


@dataclass(frozen=True)
class FeatureRow:
    vector: np.ndarray
    label: int | str
    snippet_id: str
    key: str | None  # Simple-Bound key (subtoken text / text pair)


class EmbeddingBundle:
    """Per-layer, per-record embedding matrices with subtoken offsets."""

    def __init__(self, model_name: str, num_layers: int, hidden_size: int,
                 records: list[BundleRecord],
                 layers: list[np.ndarray] | None = None,
                 path: Path | None = None):
        self.model_name = model_name
        self.num_layers = num_layers
        self.hidden_size = hidden_size
        self.records = records
        self._layers = layers  # each (total_rows, d) when in memory
        self._path = path
        self._row_start: dict[tuple[str, str], int] = {}
        self._index: dict[tuple[str, str], int] = {}
        row = 0
        for i, r in enumerate(records):
            self._row_start[r.key] = row
            self._index[r.key] = i
            row += r.m
        self.total_rows = row

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._index

    def record(self, snippet_id: str, variant_id: str) -> BundleRecord:
        try:
            return self.records[self._index[(snippet_id, variant_id)]]
        except KeyError:
            raise BundleError(
                f"no record for ({snippet_id!r}, {variant_id!r})") from None

    def layer(self, layer: int) -> np.ndarray:
        if not 0 <= layer < self.num_layers:
            raise BundleError(f"layer {layer} out of range 0..{self.num_layers - 1}")
        if self._layers is not None:
            return self._layers[layer]
        mat = np.memmap(self._path / _layer_file(layer), dtype="<f4", mode="r")
        return mat.reshape(self.total_rows, self.hidden_size)

    def rows(self, snippet_id: str, variant_id: str, layer: int) -> np.ndarray:
        r = self.record(snippet_id, variant_id)
        start = self._row_start[r.key]
        return self.layer(layer)[start:start + r.m]


def _layer_file(layer: int) -> str:
    return f"layer_{layer:02d}.bin"


def _validate_offsets(rec: BundleRecord) -> None:
    prev_end = None
    for s, e in rec.offsets:
        if (s, e) == SPECIAL:
            continue
        if s < 0 or e < 0 or s > e:
            raise BundleError(
                f"record {rec.key}: bad offset pair ({s}, {e})")
        if prev_end is not None and s < prev_end:
            raise BundleError(
                f"record {rec.key}: offsets overlap or go backwards at ({s}, {e})")
        prev_end = e


def _validate(bundle: EmbeddingBundle) -> None:
    if bundle.hidden_size < 1 or bundle.num_layers < 1:
        raise BundleError("hidden_size and num_layers must be >= 1")
    for rec in bundle.records:
        if rec.m > MAX_SUBTOKENS:
            raise BundleError(f"record {rec.key}: m={rec.m} exceeds crop "
                              f"limit {MAX_SUBTOKENS}")
        if len(rec.offsets) != rec.m:
            raise BundleError(f"record {rec.key}: {len(rec.offsets)} offsets "
                              f"for m={rec.m}")
        _validate_offsets(rec)
    for layer in range(bundle.num_layers):
        mat = bundle.layer(layer)
        if mat.shape != (bundle.total_rows, bundle.hidden_size):
            raise BundleError(f"layer {layer}: shape {mat.shape} != "
                              f"({bundle.total_rows}, {bundle.hidden_size})")
        if not np.isfinite(mat).all():
            raise BundleError(f"layer {layer}: non-finite values")


def read_bundle(path: str | Path) -> EmbeddingBundle:
    """Load and eagerly validate a bundle directory."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.is_file():
        raise BundleError(f"missing manifest: {manifest_path}")
    man = json.loads(manifest_path.read_text(encoding="utf-8"))
    if man.get("dtype") != DTYPE_TAG:
        raise BundleError(f"unsupported dtype {man.get('dtype')!r}")
    records = [
        BundleRecord(r["snippet_id"], r["variant_id"], int(r["m"]),
                     tuple((int(a), int(b)) for a, b in r["offsets"]))
        for r in man["records"]
    ]
    bundle = EmbeddingBundle(man["model_name"], int(man["num_layers"]),
                             int(man["hidden_size"]), records, path=path)
    d = bundle.hidden_size
    for layer in range(bundle.num_layers):
        f = path / _layer_file(layer)
        if not f.is_file():
            raise BundleError(f"missing layer file {f.name}")
        size = f.stat().st_size
        if size != bundle.total_rows * d * 4:
            have_rows = size // (d * 4)
            row = 0
            culprit = bundle.records[-1] if bundle.records else None
            for r in bundle.records:
                if row + r.m > have_rows:
                    culprit = r
                    break
                row += r.m
            raise BundleError(
                f"layer file {f.name} has {have_rows} rows, expected "
                f"{bundle.total_rows}; first affected record: "
                f"{culprit.key if culprit else '<none>'}")
    _validate(bundle)
    return bundle


def write_bundle(bundle: EmbeddingBundle, path: str | Path) -> Path:
    """Write a bundle directory in the bit-exact on-disk layout."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    man = {
        "model_name": bundle.model_name,
        "num_layers": bundle.num_layers,
        "hidden_size": bundle.hidden_size,
        "dtype": DTYPE_TAG,
        "records": [
            {"snippet_id": r.snippet_id, "variant_id": r.variant_id,
             "m": r.m, "offsets": [list(o) for o in r.offsets]}
            for r in bundle.records
        ],
    }
    (path / "manifest.json").write_text(
        json.dumps(man, ensure_ascii=False), encoding="utf-8")
    for layer in range(bundle.num_layers):
        mat = np.ascontiguousarray(bundle.layer(layer), dtype="<f4")
        mat.tofile(path / _layer_file(layer))
    return path


def align(target_span: tuple[int, int],
          offsets: tuple[tuple[int, int], ...]) -> list[int]:
    """Indices of non-special subtokens overlapping the span by >= 1 byte."""
    ts, te = target_span
    out = []
    for i, (s, e) in enumerate(offsets):
        if (s, e) == SPECIAL:
            continue
        if s < te and e > ts:
            out.append(i)
    return out


def assemble_features(example, bundle: EmbeddingBundle, layer: int,
                      variant_text: str | None = None) -> list[FeatureRow]:
    """Build probe feature rows for one example at one layer.

    Returns [] when any target span fails to align (cropped example);
    callers count those as dropped.  ``variant_text`` enables Simple-Bound
    keys (subtoken surface text).
    """
    rec = bundle.record(example.snippet_id, example.variant_id)
    rows = bundle.rows(example.snippet_id, example.variant_id, layer)
    data = variant_text.encode("utf-8") if variant_text is not None else None

    def subtext(i: int) -> str | None:
        if data is None:
            return None
        s, e = rec.offsets[i]
        return data[s:e].decode("utf-8", errors="replace")

    mode = example.feature_mode
    if mode == "snippet_mean":
        idx = [i for i, o in enumerate(rec.offsets) if o != SPECIAL]
        if not idx:
            return []
        vec = rows[idx].mean(axis=0)
        return [FeatureRow(vec, example.label, example.snippet_id, None)]

    aligned = [align(span, rec.offsets) for span in example.target_spans]
    if any(not a for a in aligned) or not aligned:
        return []

    if mode == "per_subtoken":
        out = []
        for span_idx in aligned:
            for i in span_idx:
                out.append(FeatureRow(rows[i], example.label,
                                      example.snippet_id, subtext(i)))
        return out
    if mode == "pair_concat":
        if len(aligned) != 2:
            raise BundleError("pair_concat example needs exactly 2 spans")
        i, j = aligned[0][0], aligned[1][0]  # first subtoken of each token
        vec = np.concatenate([rows[i], rows[j]])
        key = None
        if data is not None:
            key = f"{subtext(i)}\x00{subtext(j)}"
        return [FeatureRow(vec, example.label, example.snippet_id, key)]
    if mode == "occurrence_mean":
        idx = sorted({i for span_idx in aligned for i in span_idx})
        vec = rows[idx].mean(axis=0)
        return [FeatureRow(vec, example.label, example.snippet_id, None)]
    raise BundleError(f"unknown feature mode {mode!r}")


def _mock_subtokenize(text: str) -> tuple[tuple[int, int], ...]:
    """Whitespace-split pseudo-subtokenization; tokens are chunked into
    <= 4-byte pieces so multi-subtoken tokens occur, plus one leading
    special token."""
    data = text.encode("utf-8")
    offsets: list[tuple[int, int]] = [SPECIAL]
    pos = 0
    n = len(data)
    while pos < n:
        if data[pos] == 0x20:
            pos += 1
            continue
        end = data.find(b" ", pos)
        if end < 0:
            end = n
        for s in range(pos, end, _MOCK_PIECE_BYTES):
            offsets.append((s, min(s + _MOCK_PIECE_BYTES, end)))
        pos = end
    return tuple(offsets[:MAX_SUBTOKENS])


def make_mock_bundle(variants, hidden_size: int, num_block_layers: int,
                     seed: int) -> EmbeddingBundle:
    """Deterministic random-noise bundle over a variants list.

    Produces ``num_block_layers + 1`` layers (layer 0 plays the role of
    the embedding output).  Embeddings are i.i.d. standard normal, seeded
    per record, so bundles are identical across runs and record orders.
    """
    if hidden_size < 1 or num_block_layers < 0:
        raise BundleError("hidden_size must be >= 1 and layers >= 0")
    num_layers = num_block_layers + 1
    records = []
    chunks: list[np.ndarray] = []
    for v in variants:
        offsets = _mock_subtokenize(v.text)
        m = len(offsets)
        records.append(BundleRecord(v.snippet_id, v.variant_id, m, offsets))
        rng = np.random.default_rng(
            snippet_seed(seed, f"{v.snippet_id}/{v.variant_id}", "mock"))
        chunks.append(rng.standard_normal((num_layers, m, hidden_size),
                                          dtype=np.float32))
    layers = [
        np.concatenate([c[layer] for c in chunks], axis=0)
        if chunks else np.zeros((0, hidden_size), dtype=np.float32)
        for layer in range(num_layers)
    ]
    return EmbeddingBundle("mock", num_layers, hidden_size, records,
                           layers=layers)
