"""Checkpoint loading, subtokenization with byte offsets, and layer dumps.

Output is a bundle directory: ``manifest.json`` plus one
``layer_XX.bin`` per hidden-state layer (layer 0 is the embedding
output), each the concatenation, in manifest record order, of row-major
little-endian float32 m x d matrices.  Tokenizer character offsets are
converted to UTF-8 byte offsets once, centrally; special tokens are
recorded as ``(-1, -1)``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

log = logging.getLogger("extractor")

SPECIAL = (-1, -1)
DTYPE_TAG = "f32le"


class ExtractionError(Exception):
    pass


@dataclass(frozen=True)
class ExtractionSpec:
    checkpoint: str
    side: str  # "encoder" | "decoder"
    out_dir: Path
    max_subtokens: int = 512
    batch_size: int = 8

    def __post_init__(self):
        if self.side not in ("encoder", "decoder"):
            raise ExtractionError(f"side must be encoder or decoder, "
                                  f"got {self.side!r}")
        if self.max_subtokens < 1 or self.batch_size < 1:
            raise ExtractionError("max_subtokens and batch_size must be >= 1")


@dataclass(frozen=True)
class VariantRow:
    snippet_id: str
    variant_id: str
    text: str


def load_variants(path: str | Path) -> list[VariantRow]:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                rows.append(VariantRow(r["snippet_id"], r["variant_id"],
                                       r["text"]))
            except (json.JSONDecodeError, KeyError) as e:
                raise ExtractionError(f"{path}:{lineno}: bad variant: {e}")
    if not rows:
        raise ExtractionError(f"no variants in {path}")
    return rows


def to_byte_offsets(text: str, char_offsets, special_mask
                    ) -> list[tuple[int, int]] | None:
    """Convert tokenizer char offsets to UTF-8 byte offsets.

    Returns None when the mapping is unusable (overlapping or
    non-monotonic content offsets); such records are skipped upstream.
    """
    prefix = [0]
    for ch in text:
        prefix.append(prefix[-1] + len(ch.encode("utf-8")))
    out: list[tuple[int, int]] = []
    prev_end = 0
    for (cs, ce), special in zip(char_offsets, special_mask):
        if special or cs == ce:
            out.append(SPECIAL)
            continue
        if not (0 <= cs < ce <= len(text)):
            return None
        bs, be = prefix[cs], prefix[ce]
        if bs < prev_end:
            return None
        out.append((bs, be))
        prev_end = be
    if all(o == SPECIAL for o in out):
        return None
    return out


def _load_model(checkpoint: str, side: str):
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    if not tokenizer.is_fast:
        raise ExtractionError(
            f"checkpoint {checkpoint!r} has no fast tokenizer; character "
            f"offsets are unavailable")
    model = AutoModel.from_pretrained(checkpoint)
    model.eval()
    if side == "decoder" and not model.config.is_encoder_decoder:
        raise ExtractionError(
            f"checkpoint {checkpoint!r} has no decoder side")
    return tokenizer, model


def _shift_right(input_ids: torch.Tensor, model) -> torch.Tensor:
    """Teacher-forced decoder input: the sequence shifted right, starting
    from the model's decoder start token."""
    if hasattr(model, "_shift_right"):
        return model._shift_right(input_ids)
    start = model.config.decoder_start_token_id
    if start is None:
        start = model.config.bos_token_id
    if start is None:
        raise ExtractionError("model defines no decoder start token")
    shifted = input_ids.new_full(input_ids.shape, start)
    shifted[:, 1:] = input_ids[:, :-1]
    return shifted


def _hidden_states(model, side: str, input_ids, attention_mask):
    if side == "encoder":
        encoder = model.get_encoder() if model.config.is_encoder_decoder \
            else model
        out = encoder(input_ids=input_ids, attention_mask=attention_mask,
                      output_hidden_states=True, return_dict=True)
        return out.hidden_states
    out = model(input_ids=input_ids, attention_mask=attention_mask,
                decoder_input_ids=_shift_right(input_ids, model),
                output_hidden_states=True, return_dict=True)
    return out.decoder_hidden_states


def extract(spec: ExtractionSpec, variants: list[VariantRow]) -> Path:
    """Run the checkpoint over every variant and write the bundle.

    Variants whose tokenizer offsets cannot be mapped to byte spans are
    skipped and logged.  Returns the bundle directory.
    """
    tokenizer, model = _load_model(spec.checkpoint, spec.side)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records: list[dict] = []
    num_layers: int | None = None
    handles = None
    skipped = 0
    try:
        for start in range(0, len(variants), spec.batch_size):
            batch = variants[start:start + spec.batch_size]
            enc = tokenizer(
                [v.text for v in batch], padding=True, truncation=True,
                max_length=spec.max_subtokens, return_tensors="pt",
                return_offsets_mapping=True, return_special_tokens_mask=True)
            with torch.no_grad():
                hidden = _hidden_states(model, spec.side, enc["input_ids"],
                                        enc["attention_mask"])
            if num_layers is None:
                num_layers = len(hidden)
                handles = [
                    (out_dir / f"layer_{i:02d}.bin").open("wb")
                    for i in range(num_layers)
                ]
            lengths = enc["attention_mask"].sum(dim=1).tolist()
            for i, v in enumerate(batch):
                m = int(lengths[i])
                char_offsets = enc["offset_mapping"][i][:m].tolist()
                special = enc["special_tokens_mask"][i][:m].tolist()
                offsets = to_byte_offsets(v.text, char_offsets, special)
                if offsets is None:
                    skipped += 1
                    log.warning("skipping %s/%s: unmappable offsets",
                                v.snippet_id, v.variant_id)
                    continue
                if spec.side == "decoder":
                    # hidden state i attends to the shifted prefix and
                    # corresponds to shifted-input position i: the start
                    # token, then the first m-1 subtokens
                    offsets = [SPECIAL] + offsets[:-1]
                for layer, handle in enumerate(handles):
                    mat = hidden[layer][i, :m].numpy().astype("<f4")
                    handle.write(np.ascontiguousarray(mat).tobytes())
                records.append({
                    "snippet_id": v.snippet_id, "variant_id": v.variant_id,
                    "m": m, "offsets": [list(o) for o in offsets],
                })
    finally:
        if handles:
            for h in handles:
                h.close()
    if not records:
        raise ExtractionError("all variants were skipped")
    manifest = {
        "model_name": f"{spec.checkpoint}-{spec.side}",
        "num_layers": num_layers,
        "hidden_size": int(model.config.hidden_size
                           if hasattr(model.config, "hidden_size")
                           else model.config.d_model),
        "dtype": DTYPE_TAG,
        "records": records,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False), encoding="utf-8")
    if skipped:
        log.warning("skipped %d variant(s)", skipped)
    return out_dir
