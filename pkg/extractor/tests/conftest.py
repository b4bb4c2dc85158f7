"""Fixtures: tiny randomly initialized checkpoints saved to disk.

No network access is needed; models and fast tokenizers are built
in-process and written with ``save_pretrained`` so the extractor loads
them exactly like any hub checkpoint.
"""

from __future__ import annotations

import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    BertConfig, BertModel, PreTrainedTokenizerFast, T5Config, T5Model,
)

SAMPLE_TEXTS = [
    "int f0(int count) { int total = 0; while (count > 0) { total = "
    "total + count; count = count - 1; } return total; }",
    "int f1(int value) { if (value > 3) { value = value * 2; } "
    "return value; }",
    "void f2() { int i = 0; int j = i + 1; use(i, j); }",
]


def _word_vocab(texts):
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3}
    for text in texts:
        tok = Tokenizer(models.WordLevel({"[UNK]": 1}, unk_token="[UNK]"))
        tok.pre_tokenizer = pre_tokenizers.Whitespace()
        for piece, _ in tok.pre_tokenizer.pre_tokenize_str(text):
            vocab.setdefault(piece, len(vocab))
    return vocab


def make_fast_tokenizer(texts) -> PreTrainedTokenizerFast:
    vocab = _word_vocab(texts)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])])
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]")


@pytest.fixture(scope="session")
def variants_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "variants.jsonl"
    with path.open("w") as fh:
        for i, text in enumerate(SAMPLE_TEXTS):
            fh.write(json.dumps({"snippet_id": f"s{i}", "variant_id": "orig",
                                 "text": text}) + "\n")
    return path


@pytest.fixture(scope="session")
def encoder_checkpoint(tmp_path_factory):
    """Tiny BERT-style encoder-only checkpoint (2 blocks, d=16)."""
    out = tmp_path_factory.mktemp("ckpt") / "tiny-encoder"
    tokenizer = make_fast_tokenizer(SAMPLE_TEXTS)
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size, hidden_size=16,
        num_hidden_layers=2, num_attention_heads=2, intermediate_size=32,
        max_position_embeddings=512,
        pad_token_id=tokenizer.pad_token_id)
    model = BertModel(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def seq2seq_checkpoint(tmp_path_factory):
    """Tiny T5-style encoder-decoder checkpoint (2+2 blocks, d=16)."""
    out = tmp_path_factory.mktemp("ckpt") / "tiny-seq2seq"
    tokenizer = make_fast_tokenizer(SAMPLE_TEXTS)
    torch.manual_seed(0)
    config = T5Config(
        vocab_size=tokenizer.vocab_size, d_model=16, d_kv=8, d_ff=32,
        num_layers=2, num_decoder_layers=2, num_heads=2,
        decoder_start_token_id=tokenizer.pad_token_id,
        pad_token_id=tokenizer.pad_token_id)
    model = T5Model(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out
