"""Probing-dataset generation and linear probing for code embeddings."""

from .embed import (
    EmbeddingBundle, BundleError, read_bundle, write_bundle, make_mock_bundle,
)

__all__ = [
    "EmbeddingBundle", "BundleError", "read_bundle", "write_bundle",
    "make_mock_bundle",
]

__version__ = "0.1.0"
