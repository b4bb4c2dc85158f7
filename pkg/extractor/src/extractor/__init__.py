"""Embedding-bundle extraction from pretrained transformer checkpoints."""

from .core import ExtractionSpec, ExtractionError, extract, load_variants

__all__ = ["ExtractionSpec", "ExtractionError", "extract", "load_variants"]

__version__ = "0.1.0"
