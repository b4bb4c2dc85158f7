"""Semantic analyses over Java syntax trees: data-flow edges and scopes."""

from .dfg import (
    DfgEdge, CandidatePair, extract_dfg, sample_negative_pairs,
    COMES_FROM, COMPUTED_FROM,
)
from .scopes import ScopeTree, Scope, Declaration, build_scope_tree

__all__ = [
    "DfgEdge", "CandidatePair", "extract_dfg", "sample_negative_pairs",
    "COMES_FROM", "COMPUTED_FROM",
    "ScopeTree", "Scope", "Declaration", "build_scope_tree",
]
