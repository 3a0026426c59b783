"""Indexed linear logic: formulae over finite loci, subtyping, a proof
checker with cut elimination, a preorder semantics and a bridge to
intersection types."""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["setfun", "formula", "subtyping", "proof", "derived", "cutelim", "scott", "itypes", "syntax", "cli"]
