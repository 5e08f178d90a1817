"""Keyword extraction from patent claims for prior-art search.

Claims are split into specialization trees, words are weighted by how
deep they sit in those trees and in the claim dependency hierarchy, and
the resulting keyword lists drive BM25 queries that are evaluated with
recall and PRES.
"""

__version__ = "0.1.0"

from .corpus import PatentDocument, QrelSet, load_corpus, load_qrels, make_document  # noqa: E402
from .porter import porter_stem  # noqa: E402
from .scoring import ScoringParams, Variant, extract_keywords  # noqa: E402
from .spectree import build_spec_tree_from_cues, build_spec_tree_from_parse  # noqa: E402

__all__ = [
    "__version__",
    "PatentDocument",
    "QrelSet",
    "ScoringParams",
    "Variant",
    "build_spec_tree_from_cues",
    "build_spec_tree_from_parse",
    "extract_keywords",
    "load_corpus",
    "load_qrels",
    "make_document",
    "porter_stem",
]
