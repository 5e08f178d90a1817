"""Scoring stems and extracting keywords.

Words are grouped by Porter stem. Each stem is scored from where its
words sit: deeper in the specialization tree and deeper in the claim
tree both raise the score. Scores are normalized to sum to one over all
stems, then the top N are kept.
"""

import math

from claimkeys.cli import sample_paths
from claimkeys.corpus import load_corpus
from claimkeys.parse import tokenize_claim
from claimkeys.porter import porter_stem
from claimkeys.scoring import (
    DEFAULT_STOPWORDS,
    ScoringParams,
    StemRecord,
    aggregate_stems,
    extract_keywords,
    score_stem,
)
from claimkeys.spectree import Occurrence, build_spec_tree_from_cues, word_occurrences

print("curated ->", porter_stem("curated"), "| curation ->", porter_stem("curation"))

corpus_path, _ = sample_paths()
doc = load_corpus(corpus_path)[0]
print(f"\n{doc.doc_id}, {len(doc.claims)} claims")
for c in doc.claims[:3]:
    print(f"  {c.number}: {c.text}")

trees = [(c.number, build_spec_tree_from_cues(tokenize_claim(c.text)), c.depth) for c in doc.claims]
records = aggregate_stems(word_occurrences(trees, DEFAULT_STOPWORDS))

for variant in ("juju05", "juju06"):
    params = ScoringParams(variant)
    keywords = extract_keywords(records, params, n=8)
    print(f"\n{variant} (alpha={params.alpha:g}, beta={params.beta:g}), top 8 of {keywords.total_stems} stems:")
    for k in keywords:
        print(f"  {k.word:12s} {k.score:.4f}")

# The two formulas on a small hand-made occurrence set.
rec = StemRecord("s", "w", {"w": 2}, frozenset({Occurrence(1, 1, 1, 0), Occurrence(2, 2, 1, 1)}), 0)
print("\nP(s) = {(1,1,0), (2,1,1)}")
print(f"  juju05 = e^0.5 + e^(2/3+1) = {score_stem(rec, ScoringParams('juju05')):.4f}"
      f" (check {math.exp(0.5) + math.exp(5 / 3):.4f})")
print(f"  juju06 = e^(1+0) + e^(2+2) = {score_stem(rec, ScoringParams('juju06')):.4f}")
