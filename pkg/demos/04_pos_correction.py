"""Correcting verb tags with a trigram classifier.

Parsers often tag the claim word "said" as a verb ("that said sectors").
A linear classifier over the embeddings of (previous word, word, next
word) re-predicts the tag of every verb-tagged token.
"""

import numpy as np

from claimkeys.parse import parse_ptb, pos_sequence, retag
from claimkeys.poscorrect import EmbeddingTable, TrigramSample, correct_tags, train
from claimkeys.sample import synthetic_pos_data

# 1. Separable synthetic data: 500 trigrams, 300-dimensional embeddings (900 features).
_, samples = synthetic_pos_data(500, dimension=300, seed=0)
print("feature length:", samples[0].feature.shape[0])
clf, train_acc, test_acc = train(samples, split_ratio=0.8, seed=0)
print(f"synthetic data: train accuracy {train_acc:.3f}, test accuracy {test_acc:.3f}")

# 2. A toy 'said' model: adjective after a determiner-like word, verb after a pronoun.
rng = np.random.default_rng(1)
vocab = ["that", "said", "sectors", "he", "it", "the", "device", "plate"]
table = EmbeddingTable(16, {w: rng.normal(size=16) for w in vocab})
rows = []
for noun in ("sectors", "device", "plate"):
    rows += [("that", "said", noun, "JJ"), ("the", "said", noun, "JJ")]
    rows += [("he", "said", "that", "VBD"), ("it", "said", "the", "VBD")]
clf, *_ = train([TrigramSample.build(*r, table) for r in rows * 5], seed=0, epochs=20)

tree = parse_ptb("(S (NP (DT that)) (VP (VBD said) (NP (NNS sectors))))")
fixes = correct_tags(tree, clf, table)
print("\nbefore:", pos_sequence(tree))
print("fixes: ", fixes)
print("after: ", pos_sequence(retag(tree, {i: new for i, _, new in fixes})))
