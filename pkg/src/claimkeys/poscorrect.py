"""Verb-tag correction with a linear classifier over trigram embeddings.

Each candidate token (tag starting with ``VB``) is represented by the
concatenated embeddings of (previous word, word, next word). Unknown words
and sentence boundaries embed to zero.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .parse import pos_sequence

logger = logging.getLogger(__name__)

__all__ = [
    "PAD",
    "EmbeddingTable",
    "TrigramSample",
    "LinearPosClassifier",
    "load_embeddings",
    "load_training_data",
    "featurize",
    "train",
    "correct_tags",
]

PAD = "<PAD>"


class EmbeddingTable:
    def __init__(self, dimension=300, vectors=None):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._vectors = {}
        for word, vec in (vectors or {}).items():
            self.add(word, vec)

    def add(self, word, vector):
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != (self.dimension,):
            raise ValueError(f"vector for {word!r} has shape {v.shape}, expected ({self.dimension},)")
        v.setflags(write=False)
        self._vectors[word] = v

    def __contains__(self, word):
        return word in self._vectors

    def __len__(self):
        return len(self._vectors)

    def get(self, word):
        if word == PAD:
            return np.zeros(self.dimension)
        v = self._vectors.get(word)
        if v is None:
            v = self._vectors.get(word.lower())
        return np.zeros(self.dimension) if v is None else v


def load_embeddings(path):
    """Text format: header ``count dimension`` then ``word v1 ... vd`` lines."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: header must be 'count dimension'")
        count, dim = int(header[0]), int(header[1])
        table = EmbeddingTable(dim)
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if not parts or not parts[0]:
                continue
            if len(parts) != dim + 1:
                raise ValueError(f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}")
            table.add(parts[0], [float(x) for x in parts[1:]])
    if len(table) != count:
        logger.warning("%s: header announces %d vectors, read %d", path, count, len(table))
    return table


def featurize(left, center, right, table):
    return np.concatenate([table.get(left), table.get(center), table.get(right)])


@dataclass(frozen=True)
class TrigramSample:
    left: str
    center: str
    right: str
    gold_tag: str
    feature: np.ndarray

    @classmethod
    def build(cls, left, center, right, gold_tag, table):
        return cls(left, center, right, gold_tag, featurize(left, center, right, table))


def load_training_data(path, table):
    """Lines ``left center right<TAB>gold_tag``."""
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                words, tag = line.split("\t")
                left, center, right = words.split()
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'left center right<TAB>tag'") from None
            samples.append(TrigramSample.build(left, center, right, tag.strip(), table))
    return samples


class LinearPosClassifier:
    """One-vs-rest linear model; predicts ``argmax(W x + b)``."""

    def __init__(self, classes, weights, bias, seed=0):
        self.classes = list(classes)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.seed = seed
        if self.weights.shape[0] != len(self.classes) or self.bias.shape != (len(self.classes),):
            raise ValueError("weights/bias do not match classes")

    @property
    def n_features(self):
        return self.weights.shape[1]

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return X @ self.weights.T + self.bias

    def predict(self, X):
        scores = self.decision_function(X)
        return [self.classes[i] for i in np.argmax(scores, axis=1)]

    def predict_one(self, x):
        return self.predict(x)[0]

    def accuracy(self, X, y):
        if len(y) == 0:
            return float("nan")
        return float(np.mean([p == t for p, t in zip(self.predict(X), y)]))

    def save(self, path):
        np.savez(path, classes=np.array(self.classes), weights=self.weights, bias=self.bias, seed=self.seed)

    @classmethod
    def load(cls, path):
        with np.load(path, allow_pickle=False) as z:
            return cls([str(c) for c in z["classes"]], z["weights"], z["bias"], int(z["seed"]))


def _canonical_order(samples):
    return sorted(
        samples,
        key=lambda s: (s.gold_tag, s.left, s.center, s.right, np.ascontiguousarray(s.feature).tobytes()),
    )


def _pegasos(X, Y, reg, epochs, rng):
    """Multi-output Pegasos on the hinge loss; bias is folded in as a constant feature."""
    n, d = X.shape
    Xb = np.hstack([X, np.ones((n, 1))])
    W = np.zeros((Y.shape[1], d + 1))
    W_avg = np.zeros_like(W)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (reg * t)
            x = Xb[i]
            y = Y[i]
            violated = y * (W @ x) < 1.0
            W *= 1.0 - eta * reg
            if violated.any():
                W += eta * np.outer(y * violated, x)
            W_avg += (W - W_avg) / t
    return W_avg[:, :-1], W_avg[:, -1]


def train(samples, split_ratio=0.8, seed=0, epochs=10, reg=1e-4):
    """Fit a one-vs-rest linear SVM by seeded stochastic subgradient descent.

    Samples are put into a canonical order before the seeded shuffle, so
    the result does not depend on the order they were passed in.

    Returns ``(classifier, train_accuracy, test_accuracy)``.
    """
    if not samples:
        raise ValueError("no training samples")
    if not 0.0 < split_ratio < 1.0:
        raise ValueError("split_ratio must be in (0, 1)")
    rng = np.random.default_rng(seed)
    ordered = _canonical_order(samples)
    perm = rng.permutation(len(ordered))
    n_train = max(1, int(round(split_ratio * len(ordered))))
    train_set = [ordered[i] for i in perm[:n_train]]
    test_set = [ordered[i] for i in perm[n_train:]]

    X_tr = np.array([s.feature for s in train_set], dtype=np.float64)
    y_tr = [s.gold_tag for s in train_set]
    X_te = np.array([s.feature for s in test_set], dtype=np.float64).reshape(len(test_set), X_tr.shape[1])
    y_te = [s.gold_tag for s in test_set]
    classes = sorted(set(s.gold_tag for s in samples))
    d = X_tr.shape[1]

    if len(classes) == 1:
        logger.warning("training data has a single class %r; classifier is constant", classes[0])
        clf = LinearPosClassifier(classes, np.zeros((1, d)), np.zeros(1), seed)
    else:
        index = {c: k for k, c in enumerate(classes)}
        Y = -np.ones((len(y_tr), len(classes)))
        Y[np.arange(len(y_tr)), [index[c] for c in y_tr]] = 1.0
        W, b = _pegasos(X_tr, Y, reg, epochs, rng)
        clf = LinearPosClassifier(classes, W, b, seed)
    return clf, clf.accuracy(X_tr, y_tr), clf.accuracy(X_te, y_te)


def correct_tags(tree, classifier, table):
    """Predicted replacements ``(token index, old tag, new tag)`` for verb-tagged tokens."""
    seq = pos_sequence(tree)
    words = [w for w, _ in seq]
    out = []
    for i, (word, tag) in enumerate(seq):
        if not tag or not tag.startswith("VB"):
            continue
        left = words[i - 1] if i > 0 else PAD
        right = words[i + 1] if i + 1 < len(words) else PAD
        new = classifier.predict_one(featurize(left, word, right, table))
        if new != tag:
            out.append((i, tag, new))
    return out
