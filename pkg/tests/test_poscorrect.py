import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from claimkeys.parse import parse_ptb, pos_sequence, retag
from claimkeys.poscorrect import (
    PAD,
    EmbeddingTable,
    LinearPosClassifier,
    TrigramSample,
    correct_tags,
    featurize,
    load_embeddings,
    load_training_data,
    train,
)
from claimkeys.sample import synthetic_pos_data


def test_featurize_oov_zero():
    t = EmbeddingTable(4)
    assert np.array_equal(featurize("x", "y", "z", t), np.zeros(12))


def test_featurize_concatenation():
    t = EmbeddingTable(2, {"a": [1, 0], "b": [0, 1]})
    assert featurize("a", "b", "a", t).tolist() == [1, 0, 0, 1, 1, 0]


def test_featurize_default_dimension():
    assert featurize("a", "b", "c", EmbeddingTable()).shape == (900,)


def test_pad_is_zero():
    t = EmbeddingTable(2)
    assert featurize(PAD, PAD, PAD, t).tolist() == [0] * 6


@given(st.floats(-10, 10, allow_nan=False), st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3))
def test_featurize_linear_in_slot(lam, vec):
    t1 = EmbeddingTable(3, {"w": vec, "u": [1, 2, 3]})
    t2 = EmbeddingTable(3, {"w": [lam * v for v in vec], "u": [1, 2, 3]})
    f1 = featurize("u", "w", "u", t1)
    f2 = featurize("u", "w", "u", t2)
    assert np.allclose(f2[3:6], lam * f1[3:6])
    assert np.array_equal(f2[:3], f1[:3])


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        EmbeddingTable(3, {"a": [1, 2]})


def test_load_files(tmp_path):
    emb = tmp_path / "e.txt"
    emb.write_text("2 3\nthat 1 0 0\nsaid 0 1 0\n", encoding="utf-8")
    table = load_embeddings(emb)
    assert table.dimension == 3 and len(table) == 2
    assert table.get("That").tolist() == [1, 0, 0]
    data = tmp_path / "d.txt"
    data.write_text("that said sectors\tJJ\n", encoding="utf-8")
    (s,) = load_training_data(data, table)
    assert s.gold_tag == "JJ" and s.feature.tolist() == [1, 0, 0, 0, 1, 0, 0, 0, 0]
    bad = tmp_path / "bad.txt"
    bad.write_text("only two\tJJ\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":1:"):
        load_training_data(bad, table)


def test_separable_200():
    _, samples = synthetic_pos_data(200, seed=3)
    _, tr, te = train(samples, seed=0)
    assert tr >= 0.95


def test_single_class_constant():
    t = EmbeddingTable(2, {"a": [1, 0]})
    samples = [TrigramSample.build("a", "a", "a", "NN", t) for _ in range(10)]
    clf, tr, te = train(samples)
    assert tr == 1.0 and te == 1.0
    assert clf.classes == ["NN"]


def test_training_deterministic_and_order_invariant():
    _, samples = synthetic_pos_data(120, dimension=8, seed=5)
    clf1, *_ = train(samples, seed=7)
    clf2, *_ = train(list(reversed(samples)), seed=7)
    assert np.array_equal(clf1.weights, clf2.weights)
    assert np.array_equal(clf1.bias, clf2.bias)


def test_save_load(tmp_path):
    _, samples = synthetic_pos_data(60, dimension=5, seed=1)
    clf, *_ = train(samples)
    clf.save(tmp_path / "m.npz")
    back = LinearPosClassifier.load(tmp_path / "m.npz")
    X = np.array([s.feature for s in samples])
    assert back.predict(X) == clf.predict(X)


def _said_model():
    rng = np.random.default_rng(0)
    words = ["that", "said", "sectors", "he", "the", "device", "nozzles", "member", "it", "plate"]
    table = EmbeddingTable(16, {w: rng.normal(size=16) for w in words})
    train_rows = []
    for noun in ["sectors", "device", "nozzles", "member", "plate"]:
        train_rows += [("that", "said", noun, "JJ"), ("the", "said", noun, "JJ")]
        train_rows += [("he", "said", "that", "VBD"), ("it", "said", "the", "VBD")]
    samples = [TrigramSample.build(l, c, r, t, table) for l, c, r, t in train_rows * 5]
    clf, *_ = train(samples, seed=0, epochs=20)
    return clf, table


def test_said_corrected_to_adjective():
    clf, table = _said_model()
    tree = parse_ptb("(S (NP (DT that)) (VP (VBD said) (NP (NNS sectors))))")
    fixes = correct_tags(tree, clf, table)
    assert fixes == [(1, "VBD", "JJ")]


def test_no_verbs_no_corrections():
    clf, table = _said_model()
    assert correct_tags(parse_ptb("(NP (DT a) (NN layer))"), clf, table) == []


def test_padding_at_boundary():
    seen = []

    class Spy:
        def predict_one(self, x):
            seen.append(x.copy())
            return "VB"

    table = EmbeddingTable(2, {"go": [1, 1], "home": [2, 2]})
    correct_tags(parse_ptb("(S (VB go) (NN home))"), Spy(), table)
    assert seen[0].tolist() == [0, 0, 1, 1, 2, 2]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["that", "said", "sectors", "he", "the", "device"]), min_size=1, max_size=8),
       st.lists(st.sampled_from(["VBD", "VBN", "NN", "DT", "JJ"]), min_size=8, max_size=8))
def test_correction_idempotent_and_preserves_tokens(words, tags):
    clf, table = _said_model()
    tree = parse_ptb("(S " + " ".join(f"({t} {w})" for w, t in zip(words, tags)) + ")")
    once = retag(tree, {i: new for i, _, new in correct_tags(tree, clf, table)})
    twice = retag(once, {i: new for i, _, new in correct_tags(once, clf, table)})
    assert pos_sequence(once) == pos_sequence(twice)
    assert [w for w, _ in pos_sequence(once)] == [w for w, _ in pos_sequence(tree)]
    for (_, old), (_, new) in zip(pos_sequence(tree), pos_sequence(once)):
        if not old.startswith("VB"):
            assert old == new
