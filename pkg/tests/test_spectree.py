import pytest
from hypothesis import given, settings, strategies as st

from claimkeys.parse import parse_ptb, tokenize_claim
from claimkeys.spectree import (
    Relation,
    build_spec_tree_from_cues,
    build_spec_tree_from_parse,
    check_invariants,
    dump_spec_tree,
    word_occurrences,
)

FIG6 = (
    "(NP (NP (DT a) (NN carrier) (NN trap) (NN layer))"
    " (VP (VBN disposed) (PP (IN between) (NP (NP (DT the) (NN substrate)) (CC and)"
    " (NP (DT the) (NN luminescence) (NN structure))))))"
)
CLAIM1 = (
    "An inkjet printhead (40) comprising: nozzles (13); firing resistors (48); and fire pulse "
    "generator circuitry (100/200) responsive to a start fire signal to generate a plurality of fire signals"
)
CLAIM37 = (
    "Method according to one or more of the preceding claims 25 to 36, characterized in that initial "
    "iteration steps for determining compensation dipoles by means of quadratic or linear programming can "
    "provide in combination a modification for each subsequent iteration step consisting in a reduction of "
    "constraints such that the partial solution converges progressively towards a solution that is "
    "considered an optimum one."
)


def _find(root, startswith):
    for node in root.iter_nodes():
        if node.text.startswith(startswith):
            return node
    raise AssertionError(f"no node starting with {startswith!r}:\n{dump_spec_tree(root)}")


def test_figure6_parse():
    tree = parse_ptb(FIG6)
    root = build_spec_tree_from_parse(tree)
    check_invariants(root, len(tree.leaves()))
    assert root.text == "a carrier trap layer"
    child = root.children[0]
    assert child.relation is Relation.SPECIALIZATION
    assert child.text.startswith("disposed")
    texts = {n.text for n in root.iter_nodes() if n.relation is Relation.AGGREGATION}
    assert texts == {"the substrate", "the luminescence structure"}


def test_flat_tree_single_node():
    root = build_spec_tree_from_parse(parse_ptb("(NP (DT a) (NN layer))"))
    assert root.children == [] and root.depth == 0 and root.height == 1


def test_enumeration_parse_gives_aggregation_siblings():
    text = (
        "(NP (NP (DT An) (NN inkjet) (NN printhead)) (VP (VBG comprising) (: :)"
        " (NP (NP (NNS nozzles)) (: ;) (NP (VBG firing) (NNS resistors)) (: ;) (CC and)"
        " (NP (NN fire) (NN pulse) (NN generator) (NN circuitry)))))"
    )
    tree = parse_ptb(text)
    root = build_spec_tree_from_parse(tree)
    check_invariants(root, len(tree.leaves()))
    comprising = _find(root, "comprising")
    aggs = [c for c in comprising.children if c.relation is Relation.AGGREGATION]
    assert [a.text for a in aggs] == ["nozzles", "firing resistors", "fire pulse generator circuitry"]
    assert len({a.depth for a in aggs}) == 1


def test_sbar_opens_specialization():
    tree = parse_ptb("(S (NP (DT a) (NN valve)) (SBAR (WHNP (WDT that)) (S (VP (VBZ opens)))))")
    root = build_spec_tree_from_parse(tree)
    assert root.children[0].relation is Relation.SPECIALIZATION
    assert root.children[0].text == "that opens"


def test_cues_no_cues_single_node():
    root = build_spec_tree_from_cues(tokenize_claim("A valve body made of steel"))
    assert root.children == [] and root.height == 1


def test_cues_enumeration():
    toks = tokenize_claim("X comprising: a; b; and c")
    root = build_spec_tree_from_cues(toks)
    check_invariants(root, len(toks))
    assert root.text == "X"
    (comp,) = root.children
    assert comp.relation is Relation.SPECIALIZATION and comp.text.startswith("comprising")
    assert [c.text for c in comp.children] == ["a", "b", "c"]
    assert all(c.relation is Relation.AGGREGATION for c in comp.children)


def test_cues_claim37():
    toks = tokenize_claim(CLAIM37)
    root = build_spec_tree_from_cues(toks)
    check_invariants(root, len(toks))
    char = _find(root, "characterized in that")
    assert char in root.children
    such = _find(root, "such that")
    assert such.depth > char.depth
    assert such in list(char.iter_nodes())
    prof = word_occurrences([(37, root, 2)])
    assert min(nd for nd, _, _ in prof.P("converges")) >= char.depth


def test_cues_claim1_aggregation():
    toks = tokenize_claim(CLAIM1)
    root = build_spec_tree_from_cues(toks)
    check_invariants(root, len(toks))
    comp = _find(root, "comprising")
    assert [c.relation for c in comp.children] == [Relation.AGGREGATION] * 3


def test_dump_format():
    root = build_spec_tree_from_cues(tokenize_claim("X comprising: a; b"))
    assert dump_spec_tree(root) == "X\n  [S] comprising : ;\n    [A] a\n    [A] b\n"


def test_occurrences_root_only():
    root = build_spec_tree_from_cues(tokenize_claim("a valve body"))
    prof = word_occurrences([(1, root, 0)])
    assert prof.P("valve") == {(0, root.height, 0)}


def test_occurrences_depth_and_filter(sample50):
    root = build_spec_tree_from_cues(tokenize_claim("X comprising: a valve; b (12)"))
    prof = word_occurrences([(2, root, 1)], stopwords={"comprising"})
    assert (2, 1, 1) in prof.P("valve")
    assert "comprising" not in prof and "12" not in prof and "x" not in prof


_WORDS = ["a", "valve", "comprising", "wherein", "such", "that", ";", ":", "and", ",", "body", "(", "12", ")",
          "characterized", "in", "according", "to", "consisting", "of", "seal", "or"]


@settings(max_examples=300)
@given(st.lists(st.sampled_from(_WORDS), min_size=1, max_size=40))
def test_cue_builder_invariants(words):
    toks = tokenize_claim(" ".join(words))
    root = build_spec_tree_from_cues(toks)
    check_invariants(root, len(toks))
    assert dump_spec_tree(root) == dump_spec_tree(build_spec_tree_from_cues(toks))


_tags = st.sampled_from(["NN", "DT", "VBN", "VBG", "IN", "CC", ":", "JJ", "RB"])
_phr = st.sampled_from(["NP", "VP", "PP", "SBAR", "S", "ADVP", "NP-SBJ"])


@st.composite
def ptb(draw, depth=4):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return f"({draw(_tags)} w{draw(st.integers(0, 9))})"
    kids = draw(st.lists(ptb(depth=depth - 1), min_size=1, max_size=4))
    return f"({draw(_phr)} {' '.join(kids)})"


@settings(max_examples=300)
@given(ptb())
def test_parse_builder_invariants(text):
    tree = parse_ptb(text)
    root = build_spec_tree_from_parse(tree)
    check_invariants(root, len(tree.leaves()))
    assert dump_spec_tree(root) == dump_spec_tree(build_spec_tree_from_parse(parse_ptb(text)))


def test_sample_corpus_partition(sample50):
    docs, _ = sample50
    for doc in docs:
        for c in doc.claims:
            toks = tokenize_claim(c.text)
            check_invariants(build_spec_tree_from_cues(toks), len(toks))


def test_check_invariants_detects_violation():
    root = build_spec_tree_from_cues(tokenize_claim("X comprising: a; b"))
    root.children[0].depth = 5
    with pytest.raises(AssertionError):
        check_invariants(root)
