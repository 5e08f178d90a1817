import json
import math

import pytest
from hypothesis import given, strategies as st

from claimkeys.corpus import (
    ClaimCycleError,
    CorpusError,
    claim_depth,
    corpus_stats,
    count_syllables,
    extract_claim_refs,
    flesch_reading_ease,
    load_corpus,
    load_qrels,
    make_document,
    parse_qrels,
)


def test_extract_refs_single():
    assert extract_claim_refs("The inkjet printhead of claim 1 wherein the nozzles", 2) == {1}


def test_extract_refs_independent():
    assert extract_claim_refs("An inkjet printhead (40) comprising: nozzles (13)", 1) == set()


def test_extract_refs_preceding_range():
    text = "Method according to one or more of the preceding claims 25 to 36, characterized in that"
    assert extract_claim_refs(text, 37) == set(range(25, 37))


@pytest.mark.parametrize(
    "text, num, expected",
    [
        ("The device of claims 1, 3 and 4, wherein", 5, {1, 3, 4}),
        ("The device of claims 2-4, wherein", 6, {2, 3, 4}),
        ("The device according to any of the preceding claims, wherein", 4, {1, 2, 3}),
        ("The device of claim 1 or claim 2", 3, {1, 2}),
        ("A device with no references", 3, set()),
    ],
)
def test_extract_refs_patterns(text, num, expected):
    assert extract_claim_refs(text, num) == expected


def test_extract_refs_excludes_self():
    assert 3 not in extract_claim_refs("The device of claims 1 to 3", 3)


@given(st.integers(1, 60), st.integers(1, 60), st.integers(1, 60))
def test_extract_refs_range_property(a, b, self_number):
    lo, hi = min(a, b), max(a, b)
    refs = extract_claim_refs(f"The method of claims {lo} to {hi}, wherein", self_number)
    assert refs == set(range(lo, hi + 1)) - {self_number}


def test_depths():
    doc = make_document("D", [(1, "A device."), (2, "The device of claim 1."), (3, "The device of claims 1 or 2.")])
    assert [c.depth for c in doc.claims] == [0, 1, 1]
    assert claim_depth(doc, 2) == 1
    assert doc.claim(2).parent_refs == {1}


def test_multi_parent_depth_takes_minimum():
    # C has parents A (depth 0) and B (depth 1): shortest path gives 1
    doc = make_document("D", [(1, "A."), (2, "B of claim 1."), (3, "C of claims 1 and 2.")])
    assert claim_depth(doc, 3) == 1


def test_unknown_claim():
    doc = make_document("D", [(1, "A.")])
    with pytest.raises(KeyError):
        claim_depth(doc, 9)


def test_cycle_detected():
    with pytest.raises(ClaimCycleError) as exc:
        make_document("D", [(1, "A."), (2, "B of claim 3."), (3, "C of claim 2.")])
    assert set(exc.value.cycle) >= {2, 3}


def test_depth_invariants_on_sample(sample50):
    docs, _ = sample50
    for doc in docs:
        for c in doc.claims:
            assert c.number not in c.parent_refs
            assert (c.depth == 0) == (not c.parent_refs)
            assert c.depth < len(doc.claims)


def _write_jsonl(path, records):
    path.write_text("".join(r if isinstance(r, str) else json.dumps(r) + "\n" for r in records), encoding="utf-8")


def test_load_corpus(tmp_path):
    p = tmp_path / "c.jsonl"
    _write_jsonl(p, [{"doc_id": "D1", "lang": "en", "cpc": ["H01L"], "claims": [
        {"num": 1, "text": "An inkjet printhead (40) comprising: nozzles."},
        {"num": 2, "text": "The inkjet printhead of claim 1 wherein the nozzles are small."}]}])
    docs = load_corpus(p)
    assert len(docs) == 1
    assert [c.number for c in docs[0].claims] == [1, 2]
    assert docs[0].claims[1].parent_refs == {1}
    assert docs[0].domain == "H"


def test_load_corpus_skip_and_strict(tmp_path):
    p = tmp_path / "c.jsonl"
    good = {"doc_id": "D1", "claims": [{"num": 1, "text": "A thing."}]}
    _write_jsonl(p, [good, "{not json\n", {"doc_id": "", "claims": []}, good | {"doc_id": "D2"}])
    errors = []
    docs = load_corpus(p, errors=errors)
    assert [d.doc_id for d in docs] == ["D1", "D2"]
    assert [e.lineno for e in errors] == [2, 3]
    with pytest.raises(CorpusError) as exc:
        load_corpus(p, strict=True)
    assert exc.value.lineno == 2


def test_qrels_basic():
    q = parse_qrels(["T1\tD9\tX\n"])
    assert q["T1"] == {"D9"}


def test_qrels_only_x_relevant():
    q = parse_qrels(["T1\tD1\tA\n", "T1\tD2\tY\n"])
    assert q["T1"] == set()
    assert q.code_counts == {"A": 1, "Y": 1}
    assert q.topics() == []


def test_qrels_five_relevant():
    q = parse_qrels([f"T1\tD{i}\tX\n" for i in range(5)])
    assert len(q["T1"]) == 5


@pytest.mark.parametrize("line", ["T1\tD1\n", "T1\tD1\tx\n", "\tD1\tX\n", "T1\tD1\tXY\n"])
def test_qrels_malformed(line):
    with pytest.raises(CorpusError) as exc:
        parse_qrels(["T0\tD0\tX\n", line])
    assert exc.value.lineno == 2


_id = st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=8)


@given(st.lists(st.tuples(_id, _id, st.sampled_from("XAYPD")), max_size=20))
def test_qrels_round_trip(entries):
    text = "".join(f"{t}\t{d}\t{c}\n" for t, d, c in entries)
    assert parse_qrels(text.splitlines(keepends=True)).dumps() == text


def test_load_qrels_file(tmp_path):
    p = tmp_path / "q.txt"
    p.write_text("T1\tD1\tX\nT1\tD2\tA\n", encoding="utf-8")
    q = load_qrels(p)
    assert q["T1"] == {"D1"} and q.code_counts["A"] == 1


def test_syllables():
    assert count_syllables("cat") == 1
    assert count_syllables("make") == 1
    assert count_syllables("reading") == 2
    assert count_syllables("the") == 1


def test_flesch_worked_value():
    # 10 words, 13 syllables: three two-syllable words, seven one-syllable
    words = ["baker", "water", "river"] + ["cat"] * 7
    assert sum(count_syllables(w) for w in words) == 13
    assert flesch_reading_ease(words) == pytest.approx(206.835 - 1.015 * 10 - 84.6 * 1.3, abs=1e-9)
    assert flesch_reading_ease(words) == pytest.approx(86.705, abs=1e-9)


@given(st.integers(1, 40), st.integers(0, 100), st.integers(1, 50))
def test_flesch_monotone_in_syllables(n_words, extra, more):
    base = 206.835 - 1.015 * n_words
    lo = base - 84.6 * (n_words + extra) / n_words
    hi = base - 84.6 * (n_words + extra + more) / n_words
    assert hi < lo
    # and the implementation agrees with the formula on real words
    words = ["cat"] * n_words
    assert flesch_reading_ease(words) == pytest.approx(base - 84.6, abs=1e-9)


def test_corpus_stats(sample50):
    docs, _ = sample50
    st_ = corpus_stats(docs)
    assert sum(st_.sentence_length_histogram.values()) == st_.n_sentences
    assert 0.0 <= st_.claim_split_rate <= 1.0
    assert len(st_.flesch_scores) == st_.n_sentences


def test_corpus_stats_split_rate_zero_and_empty():
    doc = make_document("D", [(1, "A device comprising a part"), (2, "   "), (3, "The device of claim 1, wherein x")])
    st_ = corpus_stats([doc])
    assert st_.claim_split_rate == 0.0
    assert st_.empty_claims == 1


def test_corpus_stats_split_detected():
    doc = make_document("D", [(1, "A device. It has parts."), (2, "The device of claim 1.")])
    assert math.isclose(corpus_stats([doc]).claim_split_rate, 0.5)
