import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from claimkeys.corpus import make_document
from claimkeys.scoring import Keyword
from claimkeys.search import (
    Analyzer,
    Field,
    Query,
    RunResult,
    build_index,
    execute_query,
    keywords_query,
    load_index,
    mlt_baseline,
    read_run_file,
    save_index,
    tfidf_keyword_baseline,
    write_run_file,
)
from oracles import brute_force_bm25


def _doc(doc_id, text):
    return make_document(doc_id, [(1, text)])


def test_disjoint_vocab_df_one():
    idx = build_index([_doc("A", "valve piston"), _doc("B", "nozzle heater")])
    assert all(idx.df(t) == 1 for t in idx.terms())


def test_duplicate_docs_identical_postings():
    idx = build_index([_doc("A", "valve piston valve"), _doc("B", "valve piston valve")])
    for t in idx.terms():
        (a, tf_a), (b, tf_b) = idx.postings(t)
        assert (a, b) == ("A", "B") and tf_a == tf_b
    assert idx.doc_length("A") == idx.doc_length("B")


def test_analyzer_chain():
    assert Analyzer()("The valves, wherein said Pistons (12) x") == ["valv", "piston"]


def test_index_statistics_match_linear_scan(sample200):
    docs, _ = sample200
    idx = build_index(docs)
    an = Analyzer()
    bags = {d.doc_id: an(d.text) for d in docs}
    for t in idx.terms():
        assert idx.df(t) == sum(1 for toks in bags.values() if t in toks)
        for doc_id, tf in idx.postings(t):
            assert tf == bags[doc_id].count(t)
    assert idx.avgdl == pytest.approx(sum(map(len, bags.values())) / len(bags))


def test_single_term_single_doc_first():
    idx = build_index([_doc("A", "valve piston"), _doc("B", "nozzle heater"), _doc("C", "valve nozzle")])
    res = execute_query(idx, Query((("piston", 1.0),)))
    assert res.doc_ids == ["A"]


def test_self_exclusion_and_empty_query(caplog):
    idx = build_index([_doc("A", "valve"), _doc("B", "valve")])
    assert execute_query(idx, Query((("valv", 1.0),)), topic="A").doc_ids == ["B"]
    assert execute_query(idx, Query(())).hits == []
    assert "empty query" in caplog.text


def test_query_validation():
    with pytest.raises(ValueError):
        Query((("a", 0.0),))
    with pytest.raises(ValueError):
        Query((("a", 1.0),), limit=0)


def test_oracle_50_docs(sample50):
    docs, _ = sample50
    idx = build_index(docs)
    rng = random.Random(4)
    for _ in range(20):
        terms = tuple((t, 1.0) for t in rng.sample(idx.terms(), 3))
        got = execute_query(idx, Query(terms, limit=10**6))
        want = brute_force_bm25(docs, terms)
        assert [d for d, _ in got.hits] == [d for d, _ in want]
        assert [s for _, s in got.hits] == pytest.approx([s for _, s in want], rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 100))
def test_uniform_boost_scaling(lam):
    docs = [_doc(f"D{i}", t) for i, t in enumerate(["valve piston seal", "valve seal seal", "piston nozzle", "seal"])]
    idx = build_index(docs)
    terms = (("valv", 1.0), ("seal", 0.5), ("piston", 2.0))
    base = execute_query(idx, Query(terms)).doc_ids
    scaled = execute_query(idx, Query(tuple((t, w * lam) for t, w in terms))).doc_ids
    assert base == scaled


def test_boost_neutrality_and_immutability(sample50):
    docs, _ = sample50
    idx = build_index(docs)
    before = idx.checksum()
    kws = [Keyword("valve", "valv", 0.3), Keyword("seal", "seal", 0.3), Keyword("piston", "piston", 0.3)]
    plain = execute_query(idx, keywords_query(kws, boost=False))
    boosted = execute_query(idx, keywords_query(kws, boost=True))
    assert plain.hits == boosted.hits
    assert idx.checksum() == before


def test_boost_weights():
    kws = [Keyword("a", "a", 0.4), Keyword("b", "b", 0.1)]
    assert keywords_query(kws, boost=True).terms == (("a", 1.0), ("b", 0.25))
    assert keywords_query(kws).terms == (("a", 1.0), ("b", 1.0))


def _toy():
    return [
        _doc("A", "valve valve valve piston seal nozzle"),
        _doc("B", "valve piston"),
        _doc("C", "valve heater"),
        _doc("D", "valve seal"),
    ]


def test_mlt_ranking_by_hand():
    idx = build_index(_toy())
    # N=4: valve df=4 -> 0; piston tf1 df2 -> log2; seal tf1 df2 -> log2; nozzle tf1 df1 -> log4
    q = mlt_baseline(idx, "valve valve valve piston seal nozzle", max_terms=3)
    assert q.stems == ["nozzl", "piston", "seal"]
    assert all(w == 1.0 for _, w in q.terms)


def test_mlt_single_term_and_oov():
    idx = build_index(_toy())
    assert mlt_baseline(idx, "heater").stems == ["heater"]
    assert mlt_baseline(idx, "zebra").terms == ()


def test_mlt_zero_idf_excluded():
    idx = build_index(_toy())
    assert "valv" not in mlt_baseline(idx, "valve piston", max_terms=25).stems
    # with no alternatives the zero-weight term is kept
    assert mlt_baseline(idx, "valve").stems == ["valv"]


def test_tfidf_baseline():
    docs = _toy()
    idx = build_index(docs)
    assert tfidf_keyword_baseline(idx, docs[0], n=1).stems == ["nozzl"]
    assert set(tfidf_keyword_baseline(idx, docs[0], n=100).stems) == {"nozzl", "piston", "seal"}


def test_fulltext_falls_back(caplog):
    idx = build_index(_toy(), Field.FULLTEXT)
    assert idx.field is Field.CLAIMS
    assert "claims instead" in caplog.text


def test_snapshot_round_trip(tmp_path, sample50):
    docs, _ = sample50
    idx = build_index(docs)
    save_index(idx, tmp_path / "i.json")
    back = load_index(tmp_path / "i.json")
    assert back.checksum() == idx.checksum()
    q = mlt_baseline(idx, docs[0].text)
    assert execute_query(back, q, docs[0].doc_id).hits == execute_query(idx, q, docs[0].doc_id).hits
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "other"}', encoding="utf-8")
    with pytest.raises(ValueError):
        load_index(bad)


def test_run_file(tmp_path):
    p = tmp_path / "r.txt"
    write_run_file([], p)
    assert p.read_text() == ""
    res = RunResult("T1", [("D1", 2.5), ("D2", 1.0 / 3)], "juju06")
    write_run_file([res], p)
    assert p.read_text().splitlines() == ["T1 Q0 D1 1 2.500000 juju06", "T1 Q0 D2 2 0.333333 juju06"]
    (back,) = read_run_file(p)
    assert back.topic == "T1" and back.run == "juju06" and back.doc_ids == ["D1", "D2"]
    assert back.hits[1][1] == pytest.approx(0.333333)


def test_run_file_unwritable(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_run_file([], tmp_path / "missing" / "r.txt")


def test_ranking_order_invariant(sample50):
    docs, _ = sample50
    idx = build_index(docs)
    res = execute_query(idx, mlt_baseline(idx, docs[3].text), docs[3].doc_id)
    keys = [(-s, d) for d, s in res.hits]
    assert keys == sorted(keys)
    assert docs[3].doc_id not in res.doc_ids
    assert len(res.hits) <= 1000
