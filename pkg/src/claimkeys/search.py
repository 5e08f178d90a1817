"""Inverted index over claim text, BM25 retrieval and query baselines."""

import enum
import hashlib
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field

from .parse import tokenize_claim
from .porter import porter_stem
from .scoring import DEFAULT_STOPWORDS

logger = logging.getLogger(__name__)

__all__ = [
    "Field",
    "Analyzer",
    "InvertedIndex",
    "Query",
    "RunResult",
    "build_index",
    "execute_query",
    "keywords_query",
    "mlt_baseline",
    "tfidf_keyword_baseline",
    "write_run_file",
    "read_run_file",
    "save_index",
    "load_index",
]

INDEX_FORMAT = "claimkeys-index"
INDEX_VERSION = 1


class Field(enum.Enum):
    CLAIMS = "claims"
    FULLTEXT = "fulltext"


@dataclass(frozen=True)
class Analyzer:
    """tokenize -> lowercase -> keep alphabetic, drop stopwords -> Porter stem."""

    stopwords: frozenset = DEFAULT_STOPWORDS

    name = "tokenize|lowercase|alpha|stopwords|porter"

    def __call__(self, text):
        out = []
        for t in tokenize_claim(text):
            w = t.surface.lower()
            if len(w) < 2 or not w.isascii() or not w.isalpha() or w in self.stopwords:
                continue
            out.append(porter_stem(w))
        return out


class InvertedIndex:
    """Read-only after construction; use :func:`build_index` or :func:`load_index`."""

    def __init__(self, doc_ids, doc_terms, analyzer_name=Analyzer.name, field=Field.CLAIMS, k1=1.2, b=0.75):
        if len(set(doc_ids)) != len(doc_ids):
            raise ValueError("duplicate document ids")
        self._doc_ids = tuple(doc_ids)
        self._doc_len = tuple(sum(tf.values()) for tf in doc_terms)
        postings = {}
        for i, tf in enumerate(doc_terms):
            for term in sorted(tf):
                postings.setdefault(term, []).append((i, tf[term]))
        self._postings = {t: tuple(p) for t, p in sorted(postings.items())}
        self.analyzer_name = analyzer_name
        self.field = Field(field)
        self.k1 = k1
        self.b = b
        n = len(self._doc_ids)
        self._avgdl = sum(self._doc_len) / n if n else 0.0
        self._position = {d: i for i, d in enumerate(self._doc_ids)}

    @property
    def doc_ids(self):
        return self._doc_ids

    @property
    def n_docs(self):
        return len(self._doc_ids)

    @property
    def avgdl(self):
        return self._avgdl

    def doc_length(self, doc_id):
        return self._doc_len[self._position[doc_id]]

    def df(self, term):
        return len(self._postings.get(term, ()))

    def postings(self, term):
        """``(doc_id, tf)`` pairs in index order."""
        return [(self._doc_ids[i], tf) for i, tf in self._postings.get(term, ())]

    def terms(self):
        return list(self._postings)

    def idf(self, term):
        df = self.df(term)
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def to_dict(self):
        return {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "analyzer": self.analyzer_name,
            "field": self.field.value,
            "k1": self.k1,
            "b": self.b,
            "doc_ids": list(self._doc_ids),
            "doc_len": list(self._doc_len),
            "postings": {t: [list(p) for p in ps] for t, ps in self._postings.items()},
        }

    def checksum(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_dict(cls, data):
        if data.get("format") != INDEX_FORMAT:
            raise ValueError("not an index snapshot")
        if data.get("version") != INDEX_VERSION:
            raise ValueError(f"unsupported index version {data.get('version')}")
        doc_terms = [Counter() for _ in data["doc_ids"]]
        for term, plist in data["postings"].items():
            for i, tf in plist:
                doc_terms[i][term] = tf
        idx = cls(data["doc_ids"], doc_terms, data["analyzer"], data["field"], data["k1"], data["b"])
        if list(idx._doc_len) != data["doc_len"]:
            raise ValueError("snapshot document lengths are inconsistent with postings")
        return idx


def _document_text(doc, field):
    if field is Field.FULLTEXT:
        extra = getattr(doc, "fulltext", None)
        if extra:
            return extra
    return doc.text


def build_index(docs, field=Field.CLAIMS, analyzer=None, k1=1.2, b=0.75):
    if not docs:
        raise ValueError("no documents to index")
    field = Field(field)
    analyzer = analyzer or Analyzer()
    if field is Field.FULLTEXT and not any(getattr(d, "fulltext", None) for d in docs):
        logger.warning("documents carry no full text; indexing claims instead")
        field = Field.CLAIMS
    terms = [Counter(analyzer(_document_text(d, field))) for d in docs]
    return InvertedIndex([d.doc_id for d in docs], terms, analyzer.name, field, k1, b)


def save_index(index, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(index.to_dict(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_index(path):
    with open(path, encoding="utf-8") as fh:
        return InvertedIndex.from_dict(json.load(fh))


@dataclass(frozen=True)
class Query:
    terms: tuple
    limit: int = 1000

    def __post_init__(self):
        terms = tuple((str(t), float(w)) for t, w in self.terms)
        if any(w <= 0 for _, w in terms):
            raise ValueError("boost weights must be positive")
        if self.limit < 1:
            raise ValueError("limit must be positive")
        object.__setattr__(self, "terms", terms)

    @property
    def stems(self):
        return [t for t, _ in self.terms]


@dataclass
class RunResult:
    topic: str
    hits: list = field(default_factory=list)
    run: str = "run"

    @property
    def doc_ids(self):
        return [d for d, _ in self.hits]

    def rank_of(self, doc_id):
        for i, (d, _) in enumerate(self.hits, 1):
            if d == doc_id:
                return i
        return None


def execute_query(index, query, topic=None, run="run"):
    """BM25 ranking of ``query``; ``topic`` (a doc id) is excluded from its own results."""
    if not query.terms:
        logger.warning("empty query for topic %s", topic)
        return RunResult(topic, [], run)
    k1, b, avgdl = index.k1, index.b, index.avgdl
    scores = {}
    for term, boost in query.terms:
        plist = index._postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for i, tf in plist:
            dl = index._doc_len[i]
            s = boost * idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl))
            scores[i] = scores.get(i, 0.0) + s
    ids = index._doc_ids
    hits = [(ids[i], s) for i, s in scores.items() if ids[i] != topic]
    hits.sort(key=lambda h: (-h[1], h[0]))
    return RunResult(topic, hits[: query.limit], run)


def keywords_query(keywords, boost=False, limit=1000):
    """Query from ranked keywords; with ``boost``, weight = score / max score."""
    kws = list(keywords)
    if not kws:
        return Query((), limit)
    top = max(k.score for k in kws)
    seen = {}
    for k in kws:
        w = (k.score / top if top > 0 else 1.0) if boost else 1.0
        seen.setdefault(k.stem, w)
    return Query(tuple(seen.items()), limit)


def _tfidf_terms(index, text, analyzer):
    tf = Counter(analyzer(text))
    n = index.n_docs
    weighted = []
    for term, f in tf.items():
        df = index.df(term)
        if df == 0:
            continue
        weighted.append((term, f * math.log(n / df)))
    weighted.sort(key=lambda x: (-x[1], x[0]))
    if any(w > 0 for _, w in weighted):
        weighted = [(t, w) for t, w in weighted if w > 0]
    return weighted


def mlt_baseline(index, source_text, max_terms=25, analyzer=None, limit=1000):
    """More-like-this query: the source's top ``tf * log(N/df)`` stems, unboosted."""
    weighted = _tfidf_terms(index, source_text, analyzer or Analyzer())
    return Query(tuple((t, 1.0) for t, _ in weighted[:max_terms]), limit)


def tfidf_keyword_baseline(index, doc, n=100, analyzer=None, limit=1000):
    """Explicit keyword list from the topic document's own text, same weighting as MLT."""
    weighted = _tfidf_terms(index, doc.text, analyzer or Analyzer())
    return Query(tuple((t, 1.0) for t, _ in weighted[:n]), limit)


def write_run_file(results, path):
    """``topic Q0 doc rank score run`` lines, ranks from 1, scores to 6 decimals."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for res in results:
                for rank, (doc, score) in enumerate(res.hits, 1):
                    fh.write(f"{res.topic} Q0 {doc} {rank} {score:.6f} {res.run}\n")
    except OSError as e:
        raise OSError(f"cannot write run file {path}: {e}") from e


def read_run_file(path):
    """Results grouped by (run, topic) in file order."""
    grouped = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 fields")
            topic, _, doc, rank, score, run = parts
            res = grouped.setdefault((run, topic), RunResult(topic, [], run))
            if int(rank) != len(res.hits) + 1:
                raise ValueError(f"{path}:{lineno}: ranks are not consecutive")
            res.hits.append((doc, float(score)))
    return list(grouped.values())
