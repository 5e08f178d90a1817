"""Stem aggregation, depth-weighted scoring and keyword ranking."""

import csv
import enum
import math
from dataclasses import dataclass, field

from .porter import porter_stem

__all__ = [
    "ENGLISH_STOPWORDS",
    "CLAIM_BOILERPLATE",
    "DEFAULT_STOPWORDS",
    "Variant",
    "ScoringParams",
    "StemRecord",
    "Keyword",
    "KeywordList",
    "aggregate_stems",
    "score_stem",
    "extract_keywords",
    "keyword_text_ratio",
    "write_keywords_csv",
    "read_keywords_csv",
]

ENGLISH_STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because been before being
    below between both but by can could did do does doing down during each few for from further
    had has have having he her here hers herself him himself his how i if in into is it its itself
    just me more most my myself no nor not now of off on once only or other our ours ourselves out
    over own same she should so some such than that the their theirs them themselves then there
    these they this those through to too under until up very was we were what when where which
    while who whom why will with would you your yours yourself yourselves also may one two via
    thereby therein thereof whereby upon within without least said
    """.split()
)

CLAIM_BOILERPLATE = frozenset(
    ["said", "claim", "claims", "wherein", "according", "preceding", "characterized", "characterised"]
)

DEFAULT_STOPWORDS = ENGLISH_STOPWORDS | CLAIM_BOILERPLATE


class Variant(enum.Enum):
    JUJU05 = "juju05"
    JUJU06 = "juju06"


_DEFAULT_WEIGHTS = {Variant.JUJU05: (1.0, 1.0), Variant.JUJU06: (1.0, 2.0)}


@dataclass(frozen=True)
class ScoringParams:
    variant: Variant = Variant.JUJU06
    alpha: float = None
    beta: float = None

    def __post_init__(self):
        variant = Variant(self.variant)
        object.__setattr__(self, "variant", variant)
        a, b = _DEFAULT_WEIGHTS[variant]
        if self.alpha is None:
            object.__setattr__(self, "alpha", a)
        if self.beta is None:
            object.__setattr__(self, "beta", b)


@dataclass
class StemRecord:
    stem: str
    word: str
    counts: dict
    occurrences: frozenset
    first_seen: int

    @property
    def P(self):
        return {o.triple for o in self.occurrences}


def _representative(counts, first_seen):
    return min(counts, key=lambda w: (-counts[w], first_seen[w], w))


def aggregate_stems(profile):
    """Group the profile's words by Porter stem."""
    groups = {}
    for w in profile.words():
        groups.setdefault(porter_stem(w), []).append(w)
    records = {}
    for stem, words in groups.items():
        counts = {w: profile.counts[w] for w in words}
        first = {w: profile.first_seen[w] for w in words}
        occ = frozenset().union(*(profile.occurrences[w] for w in words))
        records[stem] = StemRecord(stem, _representative(counts, first), counts, occ, min(first.values()))
    return records


def score_stem(record, params):
    """Unnormalized score of one stem.

    JUJU05 sums ``exp(a*nd/(nd+nh) + b*cd)`` over the distinct
    ``(nd, nh, cd)`` triples. JUJU06 sums ``exp(a*max(nd) + b*cd)`` over
    the claims the stem occurs in, the max being taken within each claim.
    """
    a, b = params.alpha, params.beta
    if params.variant is Variant.JUJU05:
        return math.fsum(math.exp(a * nd / (nd + nh) + b * cd) for nd, nh, cd in sorted(record.P))
    per_claim = {}
    for o in record.occurrences:
        nd, cd = per_claim.get(o.claim, (0, o.cd))
        per_claim[o.claim] = (max(nd, o.nd), cd)
    return math.fsum(math.exp(a * nd + b * cd) for _, (nd, cd) in sorted(per_claim.items()))


@dataclass(frozen=True)
class Keyword:
    word: str
    stem: str
    score: float


@dataclass
class KeywordList:
    keywords: list = field(default_factory=list)
    normalizer: float = 1.0
    total_stems: int = 0

    def __iter__(self):
        return iter(self.keywords)

    def __len__(self):
        return len(self.keywords)

    def __getitem__(self, i):
        return self.keywords[i]

    def pairs(self):
        return [(k.word, k.score) for k in self.keywords]


def extract_keywords(records, params=None, n=100, raw_scores=None):
    """Normalize scores over all stems to sum 1, rank them, keep the top ``n``.

    Ties are broken by earlier first appearance, then by word. ``raw_scores``
    (stem -> score) overrides :func:`score_stem`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not records:
        return KeywordList()
    params = params or ScoringParams()
    if raw_scores is None:
        raw_scores = {s: score_stem(r, params) for s, r in records.items()}
    total = math.fsum(raw_scores.values())
    c = 1.0 / total
    ranked = sorted(records.values(), key=lambda r: (-raw_scores[r.stem], r.first_seen, r.word))
    kws = [Keyword(r.word, r.stem, raw_scores[r.stem] * c) for r in ranked[:n]]
    return KeywordList(kws, c, len(records))


def normalized_scores(records, params=None):
    params = params or ScoringParams()
    raw = {s: score_stem(r, params) for s, r in records.items()}
    total = math.fsum(raw.values())
    return {s: v / total for s, v in raw.items()}


def keyword_text_ratio(keywords, candidate_words):
    """Share of the claim set's unique candidate words used as keywords."""
    unique = set(candidate_words)
    if not unique:
        raise ValueError("no candidate words")
    return len(keywords) / len(unique)


def write_keywords_csv(path, doc_id, keywords):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "rank", "word", "score"])
        for rank, kw in enumerate(keywords, 1):
            w.writerow([doc_id, rank, kw.word, f"{kw.score:.9f}"])


def read_keywords_csv(path):
    """Rows as ``(doc_id, rank, word, score)``."""
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.DictReader(fh)
        return [(row["doc_id"], int(row["rank"]), row["word"], float(row["score"])) for row in r]
