"""Patent documents, claim references, relevance judgments, corpus statistics."""

import json
import logging
import re
from collections import Counter, deque
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

__all__ = [
    "Claim",
    "PatentDocument",
    "QrelSet",
    "CorpusStats",
    "CorpusError",
    "ClaimCycleError",
    "extract_claim_refs",
    "claim_depth",
    "load_corpus",
    "parse_document",
    "load_qrels",
    "parse_qrels",
    "corpus_stats",
    "sentence_stats",
    "flesch_reading_ease",
    "count_syllables",
    "naive_sentence_split",
]


class CorpusError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class ClaimCycleError(ValueError):
    def __init__(self, doc_id, cycle):
        self.cycle = tuple(cycle)
        path = " -> ".join(str(n) for n in self.cycle)
        super().__init__(f"{doc_id}: claim reference cycle {path}")


@dataclass(frozen=True)
class Claim:
    number: int
    text: str
    parent_refs: frozenset = frozenset()
    depth: int = 0


@dataclass(frozen=True)
class PatentDocument:
    doc_id: str
    language: str
    cpc_codes: tuple
    claims: tuple

    def claim(self, number):
        for c in self.claims:
            if c.number == number:
                return c
        raise KeyError(f"{self.doc_id}: no claim {number}")

    @property
    def text(self):
        return "\n".join(c.text for c in self.claims)

    @property
    def domain(self):
        """First letter of the first CPC code, or ``"?"``."""
        for code in self.cpc_codes:
            code = code.strip()
            if code:
                return code[0].upper()
        return "?"


# ---------------------------------------------------------------------------
# claim references

_NUM_LIST = r"\d+(?:\s*(?:-|–|to|through|,|and/or|and|or)\s*\d+)*"
_CLAIM_NUMS = re.compile(r"\bclaims?\s+(?:no\.?\s*|nos\.?\s*|numbers?\s+)?(" + _NUM_LIST + ")", re.I)
_PRECEDING = re.compile(
    r"\b(?:preceding|previous|foregoing|prior|above)\s+claims?\b(?!\s*(?:no\.?\s*)?\d)", re.I
)
_RANGE_WORDS = {"-", "–", "to", "through"}


def _expand_numbers(chunk):
    parts = re.findall(r"\d+|-|–|to|through", chunk, re.I)
    out = []
    pending_range = False
    for p in parts:
        if p.lower() in _RANGE_WORDS:
            pending_range = bool(out)
            continue
        n = int(p)
        if pending_range and out and n >= out[-1]:
            out.extend(range(out[-1] + 1, n + 1))
        else:
            out.append(n)
        pending_range = False
    return out


def extract_claim_refs(text, self_number):
    """Claim numbers referenced by ``text``, excluding ``self_number``.

    Recognised forms: "claim N", "claims N to M", "claims N, M and K",
    and open references such as "any of the preceding claims", which
    expand to every claim numbered below ``self_number``.
    """
    refs = set()
    for m in _CLAIM_NUMS.finditer(text):
        refs.update(_expand_numbers(m.group(1)))
    if _PRECEDING.search(text):
        refs.update(range(1, self_number))
    refs.discard(self_number)
    forward = sorted(r for r in refs if r > self_number or r < 1)
    if forward:
        logger.warning("claim %d references non-preceding claims %s", self_number, forward)
    if not refs and re.search(r"\bclaims?\b", text, re.I):
        logger.warning("claim %d mentions a claim but no reference pattern matched", self_number)
    return refs


def _find_cycle(graph):
    state = {}
    for start in sorted(graph):
        if start in state:
            continue
        stack = [(start, iter(sorted(graph[start])))]
        path = [start]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                path.pop()
                continue
            if state.get(nxt) == 1:
                return path[path.index(nxt):] + [nxt]
            if nxt not in state:
                state[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(graph.get(nxt, ())))))
    return None


def _depths(doc_id, graph):
    cycle = _find_cycle(graph)
    if cycle:
        raise ClaimCycleError(doc_id, cycle)
    children = {n: [] for n in graph}
    for n, parents in graph.items():
        for p in parents:
            children[p].append(n)
    depth = {n: 0 for n, parents in graph.items() if not parents}
    queue = deque(sorted(depth))
    while queue:
        n = queue.popleft()
        for c in sorted(children[n]):
            if c not in depth:
                depth[c] = depth[n] + 1
                queue.append(c)
    return depth


def claim_depth(doc, number):
    """Minimum number of hops from claim ``number`` up to a parentless claim."""
    graph = {c.number: set(c.parent_refs) for c in doc.claims}
    if number not in graph:
        raise KeyError(f"{doc.doc_id}: no claim {number}")
    return _depths(doc.doc_id, graph)[number]


def make_document(doc_id, claims, language="en", cpc_codes=()):
    """Build a document from ``(number, text)`` pairs, resolving references."""
    numbers = [n for n, _ in claims]
    if len(set(numbers)) != len(numbers):
        raise CorpusError(f"{doc_id}: duplicate claim numbers")
    if any(n < 1 for n in numbers):
        raise CorpusError(f"{doc_id}: claim numbers must be >= 1")
    known = set(numbers)
    graph = {}
    for n, text in claims:
        refs = extract_claim_refs(text, n)
        missing = refs - known
        if missing:
            logger.warning("%s claim %d: dropping references to unknown claims %s", doc_id, n, sorted(missing))
        graph[n] = refs & known
    depth = _depths(doc_id, graph)
    built = tuple(Claim(n, text, frozenset(graph[n]), depth[n]) for n, text in claims)
    return PatentDocument(doc_id, language, tuple(cpc_codes), built)


def parse_document(record, lineno=None):
    if not isinstance(record, dict):
        raise CorpusError("record is not an object", lineno)
    try:
        doc_id = record["doc_id"]
        raw_claims = record["claims"]
    except KeyError as e:
        raise CorpusError(f"missing field {e.args[0]!r}", lineno) from None
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError("doc_id must be a non-empty string", lineno)
    if not isinstance(raw_claims, list) or not raw_claims:
        raise CorpusError(f"{doc_id}: claims must be a non-empty list", lineno)
    pairs = []
    for c in raw_claims:
        if not isinstance(c, dict) or not isinstance(c.get("num"), int) or not isinstance(c.get("text"), str):
            raise CorpusError(f"{doc_id}: malformed claim entry {c!r}", lineno)
        pairs.append((c["num"], c["text"]))
    try:
        return make_document(doc_id, pairs, record.get("lang", "en"), record.get("cpc", ()))
    except (CorpusError, ClaimCycleError) as e:
        raise CorpusError(str(e), lineno) from None


def load_corpus(path, strict=False, errors=None):
    """Read a JSONL corpus file.

    Malformed lines raise :class:`CorpusError` in strict mode; otherwise
    they are logged, appended to ``errors`` when given, and skipped.
    """
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise CorpusError(f"invalid JSON: {e.msg}", lineno) from None
                docs.append(parse_document(record, lineno))
            except CorpusError as e:
                if strict:
                    raise
                logger.warning("%s: %s", path, e)
                if errors is not None:
                    errors.append(e)
    return docs


def dump_document(doc):
    return json.dumps(
        {
            "doc_id": doc.doc_id,
            "lang": doc.language,
            "cpc": list(doc.cpc_codes),
            "claims": [{"num": c.number, "text": c.text} for c in doc.claims],
        },
        ensure_ascii=False,
    )


# ---------------------------------------------------------------------------
# qrels


@dataclass
class QrelSet:
    entries: list = field(default_factory=list)
    relevant: dict = field(default_factory=dict)
    code_counts: Counter = field(default_factory=Counter)

    RELEVANT_CODE = "X"

    def add(self, topic, doc, code):
        self.entries.append((topic, doc, code))
        self.code_counts[code] += 1
        if code == self.RELEVANT_CODE:
            self.relevant.setdefault(topic, set()).add(doc)

    def topics(self):
        """Topics with at least one relevant document, sorted."""
        return sorted(t for t, docs in self.relevant.items() if docs)

    def __getitem__(self, topic):
        return self.relevant.get(topic, set())

    def dumps(self):
        return "".join(f"{t}\t{d}\t{c}\n" for t, d, c in self.entries)


def parse_qrels(lines):
    qrels = QrelSet()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
        topic, doc, code = parts
        if not topic or not doc:
            raise CorpusError("empty topic or document id", lineno)
        if len(code) != 1 or not code.isupper():
            raise CorpusError(f"relevance code must be one uppercase character, got {code!r}", lineno)
        qrels.add(topic, doc, code)
    return qrels


def load_qrels(path):
    with open(path, encoding="utf-8") as fh:
        return parse_qrels(fh)


# ---------------------------------------------------------------------------
# statistics

_WORD = re.compile(r"[A-Za-z]+(?:['-][A-Za-z]+)*")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


def count_syllables(word):
    """Vowel-group heuristic: groups of a/e/i/o/u/y, minus a final silent e, at least 1."""
    w = word.lower()
    n = len(_VOWEL_GROUP.findall(w))
    if w.endswith("e"):
        n -= 1
    return max(n, 1)


def flesch_reading_ease(words):
    """Reading ease of a single sentence given its words."""
    if not words:
        raise ValueError("sentence has no words")
    syllables = sum(count_syllables(w) for w in words)
    return 206.835 - 1.015 * len(words) - 84.6 * (syllables / len(words))


def naive_sentence_split(text):
    """Split on sentence-final punctuation followed by whitespace."""
    parts = re.split(r"(?<=[.!?])\s+", text.strip())
    return [p for p in parts if re.search(r"\w", p)]


def default_word_tokenizer(text):
    return _WORD.findall(text)


@dataclass
class CorpusStats:
    sentence_length_histogram: dict
    flesch_scores: list
    claim_split_rate: float
    n_sentences: int = 0
    n_claims: int = 0
    empty_claims: int = 0


def sentence_stats(sentences, tokenizer=None):
    """Length histogram and reading-ease scores for any list of sentences."""
    tokenizer = tokenizer or default_word_tokenizer
    hist = Counter()
    scores = []
    n = 0
    for s in sentences:
        words = [w for w in tokenizer(s) if any(ch.isalpha() for ch in w)]
        if not words:
            continue
        n += 1
        hist[len(words)] += 1
        scores.append(flesch_reading_ease(words))
    return dict(sorted(hist.items())), scores, n


def corpus_stats(docs, tokenizer=None):
    """Statistics over claims, each claim treated as one sentence."""
    if not docs:
        raise ValueError("no documents")
    texts = []
    empty = 0
    for doc in docs:
        for c in doc.claims:
            if c.text.strip():
                texts.append(c.text)
            else:
                empty += 1
    if empty:
        logger.warning("%d empty claims excluded from statistics", empty)
    hist, scores, n = sentence_stats(texts, tokenizer)
    split = sum(1 for t in texts if len(naive_sentence_split(t)) > 1)
    rate = split / len(texts) if texts else 0.0
    return CorpusStats(hist, scores, rate, n_sentences=n, n_claims=len(texts), empty_claims=empty)
