"""Specialization trees of claims.

A claim is cut into fragments. A fragment that gives a technical detail
of another becomes its SPECIALIZATION child; items of an enumeration
become AGGREGATION children of the fragment that introduces them. Every
token of the claim belongs to exactly one node.

Two builders produce the same structure: one from a constituency parse,
one from cue phrases and list punctuation when no parse is available.
"""

import enum
import re
from dataclasses import dataclass, field

from .parse import Token

__all__ = [
    "Relation",
    "SpecNode",
    "Occurrence",
    "OccurrenceProfile",
    "DEFAULT_CUES",
    "build_spec_tree_from_parse",
    "build_spec_tree_from_cues",
    "check_invariants",
    "dump_spec_tree",
    "word_occurrences",
    "is_candidate",
]


class Relation(enum.Enum):
    SPECIALIZATION = "S"
    AGGREGATION = "A"


@dataclass
class SpecNode:
    tokens: list = field(default_factory=list)
    children: list = field(default_factory=list)
    relation: Relation = None
    depth: int = 0
    height: int = 1

    @property
    def text(self):
        return " ".join(t.surface for t in self.tokens)

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def all_tokens(self):
        return sorted((t for n in self.iter_nodes() for t in n.tokens), key=lambda t: t.index)


def _finalize(node, depth=0):
    node.depth = depth
    node.tokens.sort(key=lambda t: t.index)
    for c in node.children:
        _finalize(c, depth + 1)
    node.height = 1 + max((c.height for c in node.children), default=0)
    return node


def check_invariants(root, n_tokens=None):
    """Raise ``AssertionError`` if depth/height recurrences or the token partition fail."""
    assert root.depth == 0 and root.relation is None
    seen = []
    for node in root.iter_nodes():
        seen.extend(t.index for t in node.tokens)
        if not node.children:
            assert node.height == 1, "leaf height must be 1"
        else:
            assert node.height == 1 + max(c.height for c in node.children)
        for c in node.children:
            assert c.depth == node.depth + 1
            assert node.height >= c.height + 1
            assert c.relation in (Relation.SPECIALIZATION, Relation.AGGREGATION)
    assert len(seen) == len(set(seen)), "a token is owned by two nodes"
    if n_tokens is not None:
        assert sorted(seen) == list(range(n_tokens)), "tokens are not partitioned"


def dump_spec_tree(root):
    """Indented text, two spaces per depth level, relation prefix ``[S]``/``[A]``."""
    lines = []

    def walk(node):
        prefix = f"[{node.relation.value}] " if node.relation else ""
        lines.append("  " * node.depth + prefix + node.text)
        for c in node.children:
            walk(c)

    walk(root)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parse-based builder

_BRACKET_LEAVES = {"-LRB-": "(", "-RRB-": ")", "-LSB-": "[", "-RSB-": "]", "-LCB-": "{", "-RCB-": "}"}
_TRANSPARENT = {"", "ROOT", "TOP"}
_SEPARATOR_TAGS = {"CC", ":", ","}


def _base_label(label):
    if label.startswith("-"):
        return label
    return re.split(r"[-=]", label, maxsplit=1)[0]


def _opens_specialization(node, label, parent_label):
    if parent_label is None:
        return False
    if label == "SBAR":
        return True
    if label == "PP" and parent_label in ("NP", "VP"):
        return True
    if label == "VP":
        for c in node.children:
            if c.is_preterminal:
                tag = c.label
                if tag.startswith("VB"):
                    return tag in ("VBG", "VBN")
                if tag == "RB":
                    continue
                return False
            if _base_label(c.label) == "ADVP":
                continue
            return False
    return False


def _is_separator(node):
    if not node.is_preterminal:
        return False
    return node.label in _SEPARATOR_TAGS


def _conjuncts(node):
    """Split children into separators and conjunct groups, or ``None`` if not a coordination."""
    kids = node.children
    coordinating = any(
        c.is_preterminal and (c.label == "CC" or c.children[0].label == ";") for c in kids
    )
    if not coordinating:
        return None
    items = []
    group = []
    for c in kids:
        if _is_separator(c):
            if group:
                items.append(("conj", group))
                group = []
            items.append(("sep", c))
        else:
            group.append(c)
    if group:
        items.append(("conj", group))
    groups = [g for kind, g in items if kind == "conj"]
    if len(groups) < 2 or not all(any(not g.is_preterminal for g in grp) for grp in groups):
        return None
    return items


def _leaf_token(pre):
    leaf = pre.children[0]
    surface = _BRACKET_LEAVES.get(leaf.label, leaf.label)
    return Token(surface, leaf.index, pre.label)


def _walk(node, parent_label, current):
    if node.is_preterminal:
        current.tokens.append(_leaf_token(node))
        return
    if node.is_terminal:
        current.tokens.append(Token(node.label, node.index))
        return
    label = _base_label(node.label)
    if _opens_specialization(node, label, parent_label):
        child = SpecNode(relation=Relation.SPECIALIZATION)
        current.children.append(child)
        current = child
    own_label = None if label in _TRANSPARENT else label
    items = _conjuncts(node)
    if items is None:
        for c in node.children:
            _walk(c, own_label, current)
        return
    for kind, item in items:
        if kind == "sep":
            _walk(item, own_label, current)
        else:
            agg = SpecNode(relation=Relation.AGGREGATION)
            current.children.append(agg)
            for c in item:
                _walk(c, own_label, agg)


def build_spec_tree_from_parse(tree):
    """Derive the specialization tree from a (tag-corrected) parse.

    A SPECIALIZATION child opens at every SBAR, at every PP inside an NP
    or VP, and at every VP headed by a VBG/VBN participle. Conjuncts of a
    coordination (CC or ``;`` between phrases) become AGGREGATION children.
    Other tokens stay with the nearest enclosing node.
    """
    root = SpecNode()
    _walk(tree, None, root)
    return _finalize(root)


# ---------------------------------------------------------------------------
# cue-based builder

DEFAULT_CUES = (
    ("characterized", "in", "that"),
    ("characterised", "in", "that"),
    ("such", "that"),
    ("consisting", "of"),
    ("according", "to"),
    ("wherein",),
    ("comprising",),
)
_ROOT_CUES = {("characterized", "in", "that"), ("characterised", "in", "that")}
_LIST_JOINERS = {"and", "or"}


def _match_cue(words, i, cues):
    for cue in cues:
        if tuple(words[i : i + len(cue)]) == cue:
            return cue
    return None


def build_spec_tree_from_cues(tokens, cues=DEFAULT_CUES):
    """Fallback builder driven by cue phrases and list punctuation.

    Cue phrases open a SPECIALIZATION child of the current node
    ("characterized in that" always attaches to the root). A ``:`` that
    introduces a ``;``-separated list opens AGGREGATION children of the
    current node, one per item.
    """
    if not tokens:
        return _finalize(SpecNode())
    cues = sorted(cues, key=len, reverse=True)
    words = [t.surface.lower() for t in tokens]
    semicolons = [i for i, w in enumerate(words) if w == ";"]

    root = SpecNode()
    path = [root]  # root .. current
    enum_parent = None  # index into path of the node owning the open enumeration
    i = 0
    while i < len(tokens):
        w = words[i]
        cue = _match_cue(words, i, cues)
        if cue:
            if cue in _ROOT_CUES:
                del path[1:]
                enum_parent = None
            node = SpecNode(relation=Relation.SPECIALIZATION)
            path[-1].children.append(node)
            path.append(node)
            node.tokens.extend(tokens[i : i + len(cue)])
            i += len(cue)
            continue
        if w == ":" and any(s > i for s in semicolons):
            path[-1].tokens.append(tokens[i])
            enum_parent = len(path) - 1
            item = SpecNode(relation=Relation.AGGREGATION)
            path[-1].children.append(item)
            path.append(item)
            i += 1
            continue
        if w == ";" and enum_parent is not None:
            del path[enum_parent + 1 :]
            owner = path[-1]
            owner.tokens.append(tokens[i])
            i += 1
            while i < len(tokens) and words[i] in _LIST_JOINERS:
                owner.tokens.append(tokens[i])
                i += 1
            if i < len(tokens):
                item = SpecNode(relation=Relation.AGGREGATION)
                owner.children.append(item)
                path.append(item)
            continue
        path[-1].tokens.append(tokens[i])
        i += 1
    return _finalize(root)


# ---------------------------------------------------------------------------
# occurrence profiles

_ALPHA = re.compile(r"^[a-z]+$")


def is_candidate(word, stopwords):
    return len(word) >= 2 and bool(_ALPHA.match(word)) and word not in stopwords


@dataclass(frozen=True, order=True)
class Occurrence:
    claim: int
    nd: int
    nh: int
    cd: int

    @property
    def triple(self):
        return (self.nd, self.nh, self.cd)


@dataclass
class OccurrenceProfile:
    """Per word: node occurrences, token counts and first-appearance order."""

    occurrences: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    first_seen: dict = field(default_factory=dict)

    def P(self, word):
        return {o.triple for o in self.occurrences.get(word, ())}

    def words(self):
        return sorted(self.occurrences, key=lambda w: self.first_seen[w])

    def __contains__(self, word):
        return word in self.occurrences


def word_occurrences(claim_trees, stopwords=frozenset()):
    """Build the profile from ``(claim number, SpecNode, claim depth)`` triples.

    Claims are visited in the given order and tokens in text order, which
    fixes the first-appearance ordinal used for tie-breaking.
    """
    prof = OccurrenceProfile()
    ordinal = 0
    for claim_no, root, cd in claim_trees:
        owner = {}
        for node in root.iter_nodes():
            for t in node.tokens:
                owner[t.index] = (node, t)
        for idx in sorted(owner):
            node, tok = owner[idx]
            w = tok.surface.lower()
            if not is_candidate(w, stopwords):
                continue
            prof.occurrences.setdefault(w, set()).add(Occurrence(claim_no, node.depth, node.height, cd))
            prof.counts[w] = prof.counts.get(w, 0) + 1
            if w not in prof.first_seen:
                prof.first_seen[w] = ordinal
                ordinal += 1
    return prof
