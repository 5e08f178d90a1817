"""Claim tokenization and ingestion of bracketed constituency parses.

Claims are never sentence-split: one claim is one token sequence. Parses
come from an external parser as Penn-style bracketed trees.
"""

import logging
import re
from dataclasses import dataclass, replace

logger = logging.getLogger(__name__)

__all__ = [
    "Token",
    "ParseTree",
    "PTBParseError",
    "tokenize_claim",
    "parse_ptb",
    "read_ptb_forest",
    "parse_ptb_forest",
    "check_forest",
    "pos_sequence",
    "to_bracketed",
    "dump_forest",
]

_TOKEN = re.compile(r"\w+(?:[-'/.]\w+)*|[^\w\s]")


@dataclass(frozen=True)
class Token:
    surface: str
    index: int
    pos: str = None


def tokenize_claim(text):
    """Split a whole claim into tokens (whitespace and punctuation).

    >>> [t.surface for t in tokenize_claim("An inkjet printhead (40) comprising:")]
    ['An', 'inkjet', 'printhead', '(', '40', ')', 'comprising', ':']
    """
    return [Token(m.group(), i) for i, m in enumerate(_TOKEN.finditer(text))]


@dataclass(frozen=True)
class ParseTree:
    """A constituent, or a terminal when ``index`` is set.

    Terminals carry the surface word as ``label`` and no children; the
    POS tag is the label of the terminal's parent.
    """

    label: str
    children: tuple = ()
    index: int = None

    @property
    def is_terminal(self):
        return self.index is not None

    @property
    def is_preterminal(self):
        return len(self.children) == 1 and self.children[0].is_terminal

    def leaves(self):
        if self.is_terminal:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def validate(self):
        for node in self.iter_nodes():
            if node.is_terminal and node.children:
                raise ValueError("terminal with children")
            if not node.is_terminal and not node.children:
                raise ValueError(f"non-terminal {node.label!r} without children")
        idx = [leaf.index for leaf in self.leaves()]
        if idx != list(range(len(idx))):
            raise ValueError("leaf indices are not 0..n-1 in order")

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


class PTBParseError(ValueError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at byte offset {offset}")


_PTB_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _byte_offset(text, char_offset):
    return len(text[:char_offset].encode("utf-8"))


def parse_ptb(text, base_offset=0):
    """Parse exactly one bracketed tree.

    Offsets in errors are UTF-8 byte offsets into ``text`` plus ``base_offset``.

    >>> to_bracketed(parse_ptb("(NP (DT a) (NN layer))"))
    '(NP (DT a) (NN layer))'
    """
    stack = []  # (label, children, open offset)
    root = None
    counter = 0
    pending_label = False
    for m in _PTB_TOKEN.finditer(text):
        tok = m.group()
        off = m.start()
        if root is not None:
            raise PTBParseError("trailing content after tree", base_offset + _byte_offset(text, off))
        if tok == "(":
            stack.append(["", [], off])
            pending_label = True
        elif tok == ")":
            if not stack:
                raise PTBParseError("unbalanced ')'", base_offset + _byte_offset(text, off))
            label, children, open_off = stack.pop()
            if not children:
                raise PTBParseError("empty constituent", base_offset + _byte_offset(text, open_off))
            node = ParseTree(label, tuple(children))
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
            pending_label = False
        else:
            if not stack:
                raise PTBParseError("token outside brackets", base_offset + _byte_offset(text, off))
            if pending_label:
                stack[-1][0] = tok
            else:
                stack[-1][1].append(ParseTree(tok, (), counter))
                counter += 1
            pending_label = False
    if stack:
        raise PTBParseError("unbalanced '('", base_offset + _byte_offset(text, stack[-1][2]))
    if root is None:
        raise PTBParseError("no tree found", base_offset + len(text.encode("utf-8")))
    # unwrap "( (S ...))" style roots
    while root.label == "" and len(root.children) == 1 and not root.children[0].is_terminal:
        root = root.children[0]
    return root


def to_bracketed(tree):
    if tree.is_terminal:
        return tree.label
    inner = " ".join(to_bracketed(c) for c in tree.children)
    return f"({tree.label} {inner})"


def pos_sequence(tree):
    """Left-to-right ``(surface, tag)`` pairs."""
    out = []

    def walk(node):
        for c in node.children:
            if c.is_terminal:
                out.append((c.label, node.label))
            else:
                walk(c)

    if tree.is_terminal:
        return [(tree.label, None)]
    walk(tree)
    return out


def retag(tree, new_tags):
    """Copy of ``tree`` with preterminal labels replaced by ``{token index: tag}``."""
    if tree.is_terminal:
        return tree
    if tree.is_preterminal and tree.children[0].index in new_tags:
        return replace(tree, label=new_tags[tree.children[0].index])
    return replace(tree, children=tuple(retag(c, new_tags) for c in tree.children))


_HEADER = re.compile(r"#doc\s+(\S+)\s+(\d+)\s*$")


def parse_ptb_forest(text):
    """Parse keyed records ``#doc <doc_id> <claim>`` followed by one tree each."""
    forest = {}
    lines = text.splitlines(keepends=True)
    key = None
    buf = []
    buf_offset = 0
    offset = 0

    def flush():
        body = "".join(buf)
        if key is None:
            if body.strip():
                raise PTBParseError("tree without '#doc' header", buf_offset)
            return
        if not body.strip():
            raise PTBParseError(f"missing tree for {key[0]} {key[1]}", buf_offset)
        tree = parse_ptb(body, buf_offset)
        tree.validate()
        if key in forest:
            logger.warning("duplicate parse for %s claim %d; keeping the last", *key)
        forest[key] = tree

    for line in lines:
        m = _HEADER.match(line.strip()) if line.lstrip().startswith("#doc") else None
        if m:
            flush()
            key = (m.group(1), int(m.group(2)))
            buf = []
            buf_offset = offset + len(line.encode("utf-8"))
        else:
            if not buf:
                buf_offset = offset
            buf.append(line)
        offset += len(line.encode("utf-8"))
    flush()
    return forest


def read_ptb_forest(path, docs=None):
    with open(path, encoding="utf-8") as fh:
        forest = parse_ptb_forest(fh.read())
    if docs is not None:
        check_forest(forest, docs)
    return forest


def check_forest(forest, docs):
    """Keys whose leaf count differs from the claim's token count (or are unknown)."""
    claims = {(d.doc_id, c.number): c for d in docs for c in d.claims}
    flagged = []
    for key, tree in sorted(forest.items()):
        claim = claims.get(key)
        if claim is None:
            logger.warning("parse for unknown claim %s %d", *key)
            flagged.append(key)
            continue
        n_leaves = len(tree.leaves())
        n_tokens = len(tokenize_claim(claim.text))
        if n_leaves != n_tokens:
            logger.warning("%s claim %d: %d leaves vs %d tokens", key[0], key[1], n_leaves, n_tokens)
            flagged.append(key)
    return flagged


def dump_forest(forest):
    return "".join(f"#doc {d} {n}\n{to_bracketed(t)}\n" for (d, n), t in sorted(forest.items()))
