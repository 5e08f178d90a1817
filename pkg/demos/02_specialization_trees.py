"""Specialization trees, from a constituency parse and from cue phrases.

Each claim is one long sentence. Its fragments nest: a fragment that
adds a technical detail becomes a SPECIALIZATION child, and items of an
enumeration become AGGREGATION siblings. Node depth (nd) and node height
(nh) feed the keyword scores.
"""

from claimkeys.parse import parse_ptb, pos_sequence, tokenize_claim
from claimkeys.spectree import (
    build_spec_tree_from_cues,
    build_spec_tree_from_parse,
    check_invariants,
    dump_spec_tree,
    word_occurrences,
)

fragment = parse_ptb(
    "(NP (NP (DT a) (NN carrier) (NN trap) (NN layer))"
    " (VP (VBN disposed) (PP (IN between) (NP (NP (DT the) (NN substrate)) (CC and)"
    " (NP (DT the) (NN luminescence) (NN structure))))))"
)
print("POS sequence:", " ".join(f"{w}/{t}" for w, t in pos_sequence(fragment)))
tree = build_spec_tree_from_parse(fragment)
check_invariants(tree, len(fragment.leaves()))
print("\nFrom the parse (participle and PP open details, 'and' splits the conjuncts):")
print(dump_spec_tree(tree))

# Without a parser the cue builder gives the same kind of tree.
claim37 = (
    "Method according to one or more of the preceding claims 25 to 36, characterized in that initial "
    "iteration steps for determining compensation dipoles can provide a modification for each subsequent "
    "iteration step consisting in a reduction of constraints such that the partial solution converges "
    "progressively towards a solution that is considered an optimum one."
)
tokens = tokenize_claim(claim37)
cue_tree = build_spec_tree_from_cues(tokens)
check_invariants(cue_tree, len(tokens))
print("From cue phrases:")
print(dump_spec_tree(cue_tree))

profile = word_occurrences([(37, cue_tree, 2)])
for word in ("method", "iteration", "converges"):
    print(f"P({word}) = {sorted(profile.P(word))}   # (nd, nh, cd)")
