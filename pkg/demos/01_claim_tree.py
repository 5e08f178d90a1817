"""Claim references and claim depth.

Dependent claims point at their parents ("The printhead of claim 1 ...").
Following those pointers up to an independent claim gives each claim a
depth, which later weights every word found in it.
"""

from claimkeys.cli import sample_paths
from claimkeys.corpus import extract_claim_refs, load_corpus, make_document

# A hand-written claim set with a range reference and a multi-parent claim.
doc = make_document(
    "EP-1221372-A2",
    [
        (1, "An inkjet printhead (40) comprising: nozzles (13); firing resistors (48); and fire pulse "
            "generator circuitry (100/200)."),
        (2, "The inkjet printhead of claim 1 wherein the fire pulses control ejection of ink drops."),
        (3, "The inkjet printhead of claim 2, wherein the nozzles are tapered."),
        (4, "The inkjet printhead of claims 1 to 3, further comprising a heater."),
    ],
    cpc_codes=["B41J2/05"],
)

print(f"{doc.doc_id} (domain {doc.domain})")
for claim in doc.claims:
    parents = ", ".join(map(str, sorted(claim.parent_refs))) or "-"
    print(f"  claim {claim.number}: parents {parents:8s} depth {claim.depth}")

# Claim 4 depends on 1, 2 and 3; its depth is the shortest way up, so 1.
assert doc.claim(4).depth == 1

# Open-ended references expand to every earlier claim.
text = "Method according to one or more of the preceding claims 25 to 36, characterized in that ..."
print("\nclaim 37 references", sorted(extract_claim_refs(text, 37)))
print("claim 5 'any preceding claim' ->", sorted(extract_claim_refs("The device of any preceding claim", 5)))

corpus_path, _ = sample_paths()
docs = load_corpus(corpus_path)
depths = [c.depth for d in docs for c in d.claims]
print(f"\nbundled sample: {len(docs)} documents, {len(depths)} claims, max claim depth {max(depths)}")
