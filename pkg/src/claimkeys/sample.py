"""Seeded synthetic claim corpora for demos and tests.

Documents are grouped into families sharing a technical vocabulary. One
member of each family is a topic; the other members are judged 'X'
(relevant) for it, and a document from another family of the same
domain is judged 'A'.
"""

import random
import re

import numpy as np

from .corpus import QrelSet, dump_document, make_document

__all__ = ["DOMAINS", "synthetic_corpus", "synthetic_pos_data", "write_sample"]

DOMAINS = {
    "A": ("A61K", "syringe plunger cannula reservoir valve dosage membrane capsule tablet catheter "
          "needle chamber piston seal filter pump implant coating polymer gel"),
    "B": ("B41J", "printhead nozzle resistor cartridge substrate roller carriage platen ink droplet "
          "heater channel manifold orifice actuator blade belt sheet tray guide"),
    "C": ("C07D", "compound catalyst solvent reagent precursor polymer monomer crystal salt "
          "ligand residue acid ester oxide alloy powder slurry emulsion coating binder"),
    "D": ("D06F", "drum fabric detergent tub agitator spindle yarn fiber filament loom bobbin "
          "nozzle dryer lint basket bearing motor pulley shaft hose"),
    "E": ("E04B", "beam girder panel bracket anchor slab column joist truss frame brace plate "
          "bolt rebar concrete mortar tile hinge door window"),
    "F": ("F02M", "injector piston cylinder valve turbine compressor manifold camshaft crankshaft "
          "nozzle chamber exhaust intake bearing seal rotor blade duct sensor"),
    "G": ("G06F", "processor memory register cache controller buffer interface bus signal clock "
          "encoder decoder module instruction pipeline scheduler display sensor circuit network"),
    "H": ("H01L", "transistor electrode substrate layer diode gate channel dielectric wafer "
          "contact trench capacitor junction emitter collector oxide structure semiconductor cathode anode"),
}

_ADJ = ("first second upper lower inner outer annular flexible rigid porous conductive thin "
        "elongated planar hollow lateral central adjustable removable transparent").split()
_PART = ("disposed mounted arranged coupled connected attached formed positioned located "
         "secured").split()
_PREP = ("between on in adjacent to within along around below above").split()
_VERB = ("control regulate support receive transmit hold guide deliver detect store").split()


_ARTICLE = re.compile(r"\b([Aa]) (?=[aeiou])")


def _pick(rng, seq):
    return seq[rng.randrange(len(seq))]


def _claims(rng, vocab):
    head = vocab[0]
    nouns = vocab[1:]
    n = lambda: _pick(rng, nouns)  # noqa: E731
    claims = [(
        1,
        f"A {head} ({rng.randint(10, 99)}) comprising: a {_pick(rng, _ADJ)} {n()}; "
        f"a {n()} {_pick(rng, _PART)} {_pick(rng, _PREP)} the {n()}; and a {n()} "
        f"configured to {_pick(rng, _VERB)} the {n()}, wherein the {n()} is {_pick(rng, _ADJ)}.",
    )]
    for num in range(2, rng.randint(3, 8) + 1):
        parent = rng.randint(1, num - 1)
        form = rng.randrange(4)
        if form == 0:
            text = (f"The {head} of claim {parent}, wherein the {n()} is {_pick(rng, _PART)} "
                    f"{_pick(rng, _PREP)} a {_pick(rng, _ADJ)} {n()}.")
        elif form == 1:
            text = (f"The {head} according to claim {parent}, wherein the {n()} comprises: "
                    f"a {n()}; and a {_pick(rng, _ADJ)} {n()} that {_pick(rng, _VERB)}s the {n()}.")
        elif form == 2:
            text = (f"The {head} according to any of the preceding claims, characterized in that "
                    f"the {n()} includes a {n()} such that the {n()} {_pick(rng, _VERB)}s the {n()}.")
        else:
            refs = f"claim {parent}" if parent == num - 1 else f"claims {parent} to {num - 1}"
            text = (f"The {head} of {refs}, further comprising a "
                    f"{_pick(rng, _ADJ)} {n()} {_pick(rng, _PART)} {_pick(rng, _PREP)} the {n()}.")
        claims.append((num, text))
    return [(num, _ARTICLE.sub(r"\1n ", text)) for num, text in claims]


def synthetic_corpus(n_docs=50, family_size=4, seed=0):
    """Return ``(docs, qrels)`` with ``n_docs`` documents in families of ``family_size``."""
    rng = random.Random(seed)
    letters = sorted(DOMAINS)
    docs = []
    families = []
    fam = 0
    while len(docs) < n_docs:
        letter = letters[fam % len(letters)]
        prefix, pool = DOMAINS[letter]
        pool = pool.split()
        core = rng.sample(pool, 8)
        members = []
        for _ in range(min(family_size, n_docs - len(docs))):
            vocab = core[:]
            # members share most of the family vocabulary, plus some domain noise
            for _ in range(2):
                vocab[rng.randrange(1, len(vocab))] = _pick(rng, pool)
            doc_id = f"EP-{1000000 + len(docs) * 7919 % 900000:07d}-A1"
            cpc = [f"{prefix}{rng.randint(1, 99)}/{rng.randint(0, 99):02d}"]
            if rng.random() < 0.3:
                other = DOMAINS[_pick(rng, letters)][0]
                cpc.append(f"{other}{rng.randint(1, 99)}/{rng.randint(0, 99):02d}")
            docs.append(make_document(doc_id, _claims(rng, vocab), "en", cpc))
            members.append(doc_id)
        families.append((letter, members))
        fam += 1

    qrels = QrelSet()
    for i, (letter, members) in enumerate(families):
        if len(members) < 2:
            continue
        topic = members[0]
        for d in members[1:]:
            qrels.add(topic, d, "X")
        same_domain = [m for j, (l2, ms) in enumerate(families) if l2 == letter and j != i for m in ms]
        if same_domain:
            qrels.add(topic, _pick(rng, same_domain), "A")
    return docs, qrels


def write_sample(corpus_path, qrels_path, n_docs=50, family_size=4, seed=0):
    docs, qrels = synthetic_corpus(n_docs, family_size, seed)
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(dump_document(d) + "\n")
    with open(qrels_path, "w", encoding="utf-8") as fh:
        fh.write(qrels.dumps())
    return docs, qrels


def synthetic_pos_data(n_samples=500, dimension=20, tags=("VBD", "JJ"), words_per_tag=10, noise=0.1, seed=0):
    """Linearly separable trigram samples: each tag owns a set of centre words
    whose embeddings cluster around a tag prototype; neighbours are shared noise.

    Returns ``(table, samples)``.
    """
    from .poscorrect import EmbeddingTable, TrigramSample

    rng = np.random.default_rng(seed)
    table = EmbeddingTable(dimension)
    prototypes = np.linalg.qr(rng.normal(size=(dimension, len(tags))))[0].T * 3.0
    centres = {}
    for k, tag in enumerate(tags):
        centres[tag] = [f"{tag.lower()}{i}" for i in range(words_per_tag)]
        for w in centres[tag]:
            table.add(w, prototypes[k] + noise * rng.normal(size=dimension))
    context = [f"ctx{i}" for i in range(30)]
    for w in context:
        table.add(w, noise * rng.normal(size=dimension))
    samples = []
    for i in range(n_samples):
        tag = tags[i % len(tags)]
        left, right = (context[j] for j in rng.integers(0, len(context), size=2))
        centre = centres[tag][rng.integers(0, words_per_tag)]
        samples.append(TrigramSample.build(left, centre, right, tag, table))
    return table, samples
