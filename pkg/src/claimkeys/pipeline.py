"""Batch pipeline: extract -> index -> search -> eval, plus stats and POS training.

Every stage reads its inputs from the configured paths or from the
output directory of the previous stage, and writes deterministic files.
"""

import configparser
import csv
import dataclasses
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from . import __version__
from .corpus import corpus_stats, load_corpus, load_qrels
from .evaluation import (
    domain_heatmap,
    evaluate_run,
    first_hit_comparison,
    first_hit_stats,
    leaderboard,
    write_heatmap_csv,
    write_leaderboard_csv,
)
from .parse import check_forest, read_ptb_forest, retag, tokenize_claim
from .poscorrect import LinearPosClassifier, correct_tags, load_embeddings, load_training_data, train
from .porter import porter_stem
from .scoring import DEFAULT_STOPWORDS, Keyword, ScoringParams, aggregate_stems, extract_keywords, read_keywords_csv, write_keywords_csv
from .search import (
    Analyzer,
    Field,
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
from .spectree import build_spec_tree_from_cues, build_spec_tree_from_parse, word_occurrences

logger = logging.getLogger(__name__)

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "load_config",
    "extract_document",
    "cmd_extract",
    "cmd_train_pos",
    "cmd_index",
    "cmd_search",
    "cmd_eval",
    "cmd_stats",
    "cmd_all",
]

FAILURE_THRESHOLD = 0.10
RUNTIME_KEYS = ("output", "workers")


class PipelineError(RuntimeError):
    pass


def _split_list(value, cast=str):
    if isinstance(value, (list, tuple)):
        return tuple(cast(v) for v in value)
    return tuple(cast(v.strip()) for v in str(value).split(",") if v.strip())


def _bool(value):
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _opt_float(value):
    return None if value in (None, "", "none") else float(value)


@dataclass(frozen=True)
class PipelineConfig:
    """Experiment manifest. Paths are relative to the working directory."""

    corpus: str = None
    qrels: str = None
    parses: str = None
    embeddings: str = None
    pos_training: str = None
    stopwords: str = None
    variants: tuple = ("juju05", "juju06")
    alpha: float = None
    beta: float = None
    n_keywords: int = 100
    boost: bool = True
    field: str = "claims"
    ks: tuple = (10, 50, 100, 500, 1000)
    reference: str = "mlt"
    output: str = "out"
    seed: int = 0
    limit: int = 1000
    mlt_max_terms: int = 25
    permutations: int = 100000
    workers: int = 1
    strict: bool = False

    _CASTS = {
        "variants": _split_list,
        "alpha": _opt_float,
        "beta": _opt_float,
        "n_keywords": int,
        "boost": _bool,
        "ks": lambda v: _split_list(v, int),
        "seed": int,
        "limit": int,
        "mlt_max_terms": int,
        "permutations": int,
        "workers": int,
        "strict": _bool,
    }

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            cast = self._CASTS.get(f.name)
            if cast and v is not None:
                object.__setattr__(self, f.name, cast(v))
        if self.n_keywords < 1:
            raise ValueError("n_keywords must be >= 1")
        if not self.ks:
            raise ValueError("ks must not be empty")
        for v in self.variants:
            ScoringParams(v)
        Field(self.field)

    def override(self, **values):
        return dataclasses.replace(self, **{k: v for k, v in values.items() if v is not None})

    def scoring_params(self):
        return [ScoringParams(v, self.alpha, self.beta) for v in self.variants]

    def to_dict(self):
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}

    def stopword_set(self):
        """The default list, an empty list for ``none``, or one word per line from a file."""
        if self.stopwords is None:
            return DEFAULT_STOPWORDS
        if self.stopwords.strip().lower() == "none":
            return frozenset()
        with open(_require(self.stopwords, "stopword list"), encoding="utf-8") as fh:
            return frozenset(w.strip().lower() for w in fh if w.strip() and not w.startswith("#"))

    def path(self, *parts):
        return os.path.join(self.output, *parts)


CONFIG_KEYS = [f.name for f in fields(PipelineConfig)]


def load_config(path):
    """Read the ``[pipeline]`` section of an INI-style file."""
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    if not parser.has_section("pipeline"):
        raise ValueError(f"{path}: missing [pipeline] section")
    values = dict(parser.items("pipeline"))
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError(f"{path}: unknown keys {unknown}")
    return PipelineConfig(**values)


def _require(path, what):
    if not path:
        raise PipelineError(f"{what} is not configured")
    if not os.path.exists(path):
        raise PipelineError(f"missing {what}: {path}")
    return path


def _write_manifest(config, stage):
    os.makedirs(config.output, exist_ok=True)
    path = config.path("manifest.json")
    manifest = {}
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    manifest["version"] = __version__
    manifest["seed"] = config.seed
    # runtime-only settings do not change any output, so they stay out
    manifest["config"] = {k: v for k, v in config.to_dict().items() if k not in RUNTIME_KEYS}
    manifest.setdefault("stages", [])
    if stage not in manifest["stages"]:
        manifest["stages"].append(stage)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_docs(config):
    return load_corpus(_require(config.corpus, "corpus"), strict=config.strict)


def _map(func, items, workers):
    if workers <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (workers * 4))))


# ---------------------------------------------------------------------------
# extract


def extract_document(doc, params, n, forest=None, classifier=None, table=None, stopwords=DEFAULT_STOPWORDS):
    """Keywords of one document for every scoring variant in ``params``."""
    forest = forest or {}
    claim_trees = []
    for claim in doc.claims:
        tree = forest.get((doc.doc_id, claim.number))
        if tree is not None:
            if classifier is not None and table is not None:
                fixes = correct_tags(tree, classifier, table)
                tree = retag(tree, {i: new for i, _, new in fixes})
            root = build_spec_tree_from_parse(tree)
        else:
            root = build_spec_tree_from_cues(tokenize_claim(claim.text))
        claim_trees.append((claim.number, root, claim.depth))
    records = aggregate_stems(word_occurrences(claim_trees, stopwords))
    return {p.variant.value: extract_keywords(records, p, n) for p in params}


class _Extractor:
    def __init__(self, params, n, forest, classifier, table, stopwords):
        self.params = params
        self.stopwords = stopwords
        self.n = n
        self.forest = forest
        self.classifier = classifier
        self.table = table

    def __call__(self, doc):
        try:
            return doc.doc_id, extract_document(doc, self.params, self.n, self.forest, self.classifier,
                                                self.table, self.stopwords), None
        except Exception as e:  # per-document failures are reported, not fatal
            return doc.doc_id, None, f"{type(e).__name__}: {e}"


def _load_classifier(config):
    if not config.embeddings:
        return None, None
    table = load_embeddings(_require(config.embeddings, "embeddings"))
    model_path = config.path("pos_model.npz")
    if os.path.exists(model_path):
        clf = LinearPosClassifier.load(model_path)
    elif config.pos_training:
        clf, _, _ = cmd_train_pos(config)
    else:
        logger.warning("embeddings configured without a POS model or training data; skipping correction")
        return None, None
    if clf.n_features != 3 * table.dimension:
        raise PipelineError("POS model does not match the embedding dimension")
    return clf, table


def cmd_extract(config):
    docs = _load_docs(config)
    forest = {}
    if config.parses:
        forest = read_ptb_forest(_require(config.parses, "parse forest"))
        for key in check_forest(forest, docs):
            forest.pop(key, None)
    else:
        logger.info("no parse forest configured; using the cue-based builder")
    classifier, table = _load_classifier(config)
    params = config.scoring_params()
    worker = _Extractor(params, config.n_keywords, forest, classifier, table, config.stopword_set())
    results = _map(worker, docs, config.workers)

    failures = []
    for p in params:
        os.makedirs(config.path("keywords", p.variant.value), exist_ok=True)
    for doc_id, kws, err in results:
        if err is not None:
            logger.error("%s: extraction failed: %s", doc_id, err)
            failures.append(doc_id)
            continue
        for variant, kl in kws.items():
            write_keywords_csv(config.path("keywords", variant, f"{doc_id}.csv"), doc_id, kl)
    _write_manifest(config, "extract")
    if docs and len(failures) / len(docs) > FAILURE_THRESHOLD:
        raise PipelineError(f"{len(failures)} of {len(docs)} documents failed extraction")
    return results


def cmd_train_pos(config):
    table = load_embeddings(_require(config.embeddings, "embeddings"))
    samples = load_training_data(_require(config.pos_training, "POS training data"), table)
    clf, train_acc, test_acc = train(samples, seed=config.seed)
    os.makedirs(config.output, exist_ok=True)
    clf.save(config.path("pos_model.npz"))
    with open(config.path("pos_model.json"), "w", encoding="utf-8") as fh:
        json.dump({"seed": config.seed, "classes": clf.classes, "train_accuracy": train_acc,
                   "test_accuracy": test_acc, "samples": len(samples)}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(config, "train-pos")
    logger.info("POS classifier: train accuracy %.4f, test accuracy %.4f", train_acc, test_acc)
    return clf, train_acc, test_acc


# ---------------------------------------------------------------------------
# index / search


def cmd_index(config):
    docs = _load_docs(config)
    index = build_index(docs, Field(config.field), Analyzer(config.stopword_set()))
    os.makedirs(config.output, exist_ok=True)
    save_index(index, config.path("index.json"))
    _write_manifest(config, "index")
    return index


def _topics(config, docs):
    if config.qrels:
        qrels = load_qrels(_require(config.qrels, "qrels"))
        known = {d.doc_id for d in docs}
        topics = [t for t in qrels.topics() if t in known]
        missing = [t for t in qrels.topics() if t not in known]
        if missing:
            logger.warning("%d judged topics are not in the corpus", len(missing))
        return topics
    return sorted(d.doc_id for d in docs)


def _keyword_list(config, variant, doc_id):
    path = config.path("keywords", variant, f"{doc_id}.csv")
    if not os.path.exists(path):
        raise PipelineError(f"missing keyword file {path}; run extract first")
    return [Keyword(word, porter_stem(word), score) for _, _, word, score in read_keywords_csv(path)]


class _Searcher:
    def __init__(self, config, index, docs):
        self.config = config
        self.index = index
        self.docs = docs
        self.analyzer = Analyzer(config.stopword_set())

    def queries(self, topic):
        c = self.config
        out = []
        for variant in c.variants:
            kws = _keyword_list(c, variant, topic)
            out.append((variant, keywords_query(kws, False, c.limit)))
            if c.boost:
                out.append((f"{variant}-boost", keywords_query(kws, True, c.limit)))
        doc = self.docs[topic]
        out.append(("tfidf", tfidf_keyword_baseline(self.index, doc, c.n_keywords, self.analyzer, c.limit)))
        out.append(("mlt", mlt_baseline(self.index, doc.text, c.mlt_max_terms, self.analyzer, c.limit)))
        return out

    def __call__(self, topic):
        return [execute_query(self.index, q, topic, run) for run, q in self.queries(topic)]


def cmd_search(config):
    docs = _load_docs(config)
    index_path = _require(config.path("index.json"), "index snapshot")
    index = load_index(index_path)
    topics = _topics(config, docs)
    searcher = _Searcher(config, index, {d.doc_id: d for d in docs})
    per_topic = _map(searcher, topics, config.workers)
    runs = {}
    for results in per_topic:
        for res in results:
            runs.setdefault(res.run, []).append(res)
    os.makedirs(config.path("runs"), exist_ok=True)
    for run, results in sorted(runs.items()):
        write_run_file(results, config.path("runs", f"{run}.txt"))
    _write_manifest(config, "search")
    return runs


# ---------------------------------------------------------------------------
# eval


def _read_runs(config):
    run_dir = config.path("runs")
    if not os.path.isdir(run_dir):
        raise PipelineError(f"missing run directory {run_dir}; run search first")
    runs = {}
    for name in sorted(os.listdir(run_dir)):
        if not name.endswith(".txt"):
            continue
        run = name[: -len(".txt")]
        runs[run] = {r.topic: r for r in read_run_file(os.path.join(run_dir, name))}
    if not runs:
        raise PipelineError(f"no run files in {run_dir}")
    return runs


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_eval(config):
    docs = _load_docs(config)
    qrels = load_qrels(_require(config.qrels, "qrels"))
    known = {d.doc_id for d in docs}
    relevant = {t: qrels[t] for t in qrels.topics() if t in known}
    runs = _read_runs(config)
    reports = [evaluate_run(name, results, relevant, config.ks) for name, results in sorted(runs.items())]
    reference = config.reference
    if reference not in runs:
        if len(runs) > 1:
            raise PipelineError(f"reference run {reference!r} not found among {sorted(runs)}")
        reference = next(iter(runs))

    out = config.path("eval")
    os.makedirs(out, exist_ok=True)
    rows = []
    for metric in ("recall", "pres"):
        rows.extend(leaderboard(reports, reference, metric, 0.05, config.permutations, config.seed))
    write_leaderboard_csv(os.path.join(out, "leaderboard.csv"), rows)

    k_heat = 100 if 100 in config.ks else max(config.ks)
    write_heatmap_csv(os.path.join(out, "heatmap_pres.csv"), domain_heatmap(reports, docs, "pres", k_heat))
    write_heatmap_csv(os.path.join(out, "heatmap_rank.csv"), domain_heatmap(reports, docs, "rank", k_heat))

    per_topic = []
    for r in reports:
        for i, t in enumerate(r.topics):
            for k in config.ks:
                per_topic.append([r.run, t, k, f"{r.recall[k][i]:.6f}", f"{r.pres[k][i]:.6f}"])
    _write_csv(os.path.join(out, "per_topic.csv"), ["run", "topic", "K", "recall", "pres"], per_topic)

    hist_rows = []
    summary_rows = []
    for name in sorted(runs):
        rep = first_hit_stats(runs[name], relevant)
        for (lo, hi, count), cum in zip(rep.bins, rep.cumulative):
            hist_rows.append([name, lo, hi, count, f"{cum:.4f}"])
        summary_rows.append([name, "all", rep.n_topics, _num(rep.median), _num(rep.p80)])
        if name != reference and len(runs) > 1:
            mine, ref = first_hit_comparison(runs[name], runs[reference], relevant)
            summary_rows.append([name, f"shared_with_{reference}", mine.n_topics, _num(mine.median), _num(mine.p80)])
            summary_rows.append([reference, f"shared_with_{name}", ref.n_topics, _num(ref.median), _num(ref.p80)])
    _write_csv(os.path.join(out, "first_hit.csv"), ["run", "bin_low", "bin_high", "count", "cumulative_pct"], hist_rows)
    _write_csv(os.path.join(out, "first_hit_summary.csv"), ["run", "scope", "topics", "median", "p80"], summary_rows)
    _write_manifest(config, "eval")
    return reports, rows


def _num(v):
    return "" if v is None else f"{v:g}"


# ---------------------------------------------------------------------------
# stats / all


def cmd_stats(config):
    docs = _load_docs(config)
    st = corpus_stats(docs)
    out = config.path("stats")
    os.makedirs(out, exist_ok=True)
    _write_csv(os.path.join(out, "sentence_lengths.csv"), ["length", "count"], sorted(st.sentence_length_histogram.items()))
    _write_csv(os.path.join(out, "flesch.csv"), ["sentence", "reading_ease"],
               [[i, f"{s:.6f}"] for i, s in enumerate(st.flesch_scores)])
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump({"claims": st.n_claims, "sentences": st.n_sentences, "empty_claims": st.empty_claims,
                   "claim_split_rate": st.claim_split_rate}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(config, "stats")
    return st


def cmd_all(config):
    if config.embeddings and config.pos_training:
        cmd_train_pos(config)
    cmd_extract(config)
    cmd_index(config)
    cmd_search(config)
    return cmd_eval(config)
