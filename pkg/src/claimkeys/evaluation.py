"""Recall and PRES, first-hit rank statistics, significance tests, reports."""

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_KS",
    "recall_at_k",
    "found_ranks",
    "pres_rank_sum",
    "pres_from_ranks",
    "pres_at_k",
    "legacy_rank_sum",
    "pres_legacy_sum",
    "FirstHitReport",
    "first_hit_rank",
    "first_hit_stats",
    "first_hit_comparison",
    "paired_t_test",
    "randomization_test",
    "randomization_test_exact",
    "RunMetrics",
    "evaluate_run",
    "leaderboard",
    "write_leaderboard_csv",
    "rank_label",
    "domain_heatmap",
    "write_heatmap_csv",
]

DEFAULT_KS = (10, 50, 100, 500, 1000)


def _doc_ids(result):
    return result.doc_ids if hasattr(result, "doc_ids") else list(result)


def recall_at_k(result, relevant, k):
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise ValueError("topic has no relevant documents")
    top = set(_doc_ids(result)[:k])
    return len(top & set(relevant)) / len(relevant)


def found_ranks(result, relevant):
    """1-based ranks of the relevant documents present anywhere in ``result``."""
    relevant = set(relevant)
    return [i for i, d in enumerate(_doc_ids(result), 1) if d in relevant]


def pres_rank_sum(ranks, n, nmax):
    """Sum of ranks with missing documents placed at nmax+n, nmax+n-1, ..."""
    within = sorted(r for r in ranks if r <= nmax)
    n_r = len(within)
    if n_r > n:
        raise ValueError("more found ranks than relevant documents")
    missing = sum(nmax + n - (i - n_r - 1) for i in range(n_r + 1, n + 1))
    return sum(within) + missing


def pres_from_ranks(ranks, n, nmax):
    if n < 1 or nmax < 1:
        raise ValueError("n and nmax must be >= 1")
    return 1.0 - (pres_rank_sum(ranks, n, nmax) / n - (n + 1) / 2) / nmax


def pres_at_k(result, relevant, nmax):
    if not relevant:
        raise ValueError("topic has no relevant documents")
    return pres_from_ranks(found_ranks(result, relevant), len(relevant), nmax)


def legacy_rank_sum(ranks, n, nmax):
    """Uncorrected sum of ranks, kept to document its defect."""
    within = [r for r in ranks if r <= nmax]
    n_r = len(within)
    return sum(within) + n_r * (nmax + n) - n_r * (n_r - 1) / 2


def pres_legacy_sum(ranks, n, nmax):
    return 1.0 - (legacy_rank_sum(ranks, n, nmax) / n - (n + 1) / 2) / nmax


# ---------------------------------------------------------------------------
# first hit


def first_hit_rank(result, relevant):
    ranks = found_ranks(result, relevant)
    return ranks[0] if ranks else None


@dataclass
class FirstHitReport:
    ranks: dict
    bins: list = field(default_factory=list)  # (low, high_exclusive, count)
    cumulative: list = field(default_factory=list)  # percentages
    median: float = None
    p80: float = None

    @property
    def n_topics(self):
        return len(self.ranks)


def _percentile(values, q):
    return float(np.percentile(np.asarray(values), q, method="higher"))


def _report(ranks, bin_width, cap):
    if not ranks:
        logger.warning("no eligible topics for first-hit statistics")
        return FirstHitReport({})
    n_bins = cap // bin_width + 1
    counts = [0] * n_bins
    for r in ranks.values():
        counts[min(r, cap) // bin_width] += 1
    total = len(ranks)
    bins = [(max(1, i * bin_width), (i + 1) * bin_width, c) for i, c in enumerate(counts)]
    cumulative = list(100.0 * np.cumsum(counts) / total)
    values = sorted(ranks.values())
    return FirstHitReport(dict(ranks), bins, cumulative, _percentile(values, 50), _percentile(values, 80))


def first_hit_stats(results, relevant, bin_width=10, cap=1000):
    """Histogram and percentiles of first-hit ranks over topics with at least one hit.

    ``results`` maps topic -> RunResult; ``relevant`` maps topic -> set.
    """
    ranks = {}
    for topic, res in sorted(results.items()):
        rel = relevant.get(topic)
        if not rel:
            continue
        r = first_hit_rank(res, rel)
        if r is not None and r <= cap:
            ranks[topic] = r
    return _report(ranks, bin_width, cap)


def first_hit_comparison(results_a, results_b, relevant, bin_width=10, cap=1000):
    """Both runs' reports restricted to topics where each run found a relevant document."""
    a = first_hit_stats(results_a, relevant, bin_width, cap)
    b = first_hit_stats(results_b, relevant, bin_width, cap)
    shared = sorted(set(a.ranks) & set(b.ranks))
    return (
        _report({t: a.ranks[t] for t in shared}, bin_width, cap),
        _report({t: b.ranks[t] for t in shared}, bin_width, cap),
    )


# ---------------------------------------------------------------------------
# significance


def _differences(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired vectors must be 1-D and of equal length")
    if len(a) < 2:
        raise ValueError("need at least 2 paired observations")
    return a - b


def paired_t_test(a, b):
    """Two-sided paired t-test; returns ``(t, p)``.

    With zero variance of the differences, p is 1.0 for a zero mean
    difference and 0.0 otherwise.
    """
    d = _differences(a, b)
    n = len(d)
    mean = d.mean()
    sd = d.std(ddof=1)
    # differences equal up to round-off count as zero variance
    if not np.isfinite(sd) or sd <= 1e-12 * max(1.0, abs(mean)):
        logger.debug("paired differences have zero variance")
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * stats.t.sf(abs(t), df=n - 1)
    return float(t), float(min(p, 1.0))


_BATCH = 10000


def randomization_test(a, b, permutations=100000, seed=0):
    """Two-sided sign-flip permutation test on paired differences.

    p = (1 + #{|permuted mean| >= |observed mean|}) / (1 + permutations).
    Each batch of sign patterns draws from its own child seed, so the
    result does not depend on how batches are scheduled.
    """
    d = _differences(a, b)
    observed = abs(d.mean())
    tol = 1e-12 * max(1.0, observed)
    children = np.random.SeedSequence(seed).spawn(math.ceil(permutations / _BATCH))
    hits = 0
    remaining = permutations
    for child in children:
        size = min(_BATCH, remaining)
        remaining -= size
        rng = np.random.default_rng(child)
        signs = rng.integers(0, 2, size=(size, len(d)), dtype=np.int8) * 2 - 1
        means = np.abs(signs @ d) / len(d)
        hits += int(np.count_nonzero(means >= observed - tol))
    return (hits + 1) / (permutations + 1)


def randomization_test_exact(a, b):
    """Exact two-sided sign-flip p-value by enumerating all 2**n sign patterns."""
    d = _differences(a, b)
    if len(d) > 20:
        raise ValueError("exact enumeration limited to n <= 20")
    observed = abs(d.mean())
    tol = 1e-12 * max(1.0, observed)
    hits = 0
    for signs in itertools.product((-1.0, 1.0), repeat=len(d)):
        if abs(np.dot(signs, d)) / len(d) >= observed - tol:
            hits += 1
    return hits / 2 ** len(d)


# ---------------------------------------------------------------------------
# run evaluation and reports


@dataclass
class RunMetrics:
    run: str
    topics: list
    recall: dict  # k -> np.ndarray aligned with topics
    pres: dict
    first_hits: dict = field(default_factory=dict)

    def metric(self, name):
        return {"recall": self.recall, "pres": self.pres}[name]


def evaluate_run(run, results, relevant, ks=DEFAULT_KS):
    """Per-topic Recall@K and PRES@K over judged topics.

    ``results`` maps topic -> RunResult. Topics without relevant documents
    are skipped; judged topics without a result count as empty rankings.
    """
    topics = sorted(t for t, rel in relevant.items() if rel)
    missing = [t for t in topics if t not in results]
    if missing:
        logger.warning("run %s has no results for %d judged topics", run, len(missing))
    recall = {k: np.zeros(len(topics)) for k in ks}
    pres = {k: np.zeros(len(topics)) for k in ks}
    first = {}
    for i, t in enumerate(topics):
        res = results.get(t)
        ids = res.doc_ids if res is not None else []
        ranks = found_ranks(ids, relevant[t])
        for k in ks:
            recall[k][i] = sum(1 for r in ranks if r <= k) / len(relevant[t])
            pres[k][i] = pres_from_ranks(ranks, len(relevant[t]), k)
        if ranks:
            first[t] = ranks[0]
    return RunMetrics(run, topics, recall, pres, first)


SIGNIFICANT_BETTER = "BETTER"
SIGNIFICANT_WORSE = "WORSE"
NOT_SIGNIFICANT = "NOT_SIGNIFICANT"


def leaderboard(reports, reference, metric="pres", level=0.05, permutations=100000, seed=0):
    """Rows ``(run, metric, K, mean, t_p, rand_p, flag)`` for every run and K.

    Significance is judged on the t-test p-value; the randomization
    p-value is reported alongside. With a single run the test columns are None.
    """
    by_name = {r.run: r for r in reports}
    if reference not in by_name:
        raise KeyError(f"reference run {reference!r} not evaluated")
    ref = by_name[reference]
    for r in reports:
        if r.topics != ref.topics:
            missing = sorted(set(ref.topics) ^ set(r.topics))
            raise ValueError(f"run {r.run} and {reference} differ on topics: {missing}")
    rows = []
    single = len(reports) == 1
    for r in reports:
        values = r.metric(metric)
        ref_values = ref.metric(metric)
        for k in sorted(values):
            mean = float(np.mean(values[k])) if len(values[k]) else 0.0
            if single:
                rows.append((r.run, metric, k, mean, None, None, None))
                continue
            _, t_p = paired_t_test(values[k], ref_values[k])
            rand_p = randomization_test(values[k], ref_values[k], permutations, seed)
            if t_p < level:
                diff = mean - float(np.mean(ref_values[k]))
                flag = SIGNIFICANT_BETTER if diff > 0 else SIGNIFICANT_WORSE
            else:
                flag = NOT_SIGNIFICANT
            rows.append((r.run, metric, k, mean, t_p, rand_p, flag))
    return rows


def _fmt(v, digits=6):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{digits}f}"
    return str(v)


def write_leaderboard_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "metric", "K", "mean", "t_p", "rand_p", "flag"])
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def rank_label(rank):
    if rank is None:
        return "NONE"
    if rank <= 20:
        return "FIRST 20"
    if rank <= 100:
        return "FIRST 100"
    return "AFTER 100"


def domain_heatmap(reports, docs, value="pres", k=100):
    """Rows ``(run, domain, topic, value)`` grouped by CPC section letter.

    ``value="pres"`` gives PRES@k; ``value="rank"`` gives the first-hit
    range label. Topics without a CPC code fall under ``"?"``.
    """
    domain = {d.doc_id: d.domain for d in docs}
    rows = []
    for r in reports:
        cells = []
        for i, t in enumerate(r.topics):
            if value == "pres":
                v = float(r.pres[k][i])
            elif value == "rank":
                v = rank_label(r.first_hits.get(t))
            else:
                raise ValueError(f"unknown heatmap value {value!r}")
            cells.append((domain.get(t, "?"), t, v))
        cells.sort(key=lambda c: (c[0] == "?", c[0], c[1]))
        rows.extend((r.run, dom, t, v) for dom, t, v in cells)
    return rows


def write_heatmap_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "domain", "topic", "value"])
        for row in rows:
            w.writerow([_fmt(v) for v in row])
