"""Searching with keywords and evaluating with Recall and PRES.

Runs the whole pipeline on the bundled sample: keyword extraction, a
BM25 index over claims, six query runs and the evaluation reports.
"""

import csv
import sys
import tempfile
from pathlib import Path

from claimkeys import pipeline
from claimkeys.cli import sample_paths
from claimkeys.evaluation import legacy_rank_sum, pres_from_ranks, pres_legacy_sum, pres_rank_sum

# The PRES worked example: 4 relevant documents, three found at 85, 87, 97, one at 625.
ranks = [85, 87, 97, 625]
print(f"corrected: sum of ranks {pres_rank_sum(ranks, 4, 100)}, PRES@100 = {pres_from_ranks(ranks, 4, 100):.4f}")
print(f"legacy:    sum of ranks {legacy_rank_sum(ranks, 4, 100):g}, PRES@100 = {pres_legacy_sum(ranks, 4, 100):.2f}")

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="claimkeys-"))
corpus, qrels = sample_paths()
config = pipeline.PipelineConfig(corpus=corpus, qrels=qrels, output=str(out), seed=0)
pipeline.cmd_all(config)
print(f"\noutputs in {out}")

with open(out / "eval" / "leaderboard.csv", newline="") as fh:
    rows = [r for r in csv.DictReader(fh) if r["metric"] == "pres" and r["K"] in ("10", "100")]
print(f"\n{'run':14s} {'K':>4s} {'PRES':>7s} {'t_p':>9s} {'rand_p':>9s}  flag")
for r in rows:
    print(f"{r['run']:14s} {r['K']:>4s} {float(r['mean']):7.4f} {r['t_p']:>9s} {r['rand_p']:>9s}  {r['flag']}")

with open(out / "eval" / "first_hit_summary.csv", newline="") as fh:
    print("\nfirst relevant hit:")
    for r in csv.DictReader(fh):
        if r["scope"] == "all":
            print(f"  {r['run']:14s} median rank {r['median']:>3s}, 80th percentile {r['p80']:>3s}")
