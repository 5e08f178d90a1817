"""Command-line entry point: ``claimkeys <subcommand> [options]``."""

import argparse
import logging
import sys
from importlib import resources

from . import pipeline
from .pipeline import CONFIG_KEYS, PipelineConfig, PipelineError

COMMANDS = {
    "extract": pipeline.cmd_extract,
    "train-pos": pipeline.cmd_train_pos,
    "index": pipeline.cmd_index,
    "search": pipeline.cmd_search,
    "eval": pipeline.cmd_eval,
    "stats": pipeline.cmd_stats,
    "all": pipeline.cmd_all,
}


def sample_paths():
    """Paths of the bundled sample corpus and qrels."""
    data = resources.files("claimkeys") / "data"
    return str(data / "sample_corpus.jsonl"), str(data / "sample_qrels.txt")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [pipeline] section")
    common.add_argument("--sample", action="store_true", help="use the bundled sample corpus and qrels")
    common.add_argument("--strict", action="store_true", default=None, help="abort on the first malformed input line")
    common.add_argument("--no-boost", dest="boost", action="store_false", default=None)
    common.add_argument("-v", "--verbose", action="store_true")
    for key in CONFIG_KEYS:
        if key in ("strict", "boost"):
            continue
        common.add_argument("--" + key.replace("_", "-"), dest=key, metavar=key.upper())

    parser = argparse.ArgumentParser(prog="claimkeys", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args):
    config = pipeline.load_config(args.config) if args.config else PipelineConfig()
    if args.sample:
        corpus, qrels = sample_paths()
        config = config.override(corpus=corpus, qrels=qrels)
    return config.override(**{k: getattr(args, k) for k in CONFIG_KEYS})


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        COMMANDS[args.command](config)
    except (PipelineError, ValueError, OSError) as e:
        print(f"claimkeys {args.command}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
