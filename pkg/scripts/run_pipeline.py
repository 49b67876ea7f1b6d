#!/usr/bin/env python3
"""Run the full pipeline (analyze, topics --embed, compare) on one corpus.

Generates the demo corpus first when the input directory does not exist yet,
so `python3 scripts/run_pipeline.py /tmp/demo /tmp/out` works from a clean
checkout. Every stage goes through the public CLI entry point; the script
only sequences the calls and stops at the first nonzero exit code.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from scratchstats.cli import main as cli_main
from scratchstats.projectgen import build_demo_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", type=Path,
                        help="corpus directory of .sb2/.sb3 archives "
                             "(created with demo data when missing)")
    parser.add_argument("out", type=Path, help="output directory")
    parser.add_argument("--config", type=Path, default=None,
                        help="optional TOML configuration file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the run seed")
    args = parser.parse_args()

    if not args.input.is_dir():
        build_demo_corpus(args.input, seed=7)
        print(f"created demo corpus in {args.input}")

    base = ["--input", str(args.input), "--out", str(args.out)]
    metadata = args.input / "metadata.csv"
    if metadata.is_file():
        base += ["--metadata", str(metadata)]
    if args.config is not None:
        base += ["--config", str(args.config)]
    if args.seed is not None:
        base += ["--seed", str(args.seed)]

    stages = [
        ["analyze", *base],
        ["topics", *base, "--embed"],
        ["compare", "--out", str(args.out)]
        + (["--config", str(args.config)] if args.config is not None else []),
    ]
    for argv in stages:
        print(f"$ scratchstats {' '.join(argv)}")
        code = cli_main(argv)
        if code != 0:
            print(f"stage {argv[0]!r} failed with exit code {code}")
            return code

    print(f"done; report at {args.out / 'report.json'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
