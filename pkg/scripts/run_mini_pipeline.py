#!/usr/bin/env python3
"""Run the full pipeline on the bundled mini corpus and print the report.

Writes all artifacts to --out (default: ./mini_run). Handy for a quick
end-to-end smoke check after changes:

    python scripts/run_mini_pipeline.py --out /tmp/mini_run
"""
import argparse
import sys
from pathlib import Path

from termforge.cli import main as cli_main

REPO = Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="mini_run", help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    code = cli_main([
        "pipeline",
        "--corpus", str(REPO / "data" / "mini" / "corpus.conllu"),
        "--gold", str(REPO / "data" / "mini" / "gold.tsv"),
        "--out", args.out,
        "--sigma1", "2", "--sigma2", "0.5",
        "--k-min", "2", "--k-max", "10",
        "--reps", str(args.reps), "--seed", str(args.seed),
        "--nmf-rank", "10", "--w2v-dim", "32", "--w2v-epochs", "3",
    ])
    if code == 0:
        print((Path(args.out) / "report.csv").read_text(), end="")
        print(f"\nartifacts in {Path(args.out).resolve()}")
    return code


if __name__ == "__main__":
    sys.exit(main())
