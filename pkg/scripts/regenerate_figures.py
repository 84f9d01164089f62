#!/usr/bin/env python3
"""Regenerate every shipped figure from the configs/ directory.

Runs the command-line interface in-process so the outputs are identical
to what a shell invocation would produce.  Each run lands in its own
hash-named directory under --out.
"""

import argparse
import pathlib
import sys

from rotor_scatter.cli import main as cli_main

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

# config stem -> subcommand used for the shipped figure
RUNS = [
    ("fig2_d2", "sweep"),
    ("fig2_d6", "sweep"),
    ("fig2_d6", "compare"),
    ("fig3_n1", "sweep"),
    ("fig3_n2", "sweep"),
    ("fig3_n10", "sweep"),
    ("fig4", "compare"),
    ("minimal", "profile"),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results",
                        help="root directory for the run outputs")
    parser.add_argument("--format", default="csv,json,svg")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    for stem, subcommand in RUNS:
        config = CONFIG_DIR / f"{stem}.json"
        print(f"== {subcommand} {config.name}", flush=True)
        code = cli_main([subcommand, "--config", str(config),
                         "--out", args.out, "--format", args.format,
                         "--threads", str(args.threads)])
        if code != 0:
            print(f"{stem}: exit {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
