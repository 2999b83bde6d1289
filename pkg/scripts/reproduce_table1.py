"""Fit rho1 for the Table 1 sequences and compare with the published values.

    python3 scripts/reproduce_table1.py                 # desk-scale rows
    python3 scripts/reproduce_table1.py --rows all --checkpoint pi.tsv --allow-long-run
"""

import argparse
import json
import sys

from primechaos.config import Config
from primechaos.reproduce import parse_rows, run_table1
from primechaos.sieve import Checkpoint


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", default="left,right")
    ap.add_argument("--checkpoint")
    ap.add_argument("--allow-long-run", action="store_true")
    ap.add_argument("--json", help="also write the rows as JSON to this path")
    args = ap.parse_args()

    cp = Checkpoint.load(args.checkpoint) if args.checkpoint else None
    results, skipped = run_table1(parse_rows(args.rows), Config.load(), cp, args.allow_long_run)
    print(f"{'sequence':<40} {'rho1':>10} {'published':>10} {'diff':>8}")
    for r in results:
        d = r["rho1"] - r["published_rho1"]
        print(f"{r['sequence_label']:<40} {r['rho1']:>10.5f} {r['published_rho1']:>10.6f} {d:>+8.4f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 3 if skipped else 0


if __name__ == "__main__":
    sys.exit(main())
