"""Regenerate the bundled Monte Carlo reference table for Sigma2, gamma1 and gamma2.

The default settings reproduce src/primechaos/data/rmt_reference.csv. Expect
tens of minutes on one core.
"""

import argparse
import sys

from primechaos.rmt_mc import DEFAULT_SEED, reference_csv, tabulate_reference


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--dim", type=int, default=500)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("-o", "--output", default="rmt_reference.csv")
    args = ap.parse_args()

    rows = tabulate_reference(args.seed, args.dim, args.samples, workers=args.workers)
    with open(args.output, "w") as fh:
        fh.write(reference_csv(rows, args.seed, args.dim, args.samples))
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
