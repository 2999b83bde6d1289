"""Write the CSV series for every desk-scale figure panel into one directory."""

import argparse
import shlex
import sys

from primechaos.config import Config
from primechaos.errors import LongRunError
from primechaos.reproduce import FIGURES, run_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--only", nargs="*", help="figure ids, e.g. 1a 5b 6")
    ap.add_argument("--allow-long-run", action="store_true")
    args = ap.parse_args()

    cfg = Config.load()
    command = shlex.join(["reproduce_figures.py"] + sys.argv[1:])
    for fig in args.only or FIGURES:
        try:
            res = run_figure(fig, cfg, args.outdir, command, allow_long_run=args.allow_long_run)
        except LongRunError as exc:
            print(f"{fig}: skipped ({exc})")
            continue
        print(f"{fig}: {len(res.paths)} files")
        for key, note in res.notes.items():
            print(f"    {key}: {note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
