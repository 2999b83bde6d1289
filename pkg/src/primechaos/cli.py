"""Command-line front end.

Subcommands compose through files: ``primes`` writes a prime list, ``unfold``
turns it into unfolded levels, ``stats`` measures one statistic, ``fit`` fits
rho1 to a number-variance curve. ``figure`` and ``table`` run whole pipelines.

Exit codes: 0 success, 1 user error, 2 numeric or integrity failure,
3 partial success.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path

from . import __version__
from .config import CONFIG_ENV, Config
from .errors import DomainError, IntegrityError, NumericError, ParseError, PrimeChaosError

EXIT_OK, EXIT_USER, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("primechaos")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# helpers


def _emit(text: str, out, header):
    body = "\n".join(header) + "\n" + text if header else text
    if out in (None, "-"):
        sys.stdout.write(body)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)


def _header(args, cfg, seed=None):
    from .reproduce import provenance

    return provenance(args.command_line, cfg, seed)


def _load_checkpoint(args, cfg):
    from .sieve import Checkpoint

    if not getattr(args, "checkpoint", None):
        return None
    # entries are verified when used
    return Checkpoint.load(args.checkpoint)


def _generated_primes(args, cfg):
    """Primes named by --first / --after on the command line, else None."""
    from .errors import LongRunError
    from .reproduce import AFTER_COUNT, DESK_MAX_K, parse_size
    from .sieve import first_n_primes, primes_after_index

    if getattr(args, "first", None) is not None:
        return first_n_primes(parse_size(args.first), cfg.segment_size, cfg.workers)
    if getattr(args, "after", None) is not None:
        k = 0 if args.after.strip() == "0" else parse_size(args.after)
        count = parse_size(args.count) if args.count is not None else AFTER_COUNT
        cp = _load_checkpoint(args, cfg)
        if k > DESK_MAX_K and cp is None and not args.allow_long_run:
            raise LongRunError(f"k = {k} is beyond desk scale; pass --checkpoint FILE or "
                               f"--allow-long-run")
        return primes_after_index(k, count, cp, cfg.segment_size, cfg.workers)
    return None


def _is_unfolded(text: str) -> bool:
    return any(line.startswith("# method=") for line in text.splitlines())


def _read_levels(args, cfg):
    """Unfolded levels from --first/--after, a prime file or an unfolded file."""
    from .sieve import PrimeSequence
    from .unfold import Method, UnfoldedSequence, unfold

    method = Method.parse(args.method or cfg.method)
    seq = _generated_primes(args, cfg)
    if seq is not None:
        return unfold(seq, method)
    if not args.input:
        raise DomainError("give an input file, --first N or --after K")
    path = Path(args.input)
    if not path.is_file():
        raise DomainError(f"input file not found: {path}")
    raw = path.read_bytes()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        return unfold(PrimeSequence.from_bytes(raw), method)
    if _is_unfolded(text):
        return UnfoldedSequence.from_text(text, path=str(path))
    return unfold(PrimeSequence.load(path), method)


def _grid(args, cfg):
    from .spectral import standard_grid

    return standard_grid(args.lmin if args.lmin is not None else cfg.l_min,
                         args.lmax if args.lmax is not None else cfg.l_max,
                         args.dl if args.dl is not None else cfg.dl)


# --------------------------------------------------------------------------
# subcommands


def cmd_primes(args, cfg):
    from .sieve import alternate

    seq = _generated_primes(args, cfg)
    if seq is None:
        raise DomainError("primes: give --first N or --after K")
    if args.alternate:
        seq = alternate(seq)
    if args.binary:
        if args.output in (None, "-"):
            raise DomainError("--binary needs --output FILE")
        seq.save(args.output, binary=True)
    else:
        _emit(seq.to_text(), args.output, _header(args, cfg))
    return EXIT_OK


def cmd_unfold(args, cfg):
    from .unfold import Method, rescale_unit_mean, unfold

    seq = _generated_primes(args, cfg)
    if seq is None:
        from .sieve import PrimeSequence

        if not args.input:
            raise DomainError("unfold: give a prime file, --first N or --after K")
        if not Path(args.input).is_file():
            raise DomainError(f"input file not found: {args.input}")
        seq = PrimeSequence.load(args.input)
    useq = unfold(seq, Method.parse(args.method or cfg.method))
    if args.rescale:
        useq = rescale_unit_mean(useq)
    _emit(useq.to_text(), args.output, _header(args, cfg))
    return EXIT_OK


def cmd_stats(args, cfg):
    from .spectral import Statistic, count_statistics, nnsd, saturation_scan

    useq = _read_levels(args, cfg)
    step = args.step if args.step is not None else cfg.window_step
    head = _header(args, cfg)
    if args.nnsd:
        hist = nnsd(useq, args.bin_width or cfg.bin_width, args.s_max or cfg.s_max)
        _emit(hist.to_csv(), args.output, head)
        return EXIT_OK
    if args.saturation is not None:
        curve, est = saturation_scan(useq, args.saturation, cfg.sat_points, step, cfg.sat_l_min)
        note = ("# saturation: none detected" if est is None else
                f"# l_saturation={est.l_saturation:.17g} plateau_value={est.plateau_value:.17g}")
        _emit(f"# statistic={curve.statistic.value}\n" + curve.to_csv(), args.output,
              head + [note])
        return EXIT_OK
    stat = Statistic.SIGMA2 if args.numvar else Statistic.GAMMA1 if args.skewness \
        else Statistic.GAMMA2
    curve = count_statistics(useq, _grid(args, cfg), step, (stat,))[stat]
    _emit(f"# statistic={stat.value}\n" + curve.to_csv(), args.output, head)
    return EXIT_OK


def cmd_curves(args, cfg):
    from .ensembles import Kind
    from .reproduce import pdf_reference_csv, reference_curve

    kind = Kind.parse(args.kind)
    rho1 = args.rho1
    if kind is Kind.BERRY_ROBNIK and rho1 is None:
        raise DomainError("berry_robnik curves need --rho1")
    head = _header(args, cfg)
    if args.statistic.lower() == "nnsd":
        _emit(pdf_reference_csv(kind, args.s_max or cfg.s_max, rho1), args.output, head)
        return EXIT_OK
    curve = reference_curve(kind, args.statistic, _grid(args, cfg), rho1)
    _emit(f"# statistic={curve.statistic.value}\n" + curve.to_csv(), args.output, head)
    return EXIT_OK


def cmd_fit(args, cfg):
    from .fitting import fit_rho1
    from .reproduce import fit_sequence
    from .spectral import StatisticCurve

    path = Path(args.input) if args.input else None
    if path is not None and path.is_file() and path.read_text().find("L,value,stderr") >= 0:
        curve = StatisticCurve.from_csv(path.read_text(), path=str(path))
    else:
        useq = _read_levels(args, cfg)
        _, curve = fit_sequence(useq, cfg.override(l_min=args.lmin, l_max=args.lmax, dl=args.dl))
    l_max = args.fit_lmax if args.fit_lmax is not None else cfg.fit_l_max
    fit = fit_rho1(curve, args.fit_lmin, l_max, weighted=args.weighted)
    _emit(fit.to_json() + "\n", args.output, None)
    return EXIT_OK


def cmd_figure(args, cfg):
    from .reproduce import run_figure

    cp = _load_checkpoint(args, cfg)
    result = run_figure(args.figure_id, cfg, args.outdir, args.command_line, cp,
                        args.allow_long_run)
    for p in result.paths:
        print(p)
    return EXIT_OK


def cmd_table(args, cfg):
    from .reproduce import parse_rows, run_table1, table_json

    rows = parse_rows(args.rows)
    cp = _load_checkpoint(args, cfg)
    results, skipped = run_table1(rows, cfg, cp, args.allow_long_run)
    _emit(table_json(results) + "\n", args.output, None)
    for r in results:
        pub = "n/a" if r["published_rho1"] is None else f"{r['published_rho1']:.6f}"
        print(f"{r['sequence_label']:<36} rho1={r['rho1']:.6f}  published={pub}", file=sys.stderr)
    for label in skipped:
        print(f"skipped {label}: needs --allow-long-run or --checkpoint", file=sys.stderr)
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_mc_tabulate(args, cfg):
    from .ensembles import Kind
    from .rmt_mc import REFERENCE_GRID, reference_csv, tabulate_reference

    seed = args.seed if args.seed is not None else cfg.seed
    kinds = [Kind.parse(k) for k in args.kinds.split(",")]
    step = args.step if args.step is not None else cfg.window_step
    rows = tabulate_reference(seed, args.dim, args.samples, REFERENCE_GRID, step, kinds,
                              cfg.workers)
    _emit(reference_csv(rows, seed, args.dim, args.samples, step), args.output, None)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _add_source(p, with_input=True):
    if with_input:
        p.add_argument("input", nargs="?", help="sequence file (text or binary)")
    p.add_argument("--first", metavar="N", help="use the first N primes")
    p.add_argument("--after", metavar="K", help="use primes after the K-th prime")
    p.add_argument("--count", metavar="N", help="how many primes after K (default 10^6)")
    p.add_argument("--checkpoint", metavar="FILE", help="pi(x) checkpoint file")
    p.add_argument("--allow-long-run", action="store_true",
                   help="permit sieving beyond desk scale")


def _add_grid(p):
    p.add_argument("--lmin", type=float)
    p.add_argument("--lmax", type=float)
    p.add_argument("--dl", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="primechaos", description="Spectral statistics of prime numbers.")
    parser.add_argument("--version", action="version", version=f"primechaos {__version__}")
    parser.add_argument("--config", metavar="FILE",
                        help=f"key = value config file (default: ${CONFIG_ENV})")
    parser.add_argument("--workers", type=int, help="worker threads")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("primes", help="generate primes")
    _add_source(p, with_input=False)
    p.add_argument("--alternate", action="store_true", help="keep every other prime")
    p.add_argument("--binary", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("unfold", help="unfold a prime sequence")
    _add_source(p)
    p.add_argument("--method", help="r, li or xlogx")
    p.add_argument("--rescale", action="store_true", help="rescale to unit mean spacing")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("stats", help="one spectral statistic of unfolded levels")
    _add_source(p)
    p.add_argument("--method", help="unfolding for prime input")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--nnsd", action="store_true")
    which.add_argument("--numvar", action="store_true")
    which.add_argument("--skewness", action="store_true")
    which.add_argument("--excess", action="store_true")
    which.add_argument("--saturation", type=float, metavar="LMAX",
                       help="number variance on a log grid up to LMAX, with plateau detection")
    _add_grid(p)
    p.add_argument("--step", type=float, help="window start spacing")
    p.add_argument("--bin-width", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("curves", help="reference curves")
    p.add_argument("--kind", required=True, help="poisson, goe, gue, gse or br")
    p.add_argument("--statistic", required=True, help="nnsd, sigma2, gamma1 or gamma2")
    p.add_argument("--rho1", type=float)
    _add_grid(p)
    p.add_argument("--s-max", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("fit", help="fit rho1 to a number-variance curve")
    _add_source(p)
    p.add_argument("--method", help="unfolding for prime input")
    _add_grid(p)
    p.add_argument("--fit-lmin", type=float, default=0.0)
    p.add_argument("--fit-lmax", type=float)
    p.add_argument("--weighted", action="store_true", help="1/stderr^2 weights")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("figure", help="data and reference CSVs for one figure panel")
    p.add_argument("figure_id")
    p.add_argument("--outdir", default=".")
    p.add_argument("--checkpoint", metavar="FILE")
    p.add_argument("--allow-long-run", action="store_true")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("table", help="fitted rho1 for table rows")
    p.add_argument("--rows", default="left,right",
                   help="left, right, all, or n=<size>,k=<index> tokens")
    p.add_argument("--checkpoint", metavar="FILE")
    p.add_argument("--allow-long-run", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("mc-tabulate", help="regenerate Monte Carlo reference curves")
    p.add_argument("--dim", type=int, default=500)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--kinds", default="goe,gue,gse")
    p.add_argument("--step", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mc_tabulate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USER
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    args.command_line = shlex.join(["primechaos"] + argv)
    try:
        cfg = Config.load(args.config).override(workers=args.workers, seed=args.seed)
        if cfg.workers < 1:
            raise DomainError("--workers must be >= 1")
        return args.func(args, cfg)
    except (NumericError, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ParseError, PrimeChaosError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
