"""Figure and table pipelines: prime subsequences in, plot-ready CSV/JSON out."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import Config
from .ensembles import Kind, gamma_theory, reference_table, sigma2_br, sigma2_theory, spacing_pdf
from .errors import DomainError, LongRunError
from .fitting import BRFit, fit_rho1
from .sieve import Checkpoint, PrimeSequence, alternate, first_n_primes, primes_after_index
from .spectral import (
    SpacingHistogram, Statistic, StatisticCurve, count_statistics, nnsd, saturation_scan,
    standard_grid,
)
from .unfold import Method, UnfoldedSequence, rescale_unit_mean, unfold

log = logging.getLogger(__name__)

# (kind, size) per panel letter; "after" panels hold 10**6 primes after p_k
PANELS = {
    "a": ("first", 10**2),
    "b": ("first", 10**4),
    "c": ("first", 10**6),
    "d": ("after", 10**12),
}
AFTER_COUNT = 10**6
DESK_MAX_K = 10**8

TABLE1_PUBLISHED = {
    ("n", 10**2): -0.00181,
    ("n", 10**3): 0.239504,
    ("n", 10**4): 0.328879,
    ("n", 10**5): 0.430437,
    ("n", 10**6): 0.489928,
    ("k", 10**7): 0.555921,
    ("k", 10**8): 0.585383,
    ("k", 10**9): 0.61471,
    ("k", 10**10): 0.633034,
    ("k", 10**11): 0.652538,
    ("k", 10**12): 0.668721,
}
LEFT_ROWS = [key for key in TABLE1_PUBLISHED if key[0] == "n"]
RIGHT_ROWS = [key for key in TABLE1_PUBLISHED if key[0] == "k"]
FIGURES = [f"{f}{p}" for f in "12345" for p in "abcd"] + ["6"]


def provenance(command: str, cfg: Config, seed: Optional[int] = None, extra=()) -> list[str]:
    lines = [f"# primechaos {__version__}", f"# command: {command}", f"# config: {cfg.describe()}"]
    if seed is not None:
        lines.append(f"# seed: {seed}")
    lines += [f"# {item}" for item in extra]
    return lines


def write_csv(path: Path, header: list[str], body: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header) + "\n" + body)
    return path


def curve_csv(curve: StatisticCurve) -> str:
    return f"# statistic={curve.statistic.value}\n" + curve.to_csv()


def _pow10(x: int) -> str:
    e = round(math.log10(x))
    return f"10^{e}" if 10**e == x else str(x)


# --------------------------------------------------------------------------
# sequences


def prime_sequence(kind: str, size: int, cfg: Config, checkpoint: Optional[Checkpoint] = None,
                   allow_long_run: bool = False) -> PrimeSequence:
    """``("first", n)`` or ``("after", k)`` (10**6 primes after p_k)."""
    if kind == "first":
        return first_n_primes(size, cfg.segment_size, cfg.workers)
    if size > DESK_MAX_K and checkpoint is None and not allow_long_run:
        raise LongRunError(
            f"locating the {_pow10(size)}-th prime means sieving past {size * math.log(size):.2g}; "
            f"pass --checkpoint FILE or --allow-long-run")
    return primes_after_index(size, AFTER_COUNT, checkpoint, cfg.segment_size, cfg.workers)


def sequence_label(kind: str, size: int) -> str:
    if kind == "first":
        return f"first {_pow10(size)} primes"
    return f"first 10^6 primes after k={_pow10(size)}"


def unfolded(seq: PrimeSequence, cfg: Config) -> UnfoldedSequence:
    return unfold(seq, Method.parse(cfg.method))


def alternate_sequence(cfg: Config) -> UnfoldedSequence:
    """First 50 alternate primes, unfolded and rescaled to unit mean spacing."""
    seq = alternate(first_n_primes(100, cfg.segment_size, cfg.workers))
    return rescale_unit_mean(unfolded(seq, cfg))


def fit_sequence(useq: UnfoldedSequence, cfg: Config) -> tuple[BRFit, StatisticCurve]:
    grid = standard_grid(cfg.l_min, cfg.l_max, cfg.dl)
    curve = count_statistics(useq, grid, cfg.window_step, (Statistic.SIGMA2,))[Statistic.SIGMA2]
    return fit_rho1(curve, 0.0, cfg.fit_l_max), curve


# --------------------------------------------------------------------------
# reference curves


def pdf_reference_csv(kind, s_max: float, rho1=None) -> str:
    s = np.round(np.arange(0.0, s_max + 1e-9, 0.01), 12)
    dens = spacing_pdf(kind, s, rho1)
    return "s,density\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(s, dens))


def reference_curve(kind, statistic, L_grid, rho1=None) -> StatisticCurve:
    stat = Statistic.parse(statistic)
    tag = Kind.parse(kind)
    L_grid = np.asarray(L_grid, dtype=float)
    if stat is Statistic.SIGMA2:
        if tag is Kind.BERRY_ROBNIK:
            val = sigma2_br(L_grid, rho1)
        else:
            val = sigma2_theory(tag, L_grid)
        return StatisticCurve(stat, L_grid, val, np.zeros_like(L_grid), 0.0, 0)
    order = 1 if stat is Statistic.GAMMA1 else 2
    if tag is not Kind.POISSON:
        # Monte Carlo table nodes only
        table_L = reference_table()[(tag, stat.value.upper())][0]
        L_grid = table_L[(table_L >= L_grid.min() - 1e-12) & (table_L <= L_grid.max() + 1e-12)]
    val, err = gamma_theory(tag, L_grid, order)
    return StatisticCurve(stat, L_grid, val, err, 0.0, 0)


# --------------------------------------------------------------------------
# figures


@dataclass
class FigureResult:
    figure_id: str
    paths: list
    notes: dict


def _parse_figure(fig_id: str) -> tuple[int, Optional[str]]:
    fig_id = str(fig_id).strip().lower()
    if fig_id not in FIGURES:
        raise DomainError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    return int(fig_id[0]), (fig_id[1] if len(fig_id) > 1 else None)


def run_figure(fig_id: str, cfg: Config, outdir, command: str = "",
               checkpoint: Optional[Checkpoint] = None,
               allow_long_run: bool = False) -> FigureResult:
    """Write ``fig<id>_<series>.csv`` files for one panel."""
    number, panel = _parse_figure(fig_id)
    outdir = Path(outdir)
    fig_id = f"{number}{panel or ''}"
    head = provenance(command, cfg)
    paths, notes = [], {}
    grid = standard_grid(cfg.l_min, cfg.l_max, cfg.dl)

    def emit(series, body, extra=()):
        paths.append(write_csv(outdir / f"fig{fig_id}_{series}.csv",
                                head + [f"# {e}" for e in extra], body))

    if number == 6:
        for lo, hi in ((1, 10_000), (10_001, 20_000)):
            seq = primes_after_index(lo - 1, hi - lo + 1, None, cfg.segment_size, cfg.workers)
            useq = unfolded(seq, cfg)
            span = useq.values[-1] - useq.values[0]
            curve, est = saturation_scan(useq, cfg.sat_fraction * span, cfg.sat_points,
                                         cfg.window_step, cfg.sat_l_min)
            if est is None:
                sat = ["saturation: none detected"]
            else:
                sat = [f"l_saturation={est.l_saturation:.17g} plateau_value={est.plateau_value:.17g}"]
            notes[f"primes_{lo}_{hi}"] = est
            emit(f"primes_{lo}_{hi}", curve_csv(curve), [f"series=primes {lo}-{hi}"] + sat)
        return FigureResult(fig_id, paths, notes)

    if number == 5:
        useq = alternate_sequence(cfg)
        label = "first 50 alternate primes"
        if panel == "a":
            emit("nnsd", nnsd(useq, cfg.bin_width, cfg.s_max).to_csv(), [f"series={label}"])
            emit("gse", pdf_reference_csv(Kind.GSE, cfg.s_max), ["series=GSE Wigner surmise"])
        else:
            stat = {"b": Statistic.SIGMA2, "c": Statistic.GAMMA1, "d": Statistic.GAMMA2}[panel]
            curve = count_statistics(useq, grid, cfg.window_step, (stat,))[stat]
            emit(stat.value, curve_csv(curve), [f"series={label}"])
            emit("gse", curve_csv(reference_curve(Kind.GSE, stat, grid)), ["series=GSE"])
        return FigureResult(fig_id, paths, notes)

    kind, size = PANELS[panel]
    seq = prime_sequence(kind, size, cfg, checkpoint, allow_long_run)
    useq = unfolded(seq, cfg)
    label = [f"series={sequence_label(kind, size)}"]
    if number in (1, 2):
        fit, sig = fit_sequence(useq, cfg)
        notes["fit"] = fit
        br = [f"series=Berry-Robnik rho1={fit.rho1:.17g} (fit of number variance, "
              f"0 < L <= {cfg.fit_l_max:g})"]
        if number == 1:
            emit("nnsd", nnsd(useq, cfg.bin_width, cfg.s_max).to_csv(), label)
            for k in (Kind.POISSON, Kind.GOE):
                emit(k.value, pdf_reference_csv(k, cfg.s_max), [f"series={k.value}"])
            emit("berry_robnik", pdf_reference_csv(Kind.BERRY_ROBNIK, cfg.s_max, fit.rho1), br)
        else:
            emit("sigma2", curve_csv(sig), label)
            for k in (Kind.POISSON, Kind.GOE, Kind.GUE):
                emit(k.value, curve_csv(reference_curve(k, Statistic.SIGMA2, grid)),
                     [f"series={k.value}"])
            emit("berry_robnik",
                 curve_csv(reference_curve(Kind.BERRY_ROBNIK, Statistic.SIGMA2, grid, fit.rho1)), br)
    else:
        stat = Statistic.GAMMA1 if number == 3 else Statistic.GAMMA2
        curve = count_statistics(useq, grid, cfg.window_step, (stat,))[stat]
        emit(stat.value, curve_csv(curve), label)
        for k in (Kind.POISSON, Kind.GOE, Kind.GUE):
            ref = reference_curve(k, stat, grid)
            extra = [f"series={k.value}"]
            if k is not Kind.POISSON:
                extra.append(f"monte carlo: {' '.join(reference_table()['meta'][1:2])}")
            emit(k.value, curve_csv(ref), extra)
    return FigureResult(fig_id, paths, notes)


# --------------------------------------------------------------------------
# table


def parse_size(text: str) -> int:
    """``10000``, ``1e4``, ``10^4`` or ``10**4``."""
    t = str(text).strip().lower().replace("**", "^")
    try:
        if "^" in t:
            base, exp = t.split("^")
            size = int(base) ** int(exp)
        elif "e" in t:
            size = float(t)
            if size != int(size):
                raise ValueError
            size = int(size)
        else:
            size = int(t)
    except ValueError:
        raise DomainError(f"bad size {text!r}") from None
    if size < 1:
        raise DomainError(f"size must be positive, got {size}")
    return size


def parse_rows(text: str) -> list[tuple[str, int]]:
    """Row specifier: comma-separated ``left``, ``right``, ``all``, ``n=1e4``,
    ``k=10**7`` tokens."""
    if text is None or not str(text).strip():
        raise DomainError("empty table row specifier")
    rows = []
    for token in str(text).split(","):
        token = token.strip().lower()
        if token in ("left", "all"):
            rows += LEFT_ROWS
        if token in ("right", "all"):
            rows += RIGHT_ROWS
        if token in ("left", "right", "all"):
            continue
        key, sep, val = token.partition("=")
        if not sep or key not in ("n", "k"):
            raise DomainError(f"bad table row {token!r}; use n=<size> or k=<index>")
        rows.append((key, parse_size(val)))
    seen, out = set(), []
    for r in rows:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def run_table1(rows, cfg: Config, checkpoint: Optional[Checkpoint] = None,
               allow_long_run: bool = False) -> tuple[list[dict], list[str]]:
    """Fit rho1 per requested row. Returns ``(results, skipped_labels)``."""
    results, skipped = [], []
    for key, size in rows:
        kind = "first" if key == "n" else "after"
        label = sequence_label(kind, size)
        feasible = (kind == "first" and size <= 10**6) or (
            kind == "after" and (size <= DESK_MAX_K or checkpoint is not None or allow_long_run))
        if not feasible:
            log.warning("skipping %s: beyond desk scale without --allow-long-run/--checkpoint",
                        label)
            skipped.append(label)
            continue
        seq = prime_sequence(kind, size, cfg, checkpoint, allow_long_run)
        fit, _ = fit_sequence(unfolded(seq, cfg), cfg)
        results.append({
            "sequence_label": label,
            "rho1": fit.rho1,
            "rss": fit.rss,
            "published_rho1": TABLE1_PUBLISHED.get((key, size)),
        })
    return results, skipped


def table_json(results) -> str:
    return json.dumps(results, indent=2)
