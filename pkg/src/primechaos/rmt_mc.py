"""Monte Carlo spectra of Gaussian ensembles, used as an independent oracle
for the reference curves and to tabulate skewness and excess.

Spectra come from the tridiagonal beta-Hermite model: diagonal N(0, 2),
off-diagonal chi with beta*(n-1), ..., beta degrees of freedom, all scaled
by 1/sqrt(2). Its level density tends to a semicircle of radius
sqrt(2 beta n). Each draw has its own RNG stream seeded by (seed, index), so
results do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensembles import Kind
from .errors import DomainError
from .spectral import (
    DEFAULT_BIN_WIDTH, DEFAULT_S_MAX, DEFAULT_STEP, SpacingHistogram, Statistic,
    StatisticCurve, _count_table,
)
from .tridiag import eigvalsh_tridiagonal

DEFAULT_SEED = 20080527
REFERENCE_GRID = np.round(0.25 * np.arange(1, 41), 12)  # 0.25, 0.5, ..., 10


@dataclass(frozen=True)
class McConfig:
    kind: Kind
    dim: int
    n_samples: int
    seed: int = DEFAULT_SEED
    central_fraction: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if self.kind is Kind.BERRY_ROBNIK:
            raise DomainError("Monte Carlo sampling covers POISSON, GOE, GUE and GSE only")
        if self.dim < 2:
            raise DomainError(f"dim must be >= 2, got {self.dim}")
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 < self.central_fraction <= 1:
            raise DomainError("central_fraction must lie in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


def _rng(config: McConfig, index: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, index])


def sample_spectrum(config: McConfig, index: int = 0) -> np.ndarray:
    """Ascending eigenvalues of draw ``index`` (uniform levels on [0, dim]
    for POISSON)."""
    rng = _rng(config, index)
    n = config.dim
    if config.kind is Kind.POISSON:
        return np.sort(rng.uniform(0.0, n, size=n))
    beta = config.kind.beta
    diag = rng.normal(0.0, math.sqrt(2.0), size=n) / math.sqrt(2.0)
    dof = beta * np.arange(n - 1, 0, -1)
    off = np.sqrt(rng.chisquare(dof)) / math.sqrt(2.0)
    return eigvalsh_tridiagonal(diag, off, label=index)


def semicircle_staircase(x, dim: int, beta: int) -> np.ndarray:
    """Integrated semicircle density: expected number of levels below x."""
    radius = math.sqrt(2.0 * beta * dim)
    t = np.clip(np.asarray(x, dtype=float) / radius, -1.0, 1.0)
    return dim * (0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / math.pi)


def unfolded_sample(config: McConfig, index: int = 0) -> np.ndarray:
    """Unfolded central levels of one draw."""
    ev = sample_spectrum(config, index)
    if config.kind is Kind.POISSON:
        eps = ev
    else:
        eps = semicircle_staircase(ev, config.dim, config.kind.beta)
    n = len(eps)
    keep = max(2, int(round(config.central_fraction * n)))
    lo = (n - keep) // 2
    return eps[lo : lo + keep]


def _map_samples(fn, n: int, workers: int):
    if workers <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


def _central(s0, s1, s2, s3, s4):
    mu = s1 / s0
    e2, e3, e4 = s2 / s0, s3 / s0, s4 / s0
    m2 = e2 - mu**2
    m3 = e3 - 3 * mu * e2 + 2 * mu**3
    m4 = e4 - 4 * mu * e3 + 6 * mu**2 * e2 - 3 * mu**4
    return m2, m3, m4


def _from_moments(stat, m2, m3, m4):
    if stat is Statistic.SIGMA2:
        return m2
    with np.errstate(divide="ignore", invalid="ignore"):
        if stat is Statistic.GAMMA1:
            return m3 / m2**1.5
        return m4 / m2**2 - 3.0


def mc_curves(config: McConfig, L_grid, step: float = DEFAULT_STEP, statistics=tuple(Statistic),
              workers: int = 1) -> dict:
    """Pooled window statistics over all draws, with leave-one-draw-out
    jackknife standard errors. Returns ``{Statistic: StatisticCurve}``."""
    if config.dim < 8:
        raise DomainError("window statistics need dim >= 8")
    L_grid = np.asarray(L_grid, dtype=float)
    stats = [Statistic.parse(s) for s in statistics]

    def sums(i):
        eps = unfolded_sample(config, i)
        out = np.empty((len(L_grid), 5))
        for j, (_, c) in enumerate(_count_table(eps, L_grid, step)):
            c = c.astype(float)
            out[j] = (len(c), c.sum(), (c**2).sum(), (c**3).sum(), (c**4).sum())
        return out

    per = np.stack(_map_samples(sums, config.n_samples, workers))  # (n, nL, 5)
    total = per.sum(axis=0)
    n = config.n_samples
    full_m = _central(*total.T)
    loo_m = _central(*(total[None] - per).transpose(2, 0, 1)) if n > 1 else None
    n_windows = int(total[-1, 0])
    out = {}
    for s in stats:
        value = _from_moments(s, *full_m)
        if loo_m is None:
            err = np.zeros_like(value)
        else:
            loo = _from_moments(s, *loo_m)
            err = np.sqrt((n - 1) / n * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
        out[s] = StatisticCurve(s, L_grid, value, err, step, n_windows)
    return out


def mc_nnsd(config: McConfig, bin_width=DEFAULT_BIN_WIDTH, s_max=DEFAULT_S_MAX,
            workers: int = 1) -> SpacingHistogram:
    """Pooled spacing histogram; per-bin standard error across draws."""
    n_bins = int(math.ceil(s_max / bin_width - 1e-9))

    def hist(i):
        s = np.diff(unfolded_sample(config, i))
        idx = np.floor(s / bin_width).astype(np.int64)
        h = np.bincount(idx[(idx >= 0) & (idx < n_bins)], minlength=n_bins)
        return h, len(s)

    parts = _map_samples(hist, config.n_samples, workers)
    counts = np.stack([h for h, _ in parts]).astype(float)
    totals = np.array([t for _, t in parts], dtype=float)
    density = counts.sum(axis=0) / (totals.sum() * bin_width)
    per_draw = counts / (totals[:, None] * bin_width)
    n = config.n_samples
    err = per_draw.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(n_bins)
    return SpacingHistogram(bin_width, s_max, density, int(totals.sum()), err)


def mc_statistic(config: McConfig, statistic, grid=None, step: float = DEFAULT_STEP,
                 bin_width=DEFAULT_BIN_WIDTH, s_max=DEFAULT_S_MAX, workers: int = 1):
    """One Monte Carlo curve: ``statistic`` is SIGMA2, GAMMA1, GAMMA2 or NNSD."""
    if str(statistic).strip().lower() == "nnsd":
        return mc_nnsd(config, bin_width, s_max, workers)
    stat = Statistic.parse(statistic)
    if grid is None:
        raise DomainError(f"{stat.value} needs an L grid")
    return mc_curves(config, grid, step, (stat,), workers)[stat]


def tabulate_reference(seed: int = DEFAULT_SEED, dim: int = 500, n_samples: int = 400,
                       L_grid=REFERENCE_GRID, step: float = DEFAULT_STEP,
                       kinds=(Kind.GOE, Kind.GUE, Kind.GSE), workers: int = 1):
    """Rows ``(kind, statistic, L, value, stderr)`` for the reference file."""
    rows = []
    for kind in kinds:
        cfg = McConfig(kind, dim, n_samples, seed)
        curves = mc_curves(cfg, L_grid, step, workers=workers)
        for stat, curve in curves.items():
            for L, v, e in curve.points:
                rows.append((cfg.kind.value, stat.value.upper(), L, v, e))
    return rows


def reference_csv(rows, seed, dim, n_samples, step=DEFAULT_STEP, central_fraction=0.5) -> str:
    head = [
        "# Monte Carlo reference curves for window-count statistics",
        f"# seed={seed} dim={dim} n_samples={n_samples} step={step} "
        f"central_fraction={central_fraction}",
        "kind,statistic,L,value,stderr",
    ]
    body = [f"{k},{s},{L:.17g},{v:.17g},{e:.17g}" for k, s, L, v, e in rows]
    return "\n".join(head + body) + "\n"
