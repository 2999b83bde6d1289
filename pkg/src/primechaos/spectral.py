"""Fluctuation statistics of unfolded sequences.

Window statistics use overlapping windows ``[a_j, a_j + L)`` with
``a_j = eps_1 + j * step`` and ``a_j + L <= eps_N``. Counts come from binary
search on the sorted sequence; the left-edge ranks are shared across all L.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InsufficientSpanError

DEFAULT_STEP = 0.25
DEFAULT_BIN_WIDTH = 0.1
DEFAULT_S_MAX = 4.0
N_BLOCKS = 20
PLATEAU_GROWTH = 0.05  # relative change of Sigma2 per octave


class Statistic(str, enum.Enum):
    SIGMA2 = "sigma2"
    GAMMA1 = "gamma1"
    GAMMA2 = "gamma2"

    @classmethod
    def parse(cls, name) -> "Statistic":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"numvar": cls.SIGMA2, "number_variance": cls.SIGMA2,
                   "skewness": cls.GAMMA1, "excess": cls.GAMMA2, "kurtosis": cls.GAMMA2}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown statistic {name!r}") from None


def standard_grid(l_min=0.1, l_max=5.0, dl=0.1) -> np.ndarray:
    """Linear L grid ``l_min, l_min + dl, ..., l_max`` without float drift."""
    n = int(round((l_max - l_min) / dl))
    return np.round(l_min + dl * np.arange(n + 1), 12)


def _values(useq) -> np.ndarray:
    return np.asarray(getattr(useq, "values", useq), dtype=float)


@dataclass(frozen=True)
class SpacingHistogram:
    bin_width: float
    s_max: float
    densities: np.ndarray = field(repr=False)
    total_spacings: int
    stderr: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def edges(self) -> np.ndarray:
        return self.bin_width * np.arange(len(self.densities) + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    @property
    def mode(self) -> float:
        """Center of the most populated bin."""
        return float(self.centers[int(np.argmax(self.densities))])

    def csv_rows(self):
        e = self.edges
        for i, d in enumerate(self.densities):
            yield (e[i], e[i + 1], d)

    def to_csv(self) -> str:
        lines = ["s_left,s_right,density"]
        lines += [f"{a:.17g},{b:.17g},{d:.17g}" for a, b, d in self.csv_rows()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StatisticCurve:
    statistic: Statistic
    L: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)
    stderr: np.ndarray = field(repr=False)
    window_step: float = DEFAULT_STEP
    n_windows_per_L: int = 0  # windows at the largest L (the fewest)

    def __post_init__(self):
        object.__setattr__(self, "statistic", Statistic.parse(self.statistic))
        for name in ("L", "value", "stderr"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(self.L) > 1 and np.any(np.diff(self.L) <= 0):
            raise DomainError("StatisticCurve L values must be strictly increasing")

    @property
    def points(self):
        return list(zip(self.L.tolist(), self.value.tolist(), self.stderr.tolist()))

    def to_csv(self) -> str:
        lines = ["L,value,stderr"]
        lines += [f"{L:.17g},{v:.17g},{e:.17g}" for L, v, e in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, statistic=Statistic.SIGMA2, path=None) -> "StatisticCurve":
        from .errors import ParseError

        rows = []
        header_seen = False
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                if line.startswith("#") and "statistic=" in line:
                    for token in line[1:].split():
                        if token.startswith("statistic="):
                            statistic = token.partition("=")[2]
                continue
            if not header_seen:
                if line.replace(" ", "") != "L,value,stderr":
                    raise ParseError(f"expected header 'L,value,stderr', got {line!r}",
                                     lineno, path)
                header_seen = True
                continue
            parts = line.split(",")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ParseError(f"non-numeric field in {line!r}", lineno, path) from None
            if len(parts) != 3:
                raise ParseError(f"expected 3 fields, got {len(parts)}", lineno, path)
        if not rows:
            raise ParseError("no data rows", path=path)
        L, v, e = (np.array(c) for c in zip(*rows))
        return cls(statistic, L, v, e)


@dataclass(frozen=True)
class SaturationEstimate:
    l_saturation: float
    plateau_value: float


# --------------------------------------------------------------------------


def nnsd(useq, bin_width=DEFAULT_BIN_WIDTH, s_max=DEFAULT_S_MAX) -> SpacingHistogram:
    """Nearest-neighbour spacing histogram, normalized as a density over all
    spacings (those beyond ``s_max`` count in the total but are not binned)."""
    v = _values(useq)
    if len(v) < 2:
        raise DomainError("nnsd needs at least 2 unfolded values")
    if bin_width <= 0 or s_max <= 0:
        raise DomainError("nnsd needs bin_width > 0 and s_max > 0")
    s = np.diff(v)
    n_bins = int(math.ceil(s_max / bin_width - 1e-9))
    idx = np.floor(s / bin_width).astype(np.int64)
    counts = np.bincount(idx[(idx >= 0) & (idx < n_bins)], minlength=n_bins)
    return SpacingHistogram(bin_width, s_max, counts / (len(s) * bin_width), len(s))


def _n_windows(v: np.ndarray, L: float, step: float) -> int:
    span = v[-1] - v[0] if len(v) else 0.0
    if span <= L:
        raise InsufficientSpanError(
            f"window length L = {L:g} does not fit in the sequence span {span:g}")
    return int(math.floor((span - L) / step + 1e-9)) + 1


def window_counts(useq, L: float, step: float = DEFAULT_STEP) -> np.ndarray:
    """Number of levels in each window [a_j, a_j + L)."""
    if L <= 0 or step <= 0:
        raise DomainError("window_counts needs L > 0 and step > 0")
    v = _values(useq)
    a = v[0] + step * np.arange(_n_windows(v, L, step))
    return np.searchsorted(v, a + L, "left") - np.searchsorted(v, a, "left")


def _count_table(v: np.ndarray, L_grid, step: float):
    """Yield ``(L, counts)`` per grid point, reusing left-edge ranks."""
    L_grid = np.asarray(L_grid, dtype=float)
    if np.any(L_grid <= 0) or step <= 0:
        raise DomainError("window statistics need L > 0 and step > 0")
    if len(L_grid) > 1 and np.any(np.diff(L_grid) <= 0):
        raise DomainError("L grid must be strictly increasing")
    _n_windows(v, float(L_grid.max()), step)
    a_all = v[0] + step * np.arange(_n_windows(v, float(L_grid.min()), step))
    left = np.searchsorted(v, a_all, "left")
    for L in L_grid:
        n = _n_windows(v, L, step)
        right = np.searchsorted(v, a_all[:n] + L, "left")
        yield float(L), right - left[:n]


def moments(counts, j: int) -> float:
    """Central moment <(n - <n>)^j> of window counts."""
    c = np.asarray(counts, dtype=float)
    if c.size == 0:
        raise DomainError("moments needs at least one count")
    return float(np.mean((c - c.mean()) ** j))


def _stat_from_moments(stat: Statistic, m2, m3, m4):
    if stat is Statistic.SIGMA2:
        return m2
    with np.errstate(divide="ignore", invalid="ignore"):
        if stat is Statistic.GAMMA1:
            return np.where(m2 > 0, m3 / np.where(m2 > 0, m2, 1) ** 1.5, 0.0)
        return np.where(m2 > 0, m4 / np.where(m2 > 0, m2, 1) ** 2 - 3.0, 0.0)


def _block_stats(counts: np.ndarray, stats, n_blocks=N_BLOCKS):
    """Full-sample value and 20-block standard error for each statistic.

    Block estimates use central moments about the full-sample mean. Counts
    are small integers, so moments are taken from per-block histograms.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = len(counts)
    nb = min(n_blocks, n)
    k_max = int(counts.max()) + 1
    # contiguous blocks of near-equal size, as np.array_split would make
    block = (np.arange(n) * nb) // n
    hist = np.bincount(block * k_max + counts, minlength=nb * k_max).reshape(nb, k_max)
    sizes = hist.sum(axis=1)
    k = np.arange(k_max, dtype=float)
    mean = float(hist.sum(axis=0) @ k) / n
    d = k - mean
    powers = np.stack([d**2, d**3, d**4])  # (3, k_max)
    block_sums = hist @ powers.T  # (nb, 3)
    m2, m3, m4 = block_sums.sum(axis=0) / n
    full = {s: float(_stat_from_moments(s, m2, m3, m4)) for s in stats}
    if nb < 2:
        return full, {s: 0.0 for s in stats}
    b = block_sums / sizes[:, None]
    err = {}
    for s in stats:
        per_block = _stat_from_moments(s, b[:, 0], b[:, 1], b[:, 2])
        err[s] = float(np.std(per_block, ddof=1) / math.sqrt(nb))
    return full, err


def count_statistics(useq, L_grid, step: float = DEFAULT_STEP,
                     statistics=tuple(Statistic)) -> dict:
    """Compute several window statistics in one pass over the L grid.

    Returns ``{Statistic: StatisticCurve}``.
    """
    v = _values(useq)
    stats = [Statistic.parse(s) for s in statistics]
    L_out, vals, errs = [], {s: [] for s in stats}, {s: [] for s in stats}
    n_last = 0
    for L, counts in _count_table(v, L_grid, step):
        full, err = _block_stats(counts, stats)
        L_out.append(L)
        n_last = len(counts)
        for s in stats:
            vals[s].append(full[s])
            errs[s].append(err[s])
    return {s: StatisticCurve(s, L_out, vals[s], errs[s], step, n_last) for s in stats}


def number_variance(useq, L_grid, step: float = DEFAULT_STEP) -> StatisticCurve:
    return count_statistics(useq, L_grid, step, (Statistic.SIGMA2,))[Statistic.SIGMA2]


def skewness(useq, L_grid, step: float = DEFAULT_STEP) -> StatisticCurve:
    return count_statistics(useq, L_grid, step, (Statistic.GAMMA1,))[Statistic.GAMMA1]


def excess(useq, L_grid, step: float = DEFAULT_STEP) -> StatisticCurve:
    return count_statistics(useq, L_grid, step, (Statistic.GAMMA2,))[Statistic.GAMMA2]


# --------------------------------------------------------------------------
# saturation


def detect_plateau(L, sigma2, threshold=PLATEAU_GROWTH):
    """Locate saturation on a logarithmic L grid.

    The curve is smoothed with a trailing moving average one octave wide. The
    saturation length is the first L whose smoothed value exceeds the
    smoothed value at L/2 by less than ``threshold`` (relative). Returns
    ``None`` when the curve keeps growing.
    """
    L = np.asarray(L, dtype=float)
    y = np.asarray(sigma2, dtype=float)
    if len(L) < 3:
        return None
    lg = np.log2(L)
    width = max(2, int(math.ceil(1.0 / np.min(np.diff(lg)))))
    csum = np.concatenate([[0.0], np.cumsum(y)])
    idx = np.arange(len(y))
    lo = np.maximum(0, idx - width + 1)
    smooth = (csum[idx + 1] - csum[lo]) / (idx + 1 - lo)
    first_full = lg[0] + (width - 1) * (lg[1] - lg[0])
    for i in range(len(L)):
        if lg[i] - 1.0 < first_full:
            continue
        prev = np.interp(lg[i] - 1.0, lg, smooth)
        if prev > 0 and smooth[i] / prev - 1.0 < threshold:
            return SaturationEstimate(float(L[i]), float(np.mean(y[i:])))
    return None


def saturation_scan(useq, L_max: float, n_points: int = 40, step: float = DEFAULT_STEP,
                    l_min: float = 0.5):
    """Number variance on a logarithmic grid up to ``L_max`` plus the plateau
    estimate (``None`` when no plateau is found)."""
    v = _values(useq)
    span = v[-1] - v[0]
    if not L_max < span / 2:
        raise InsufficientSpanError(
            f"saturation scan needs L_max < span/2 = {span / 2:g}, got {L_max:g}")
    if not 0 < l_min < L_max:
        raise DomainError("saturation scan needs 0 < l_min < L_max")
    grid = np.geomspace(l_min, L_max, n_points)
    curve = number_variance(v, grid, step)
    return curve, detect_plateau(curve.L, curve.value)
