"""Reference statistics for Poisson, Gaussian random-matrix ensembles and the
Berry-Robnik superposition of Poisson and GOE levels.

Spacing densities use the Wigner surmises. Number variances come from the
two-level cluster functions, ``Sigma2(L) = L - 2 int_0^L (L - r) Y2(r) dr``.
Skewness and excess of the random-matrix ensembles are tabulated by Monte
Carlo in ``data/rmt_reference.csv`` (see :mod:`primechaos.rmt_mc`).
"""

from __future__ import annotations

import csv
import enum
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erfc, sici

from ._quadrature import adaptive, gk15
from .errors import DomainError

RHO1_MIN, RHO1_MAX = -0.2, 1.2
SIGMA2_GRID_STEP = 0.05
SIGMA2_GRID_MAX = 50.0
REFERENCE_FILE = "rmt_reference.csv"


class Kind(str, enum.Enum):
    POISSON = "poisson"
    GOE = "goe"
    GUE = "gue"
    GSE = "gse"
    BERRY_ROBNIK = "berry_robnik"

    @classmethod
    def parse(cls, name) -> "Kind":
        if isinstance(name, cls):
            return name
        if isinstance(name, EnsembleKind):
            return name.tag
        key = str(name).strip().lower().replace("-", "_")
        if key in ("br", "berry_robnik", "berryrobnik"):
            return cls.BERRY_ROBNIK
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown ensemble {name!r}") from None

    @property
    def beta(self) -> int:
        return {Kind.GOE: 1, Kind.GUE: 2, Kind.GSE: 4}[self]


@dataclass(frozen=True)
class EnsembleKind:
    tag: Kind
    rho1: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Kind.parse(self.tag))
        if self.tag is Kind.BERRY_ROBNIK:
            if self.rho1 is None:
                raise DomainError("BERRY_ROBNIK needs rho1")
            if not RHO1_MIN <= self.rho1 <= RHO1_MAX:
                raise DomainError(f"rho1 = {self.rho1} outside [{RHO1_MIN}, {RHO1_MAX}]")
        elif self.rho1 is not None:
            raise DomainError(f"rho1 only applies to BERRY_ROBNIK, not {self.tag.value}")

    @classmethod
    def of(cls, kind, rho1=None) -> "EnsembleKind":
        if isinstance(kind, cls):
            return kind
        return cls(Kind.parse(kind), rho1)


# --------------------------------------------------------------------------
# spacing distributions


def _berry_robnik_pdf(s, rho1):
    rb = 1.0 - rho1
    out = (rho1**2 * np.exp(-rho1 * s) * erfc(math.sqrt(math.pi) * rb * s / 2)
           + (2 * rho1 * rb + math.pi * rb**3 * s / 2)
           * np.exp(-rho1 * s - math.pi * rb**2 * s**2 / 4))
    # slightly negative rho1 (fit range) gives tiny negative values near s = 0
    return np.maximum(out, 0.0)


def spacing_pdf(kind, s, rho1=None):
    """Nearest-neighbour spacing density at ``s`` (scalar or array)."""
    kind = EnsembleKind.of(kind, rho1)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("spacing_pdf needs s >= 0")
    tag = kind.tag
    if tag is Kind.POISSON:
        out = np.exp(-s_arr)
    elif tag is Kind.GOE:
        out = math.pi * s_arr / 2 * np.exp(-math.pi * s_arr**2 / 4)
    elif tag is Kind.GUE:
        out = 32 / math.pi**2 * s_arr**2 * np.exp(-4 * s_arr**2 / math.pi)
    elif tag is Kind.GSE:
        out = 2**18 / (3**6 * math.pi**3) * s_arr**4 * np.exp(-64 * s_arr**2 / (9 * math.pi))
    else:
        out = _berry_robnik_pdf(s_arr, kind.rho1)
    return float(out) if np.ndim(s) == 0 else out


# --------------------------------------------------------------------------
# two-level cluster functions


def _sinc(r):
    return np.sinc(r)


def _dsinc(r):
    """Derivative of sin(pi r)/(pi r) with respect to r."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = np.abs(r) < 1e-3
    rs = r[small]
    out[small] = -math.pi**2 * rs / 3 + math.pi**4 * rs**3 / 30
    rl = r[~small]
    pr = math.pi * rl
    out[~small] = (pr * np.cos(pr) - np.sin(pr)) / (math.pi * rl**2)
    return out


def _int_sinc(x):
    """int_0^x sin(pi t)/(pi t) dt."""
    return sici(math.pi * np.asarray(x, dtype=float))[0] / math.pi


def _y2(tag: Kind, r):
    r = np.abs(np.asarray(r, dtype=float))
    if tag is Kind.POISSON:
        return np.zeros_like(r)
    if tag is Kind.GUE:
        return _sinc(r) ** 2
    if tag is Kind.GOE:
        return _sinc(r) ** 2 + _dsinc(r) * (0.5 - _int_sinc(r))
    if tag is Kind.GSE:
        r2 = 2 * r
        return _sinc(r2) ** 2 - _dsinc(r2) * _int_sinc(r2)
    raise DomainError(f"no cluster function for {tag.value}")


def cluster_y2(kind, r):
    """Two-level cluster function Y2(r) for POISSON, GOE, GUE or GSE."""
    tag = Kind.parse(kind)
    out = _y2(tag, r)
    return float(out) if np.ndim(r) == 0 else out


# --------------------------------------------------------------------------
# number variance


def _sigma2_direct(tag: Kind, L: float) -> float:
    if tag is Kind.POISSON:
        return float(L)
    a = adaptive(lambda r: _y2(tag, r), 0.0, L, rel_tol=1e-13, abs_tol=1e-15)
    b = adaptive(lambda r: r * _y2(tag, r), 0.0, L, rel_tol=1e-13, abs_tol=1e-15)
    return float(L - 2 * (L * a - b))


_spline_lock = threading.Lock()
_splines: dict = {}


def _sigma2_spline(tag: Kind) -> CubicSpline:
    spline = _splines.get(tag)
    if spline is not None:
        return spline
    with _spline_lock:
        if tag not in _splines:
            nodes = np.arange(0.0, SIGMA2_GRID_MAX + SIGMA2_GRID_STEP / 2, SIGMA2_GRID_STEP)
            lo, hi = nodes[:-1], nodes[1:]
            a_inc, _ = gk15(lambda r: _y2(tag, r), lo, hi)
            b_inc, _ = gk15(lambda r: r * _y2(tag, r), lo, hi)
            a = np.concatenate([[0.0], np.cumsum(a_inc)])
            b = np.concatenate([[0.0], np.cumsum(b_inc)])
            _splines[tag] = CubicSpline(nodes, nodes - 2 * (nodes * a - b))
    return _splines[tag]


def sigma2_theory(kind, L, exact=False):
    """Number variance of an unfolded POISSON/GOE/GUE/GSE spectrum.

    Values come from a cubic spline through a 0.05-spaced table up to L = 50
    unless ``exact`` is set or L lies beyond the table.
    """
    tag = Kind.parse(kind)
    if tag is Kind.BERRY_ROBNIK:
        raise DomainError("use sigma2_br for the Berry-Robnik number variance")
    L_arr = np.asarray(L, dtype=float)
    if np.any(L_arr < 0):
        raise DomainError("sigma2_theory needs L >= 0")
    if tag is Kind.POISSON:
        out = L_arr.copy()
    elif exact:
        out = np.vectorize(lambda x: _sigma2_direct(tag, x))(L_arr)
    else:
        out = np.asarray(_sigma2_spline(tag)(np.minimum(L_arr, SIGMA2_GRID_MAX)))
        far = L_arr > SIGMA2_GRID_MAX
        if np.any(far):
            out = np.where(far, np.vectorize(lambda x: _sigma2_direct(tag, x))(L_arr), out)
    return float(out) if np.ndim(L) == 0 else out


def sigma2_br(L, rho1):
    """Berry-Robnik number variance: Poisson part on rho1*L plus GOE part on
    (1 - rho1)*L. Outside [0, 1] the Poisson term stays linear and the GOE
    argument is clamped at 0."""
    L_arr = np.asarray(L, dtype=float)
    rb = 1.0 - rho1
    out = rho1 * L_arr + sigma2_theory(Kind.GOE, np.maximum(0.0, rb * L_arr))
    return float(out) if np.ndim(L) == 0 else out


# --------------------------------------------------------------------------
# skewness and excess


@lru_cache(maxsize=1)
def reference_table():
    """Monte Carlo reference curves keyed by (kind, statistic).

    Each value is ``(L, value, stderr)`` arrays; the header comments are
    returned under the key ``"meta"``.
    """
    text = resources.files("primechaos").joinpath("data", REFERENCE_FILE).read_text()
    meta, rows = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.append(line[1:].strip())
        elif line.strip():
            rows.append(line)
    table: dict = {}
    for rec in csv.DictReader(rows):
        key = (Kind.parse(rec["kind"]), rec["statistic"].upper())
        table.setdefault(key, []).append(
            (float(rec["L"]), float(rec["value"]), float(rec["stderr"])))
    out = {k: tuple(np.array(col) for col in zip(*sorted(v))) for k, v in table.items()}
    out["meta"] = meta
    return out


def gamma_theory(kind, L, order):
    """Skewness (order 1) or excess (order 2) of window counts.

    Returns ``(value, stderr)``. Poisson is exact; random-matrix ensembles
    interpolate the Monte Carlo table linearly in L.
    """
    tag = Kind.parse(kind)
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    L_arr = np.asarray(L, dtype=float)
    if np.any(L_arr <= 0):
        raise DomainError("gamma_theory needs L > 0")
    if tag is Kind.POISSON:
        value = L_arr ** (-0.5) if order == 1 else 1.0 / L_arr
        err = np.zeros_like(L_arr)
    elif tag in (Kind.GOE, Kind.GUE, Kind.GSE):
        grid, vals, errs = reference_table()[(tag, f"GAMMA{order}")]
        if np.any(L_arr < grid[0] - 1e-12) or np.any(L_arr > grid[-1] + 1e-12):
            raise DomainError(
                f"L outside the tabulated range [{grid[0]}, {grid[-1]}] for {tag.value}")
        value = np.interp(L_arr, grid, vals)
        err = np.interp(L_arr, grid, errs)
    else:
        raise DomainError("no skewness/excess reference for Berry-Robnik statistics")
    if np.ndim(L) == 0:
        return float(value), float(err)
    return value, err
