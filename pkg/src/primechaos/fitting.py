"""Least-squares fit of the Berry-Robnik Poisson fraction to a measured
number-variance curve."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .ensembles import RHO1_MAX, RHO1_MIN, sigma2_br
from .errors import InsufficientDataError
from .spectral import Statistic, StatisticCurve

MIN_POINTS = 10
RHO1_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BoundaryWarning(UserWarning):
    """The fitted rho1 sits on the edge of the search interval."""


@dataclass(frozen=True)
class BRFit:
    rho1: float
    rss: float
    fit_l_min: float
    fit_l_max: float
    n_points: int
    weighted: bool = False
    at_boundary: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"rho1": d["rho1"], "rss": d["rss"], "l_min": d["fit_l_min"],
                "l_max": d["fit_l_max"], "n_points": d["n_points"], "weighted": d["weighted"]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def golden_section(f, a, b, tol=RHO1_TOL, max_iter=200):
    """Minimize a unimodal scalar function on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def br_objective(L, sigma2, weights=None):
    """Residual sum of squares as a function of rho1."""
    L = np.asarray(L, dtype=float)
    y = np.asarray(sigma2, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)

    def rss(rho1):
        r = y - sigma2_br(L, rho1)
        return float(np.sum(w * r * r))

    return rss


def fit_rho1(curve: StatisticCurve, l_min: float = 0.0, l_max: float = 5.0,
             weighted: bool = False) -> BRFit:
    """Fit rho1 on points with ``l_min < L <= l_max``.

    A 0.01 scan over [-0.2, 1.2] brackets the minimum and golden-section
    search refines it to 1e-6. ``weighted`` uses 1/stderr**2 weights.
    """
    if curve.statistic is not Statistic.SIGMA2:
        raise InsufficientDataError(f"fit_rho1 needs a SIGMA2 curve, got {curve.statistic.value}")
    sel = (curve.L > l_min) & (curve.L <= l_max + 1e-12)
    n = int(np.count_nonzero(sel))
    if n < MIN_POINTS:
        raise InsufficientDataError(
            f"fit_rho1 needs >= {MIN_POINTS} points in ({l_min}, {l_max}], got {n}")
    weights = None
    if weighted:
        err = curve.stderr[sel]
        positive = err[err > 0]
        floor = positive.min() if positive.size else 1.0
        weights = 1.0 / np.maximum(err, floor) ** 2
    f = br_objective(curve.L[sel], curve.value[sel], weights)

    grid = np.linspace(RHO1_MIN, RHO1_MAX, 141)
    vals = [f(r) for r in grid]
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    rho1 = golden_section(f, lo, hi)
    at_boundary = bool(rho1 - RHO1_MIN < 1e-4 or RHO1_MAX - rho1 < 1e-4)
    if at_boundary:
        warnings.warn(f"fitted rho1 = {rho1:.6f} lies on the search boundary", BoundaryWarning,
                      stacklevel=2)
    return BRFit(float(rho1), f(rho1), float(l_min), float(l_max), n, weighted, at_boundary)
