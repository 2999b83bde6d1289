"""Smooth prime staircases (x/log x, Li, Riemann R) and spectral unfolding.

``li`` is the offset logarithmic integral taken from 2, so ``li(2) == 0`` and
``li(x) < 0`` for ``1 < x < 2``. The R function is built from that same
``li``; every term enters at zero when ``x`` crosses a power of two, which
keeps the unfolded staircase continuous.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._quadrature import adaptive, gk15
from .errors import DomainError, ParseError

LOG2 = math.log(2.0)
LI_REL_TOL = 1e-12
# consecutive arguments closer than this (relative) are integrated with one
# G7/K15 panel; wider gaps fall back to the adaptive rule
_PANEL_REL_GAP = 0.05


class Method(str, enum.Enum):
    X_OVER_LOG_X = "x_over_log_x"
    LI = "li"
    RIEMANN_R = "riemann_r"

    @classmethod
    def parse(cls, name) -> "Method":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {
            "r": cls.RIEMANN_R, "riemann_r": cls.RIEMANN_R, "riemann": cls.RIEMANN_R,
            "li": cls.LI, "lilog": cls.LI, "logint": cls.LI,
            "xlogx": cls.X_OVER_LOG_X, "x_over_log_x": cls.X_OVER_LOG_X, "pnt": cls.X_OVER_LOG_X,
        }
        if key not in aliases:
            raise DomainError(f"unknown unfolding method {name!r}; use one of {sorted(aliases)}")
        return aliases[key]


def _li_integrand_log(u):
    # dt / log t with t = e^u
    return np.exp(u) / u


def _li_integrand(t):
    return 1.0 / np.log(t)


@lru_cache(maxsize=4096)
def li(x: float) -> float:
    """Integral of 1/log t from 2 to x, adaptive quadrature in log t."""
    x = float(x)
    if not x > 1.0:
        raise DomainError(f"li(x) needs x > 1, got {x}")
    if x == 2.0:
        return 0.0
    return adaptive(_li_integrand_log, LOG2, math.log(x), rel_tol=LI_REL_TOL)


def li_sorted(y) -> np.ndarray:
    """``li`` on a strictly increasing array, sweeping upward.

    The first value is anchored with the adaptive rule; each later value adds
    the integral over the gap from its predecessor.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return np.zeros(0)
    if np.any(y <= 1.0):
        raise DomainError("li needs every argument > 1")
    lo, hi = y[:-1], y[1:]
    inc = np.empty(len(lo))
    near = (hi - lo) <= _PANEL_REL_GAP * (lo - 1.0)
    if np.any(near):
        inc[near], _ = gk15(_li_integrand, lo[near], hi[near])
    for i in np.flatnonzero(~near):
        inc[i] = li(hi[i]) - li(lo[i])
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out + li(y[0])


@lru_cache(maxsize=None)
def moebius(m: int) -> int:
    if m < 1:
        raise DomainError(f"moebius(m) needs m >= 1, got {m}")
    k = 0
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            k += 1
        p += 1
    if m > 1:
        k += 1
    return -1 if k % 2 else 1


def _r_terms(x: float) -> int:
    return int(math.floor(math.log2(x)))


def riemann_r(x: float, terms: int | None = None) -> float:
    """Sum over m <= floor(log2 x) of moebius(m)/m * li(x**(1/m)).

    ``terms`` overrides the upper summation index. Terms with
    ``x**(1/m) <= 1`` are skipped; those in (1, 2) contribute their negative
    ``li`` value.
    """
    x = float(x)
    if x < 2.0:
        raise DomainError(f"riemann_r(x) needs x >= 2, got {x}")
    M = _r_terms(x) if terms is None else int(terms)
    total = 0.0
    for m in range(1, M + 1):
        mu = moebius(m)
        if mu == 0:
            continue
        y = x ** (1.0 / m)
        if y <= 1.0:
            continue
        total += mu / m * li(y)
    return total


def riemann_r_sorted(x) -> np.ndarray:
    """Vectorized ``riemann_r`` for a strictly increasing array."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return np.zeros(0)
    if x[0] < 2.0:
        raise DomainError("riemann_r needs every argument >= 2")
    out = np.zeros_like(x)
    for m in range(1, _r_terms(x[-1]) + 1):
        mu = moebius(m)
        if mu == 0:
            continue
        # exactly the elements with m <= floor(log2 x)
        start = np.searchsorted(x, 2.0**m, side="left")
        if start >= len(x):
            break
        y = x[start:] ** (1.0 / m)
        y[0] = max(y[0], 2.0)  # pow rounding at exact powers of two
        out[start:] += mu / m * li_sorted(y)
    return out


def riemann_r_inverse(n: float) -> float:
    """x with R(x) = n, by Newton iteration using R'(x) ~ 1/log x."""
    if n < 1:
        raise DomainError(f"riemann_r_inverse needs n >= 1, got {n}")
    x = max(3.0, n * math.log(max(n, 2.0)))
    for _ in range(100):
        step = (riemann_r(x) - n) * math.log(x)
        x_new = max(2.0, x - step)
        if abs(x_new - x) <= 1e-10 * x:
            return x_new
        x = x_new
    return x


def x_over_log_x(x):
    x = np.asarray(x, dtype=float)
    return x / np.log(x)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UnfoldedSequence:
    values: np.ndarray = field(repr=False)
    method: Method = Method.RIEMANN_R
    rescaled: bool = False
    source_start_index: int = 1

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise DomainError("unfolded values must be one-dimensional")
        if len(values) > 1 and np.any(np.diff(values) <= 0):
            raise DomainError("unfolded values must be strictly increasing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "method", Method.parse(self.method))

    def __len__(self):
        return len(self.values)

    @property
    def mean_spacing(self) -> float:
        if len(self.values) < 2:
            raise DomainError("mean spacing needs at least 2 unfolded values")
        return float((self.values[-1] - self.values[0]) / (len(self.values) - 1))

    def header(self) -> str:
        return (f"# method={self.method.value} rescaled={str(self.rescaled).lower()} "
                f"start_index={self.source_start_index}")

    def to_text(self) -> str:
        return self.header() + "\n" + "".join(f"{v:.17g}\n" for v in self.values)

    @classmethod
    def from_text(cls, text: str, path=None) -> "UnfoldedSequence":
        meta = {"method": "riemann_r", "rescaled": "false", "start_index": "1"}
        values = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, sep, val = token.partition("=")
                    if sep and key in meta:
                        meta[key] = val
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(f"not a number: {line!r}", lineno, path) from None
        try:
            start = int(meta["start_index"])
        except ValueError:
            raise ParseError(f"bad start_index {meta['start_index']!r}", path=path) from None
        return cls(np.array(values), Method.parse(meta["method"]),
                   meta["rescaled"].lower() == "true", start)


def unfold(seq, method=Method.RIEMANN_R) -> UnfoldedSequence:
    """Map primes through a smooth staircase: eps_n = f(p_n).

    Under X_OVER_LOG_X a leading 2 is dropped when more values follow, since
    that staircase is not increasing below e; ``source_start_index`` shifts
    accordingly.
    """
    method = Method.parse(method)
    p = np.asarray(seq.values, dtype=float)
    start = int(getattr(seq, "start_index", 1))
    if p.size == 0:
        raise DomainError("unfold: empty prime sequence")
    if p[0] < 2:
        raise DomainError("unfold: every value must be >= 2")
    if method is Method.X_OVER_LOG_X:
        if p.size > 1 and p[0] < math.e:
            # x/log x decreases below e: f(2) > f(3). Drop the leading 2.
            p = p[1:]
            start += 1
        eps = x_over_log_x(p)
    elif method is Method.LI:
        eps = li_sorted(p)
    else:
        eps = riemann_r_sorted(p)
    return UnfoldedSequence(eps, method, False, start)


def rescale_unit_mean(useq: UnfoldedSequence) -> UnfoldedSequence:
    """Affine map onto unit mean spacing starting at 0."""
    v = useq.values
    if len(v) < 2:
        raise DomainError("rescale_unit_mean: needs at least 2 unfolded values")
    mean = (v[-1] - v[0]) / (len(v) - 1)
    out = (v - v[0]) / mean
    return UnfoldedSequence(out, useq.method, True, useq.source_start_index)
