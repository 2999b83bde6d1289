"""Eigenvalues of a real symmetric tridiagonal matrix by the implicit QL
method with Wilkinson-type shifts.

Compiled with numba when it is importable; the pure-Python fallback gives the
same results, only slower.
"""

import math

import numpy as np

from .errors import NumericError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

MAX_SWEEPS = 60  # per eigenvalue


@njit(cache=True, nogil=True)
def _tql1(d, e, max_sweeps):
    """In-place implicit QL on diagonal ``d`` and subdiagonal ``e``.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``; ``e[n-1]`` is scratch. Returns 0
    on success or ``l + 1`` for the index that failed to converge.
    """
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def eigvalsh_tridiagonal(diagonal, offdiagonal, max_sweeps=MAX_SWEEPS, label=None):
    """Ascending eigenvalues of the symmetric tridiagonal matrix with the
    given main diagonal (length n) and off-diagonal (length n - 1)."""
    d = np.array(diagonal, dtype=np.float64)
    n = d.shape[0]
    off = np.asarray(offdiagonal, dtype=np.float64)
    if off.shape[0] != max(n - 1, 0):
        raise ValueError(f"off-diagonal must have length {n - 1}, got {off.shape[0]}")
    e = np.zeros(n, dtype=np.float64)
    e[: n - 1] = off
    status = _tql1(d, e, max_sweeps)
    if status:
        where = f" (matrix {label})" if label is not None else ""
        raise NumericError(
            f"tridiagonal QL did not converge for eigenvalue {status - 1} "
            f"after {max_sweeps} sweeps{where}")
    d.sort()
    return d
