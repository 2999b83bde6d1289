"""Slow but independent reference implementations used only by the tests."""

import math

import numpy as np
from scipy.special import expi


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# deterministic for n < 3.3e24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime_mr(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    return is_prime_trial(n) if n < 10**6 else is_prime_mr(n)


def primes_trial(limit: int) -> list:
    return [n for n in range(2, limit + 1) if is_prime_trial(n)]


def bit_sieve(limit: int) -> np.ndarray:
    """Plain (unsegmented) sieve over all integers."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def li_gauss_legendre(x: float, panels: int = 2000, order: int = 20) -> float:
    """Integral of 1/log t from 2 to x, composite Gauss-Legendre in u = log t."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    a, b = math.log(2.0), math.log(x)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    u = mid + half * nodes[None, :]
    return float(np.sum(half * weights[None, :] * np.exp(u) / u))


def li_expi(x: float) -> float:
    """Same integral via the exponential integral: Ei(log x) - Ei(log 2)."""
    return float(expi(math.log(x)) - expi(math.log(2.0)))


def moebius_factor(m: int) -> int:
    k, n, p = 0, m, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            k += 1
        p += 1
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def riemann_r_direct(x: float, terms: int) -> float:
    """Term-by-term sum with the exponential-integral Li."""
    total = 0.0
    for m in range(1, terms + 1):
        y = x ** (1.0 / m)
        if y <= 1.0:
            continue
        mu = moebius_factor(m)
        if mu:
            total += mu / m * li_expi(y)
    return total


def simpson(f, a: float, b: float, n: int = 20000) -> float:
    x = np.linspace(a, b, 2 * n + 1)
    y = f(x)
    h = (b - a) / (2 * n)
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))
