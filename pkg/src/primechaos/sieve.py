"""Segmented odd-only sieve of Eratosthenes and prime subsequences with exact
absolute indexing.

Segments are independent work units. Every public routine reduces segment
results in segment order, so outputs do not depend on the segment size or on
the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DomainError, IntegrityError, ParseError

DEFAULT_SEGMENT_SIZE = 1 << 20  # odd values per segment
_PRESIEVE_PRIMES = (3, 5, 7, 11, 13)
_PRESIEVE_PERIOD = 3 * 5 * 7 * 11 * 13


@dataclass(frozen=True)
class PrimeSequence:
    """A contiguous run of primes; ``values[0]`` is the ``start_index``-th prime."""

    start_index: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.start_index < 1:
            raise DomainError(f"start_index must be >= 1, got {self.start_index}")
        values = np.array(self.values, dtype=np.int64)
        if values.ndim != 1:
            raise DomainError("values must be one-dimensional")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    @property
    def end_index(self):
        """Absolute index of the last element."""
        return self.start_index + len(self.values) - 1

    def to_text(self) -> str:
        header = f"# start_index={self.start_index} count={len(self.values)}\n"
        return header + "".join(f"{int(v)}\n" for v in self.values)

    @classmethod
    def from_text(cls, text: str, path=None) -> "PrimeSequence":
        start_index = 1
        values = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, _, val = token.partition("=")
                    if key == "start_index":
                        try:
                            start_index = int(val)
                        except ValueError:
                            raise ParseError(f"bad start_index {val!r}", lineno, path) from None
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ParseError(f"not an integer: {line!r}", lineno, path) from None
        return cls(start_index, np.array(values, dtype=np.int64))

    def to_bytes(self) -> bytes:
        head = np.array([self.start_index, len(self.values)], dtype="<u8").tobytes()
        return head + self.values.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PrimeSequence":
        if len(data) < 16:
            raise ParseError("binary prime file shorter than its 16-byte header")
        start_index, count = (int(v) for v in np.frombuffer(data[:16], dtype="<u8"))
        if len(data) != 16 + 8 * count:
            raise ParseError(
                f"binary prime file declares {count} values but holds "
                f"{(len(data) - 16) / 8:g}"
            )
        values = np.frombuffer(data[16:], dtype="<u8").astype(np.int64)
        return cls(start_index, values)

    def save(self, path, binary=False):
        path = Path(path)
        if binary:
            path.write_bytes(self.to_bytes())
        else:
            path.write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "PrimeSequence":
        path = Path(path)
        data = path.read_bytes()
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError:
            return cls.from_bytes(data)
        if text and not (text[0].isdigit() or text[0] in "#\n \t\r"):
            return cls.from_bytes(data)
        return cls.from_text(text, path=str(path))


# --------------------------------------------------------------------------
# segment machinery


def _small_primes(limit: int) -> np.ndarray:
    """Plain sieve for the base primes up to ``limit`` inclusive."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _presieve_pattern() -> np.ndarray:
    # j -> odd number 2j+1; one period of flags for the wheel primes
    j = np.arange(_PRESIEVE_PERIOD, dtype=np.int64)
    n = 2 * j + 1
    keep = np.ones(_PRESIEVE_PERIOD, dtype=bool)
    for p in _PRESIEVE_PRIMES:
        keep &= n % p != 0
    return keep


_PATTERN = _presieve_pattern()


class _Sieve:
    """Base-prime table and per-segment marking for integers below ``bound``."""

    def __init__(self, bound: int):
        self.bound = bound
        base = _small_primes(math.isqrt(max(bound, 4)) + 1)
        self.base = base[base > _PRESIEVE_PRIMES[-1]]

    def odd_flags(self, lo: int, hi: int) -> tuple[int, np.ndarray]:
        """Primality flags for the odd integers in [lo, hi).

        Returns ``(first_odd, flags)`` with ``flags[i]`` true iff
        ``first_odd + 2 i`` is prime.
        """
        first = lo | 1
        n = max(0, (hi - first + 1) // 2)
        if n == 0:
            return first, np.zeros(0, dtype=bool)
        j0 = (first - 1) // 2
        offset = j0 % _PRESIEVE_PERIOD
        reps = (offset + n) // _PRESIEVE_PERIOD + 1
        flags = np.tile(_PATTERN, reps)[offset : offset + n].copy()
        last = first + 2 * (n - 1)
        base = self.base[self.base * self.base <= last]
        if len(base):
            start = np.maximum(base * base, -(-first // base) * base)
            start += base * (start % 2 == 0)
            idx = (start - first) // 2
            for p, i in zip(base.tolist(), idx.tolist()):
                flags[i::p] = False
        if first <= 1:
            flags[0] = False  # 1 is not prime
        if first <= _PRESIEVE_PRIMES[-1]:
            for p in _PRESIEVE_PRIMES:
                if first <= p <= last:
                    flags[(p - first) // 2] = True
        return first, flags

    def primes(self, lo: int, hi: int) -> np.ndarray:
        first, flags = self.odd_flags(lo, hi)
        odd = first + 2 * np.flatnonzero(flags).astype(np.int64)
        if lo <= 2 < hi:
            return np.concatenate([[2], odd]).astype(np.int64)
        return odd

    def count(self, lo: int, hi: int) -> int:
        _, flags = self.odd_flags(lo, hi)
        return int(np.count_nonzero(flags)) + (1 if lo <= 2 < hi else 0)


def _segments(lo: int, hi: int, segment_size: int) -> Iterator[tuple[int, int]]:
    span = 2 * segment_size
    a = lo
    while a < hi:
        b = min(hi, a + span)
        yield a, b
        a = b


def _ordered_map(fn, segments: Sequence[tuple[int, int]], workers: int):
    if workers <= 1:
        return [fn(a, b) for a, b in segments]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), segments))


def primes_between(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                   workers: int = 1) -> np.ndarray:
    """All primes p with lo <= p < hi, ascending."""
    lo = max(lo, 0)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    sv = _Sieve(hi)
    parts = _ordered_map(sv.primes, list(_segments(lo, hi, segment_size)), workers)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def count_between(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                  workers: int = 1) -> int:
    """Number of primes p with lo <= p < hi."""
    lo = max(lo, 0)
    if hi <= lo:
        return 0
    sv = _Sieve(hi)
    segs = list(_segments(lo, hi, segment_size))
    if workers <= 1:
        return sum(sv.count(a, b) for a, b in segs)
    return sum(_ordered_map(sv.count, segs, workers))


# --------------------------------------------------------------------------
# public operations


def primes_upto(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                workers: int = 1) -> PrimeSequence:
    if limit < 2:
        raise DomainError(f"primes_upto needs limit >= 2, got {limit}")
    return PrimeSequence(1, primes_between(2, limit + 1, segment_size, workers))


def prime_count(x: int, segment_size: int = DEFAULT_SEGMENT_SIZE, workers: int = 1) -> int:
    """pi(x) by streaming the sieve; nothing is stored."""
    if x < 2:
        return 0
    return count_between(2, int(x) + 1, segment_size, workers)


def nth_prime_estimate(n: int) -> float:
    """Approximate p_n by inverting the Riemann R staircase."""
    from .unfold import riemann_r_inverse

    if n < 6:
        return (2.0, 3.0, 5.0, 7.0, 11.0)[n - 1] if n >= 1 else 2.0
    return riemann_r_inverse(n)


def first_n_primes(n: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                   workers: int = 1) -> PrimeSequence:
    if n < 1:
        raise DomainError(f"first_n_primes needs n >= 1, got {n}")
    bound = max(16, int(nth_prime_estimate(n) * 1.03) + 1)
    while True:
        values = primes_between(2, bound + 1, segment_size, workers)
        if len(values) >= n:
            return PrimeSequence(1, values[:n])
        bound *= 2


def alternate(seq: PrimeSequence) -> PrimeSequence:
    """Every other prime, keeping the 1st, 3rd, 5th, ... elements."""
    if len(seq) == 0:
        raise DomainError("alternate needs a nonempty sequence")
    return PrimeSequence(seq.start_index, seq.values[::2])


# --------------------------------------------------------------------------
# checkpoints and large-index location

CHECKPOINT_SAMPLE = 10**6
FULL_VERIFY_LIMIT = 10**8


@dataclass(frozen=True)
class Checkpoint:
    """A verified-on-load table of exact prime counts: ``pi(x[i]) == pi[i]``."""

    x: tuple
    pi: tuple

    @classmethod
    def parse(cls, text: str, path=None) -> "Checkpoint":
        xs, pis = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'x<TAB>pi_x'", lineno, path)
            try:
                x, p = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer field in {line!r}", lineno, path) from None
            if x < 2 or p < 1:
                raise ParseError(f"checkpoint ({x}, {p}) out of range", lineno, path)
            if xs and (x <= xs[-1] or p < pis[-1]):
                raise IntegrityError(
                    f"checkpoint line {lineno}: entries must increase in x with "
                    f"nondecreasing pi"
                )
            if xs and p - pis[-1] > (x - xs[-1]) // 2 + 1:
                raise IntegrityError(
                    f"checkpoint line {lineno}: pi increment exceeds the number "
                    f"of odd integers in the gap"
                )
            xs.append(x)
            pis.append(p)
        return cls(tuple(xs), tuple(pis))

    @classmethod
    def load(cls, path) -> "Checkpoint":
        return cls.parse(Path(path).read_text(), path=str(path))

    def best_below_index(self, k: int) -> Optional[tuple[int, int]]:
        """Largest entry whose count does not exceed ``k``."""
        best = None
        for x, p in zip(self.x, self.pi):
            if p <= k:
                best = (x, p)
        return best

    def verify(self, x: int, pi_x: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> None:
        """Check one entry against a local recount; raise IntegrityError.

        Entries up to FULL_VERIFY_LIMIT are recounted from 2. For larger
        entries the 10**6 integers just below ``x`` are sieved: any other entry
        inside that block must agree exactly, and both ``pi(x)`` and the
        implied count at the bottom of the block must lie inside the explicit
        error bound for pi around li.
        """
        if x <= FULL_VERIFY_LIMIT:
            actual = prime_count(x, segment_size)
            if actual != pi_x:
                raise IntegrityError(f"checkpoint pi({x}) = {pi_x} but recount gives {actual}")
            return
        lo = x - CHECKPOINT_SAMPLE
        local = count_between(lo + 1, x + 1, segment_size)
        for x2, p2 in zip(self.x, self.pi):
            if lo <= x2 < x:
                inner = count_between(x2 + 1, x + 1, segment_size)
                if p2 + inner != pi_x:
                    raise IntegrityError(
                        f"checkpoint pi({x}) = {pi_x} contradicts pi({x2}) = {p2} "
                        f"plus {inner} primes recounted between them"
                    )
        for xx, pp in ((x, pi_x), (lo, pi_x - local)):
            if not _within_pi_bound(xx, pp):
                raise IntegrityError(
                    f"checkpoint pi({x}) = {pi_x} with {local} primes recounted in "
                    f"({lo}, {x}] implies pi({xx}) = {pp}, outside the |pi - li| bound"
                )


def _within_pi_bound(x: int, pi_x: int) -> bool:
    # |pi(x) - li(x)| < sqrt(x) log(x) / (8 pi); holds unconditionally well
    # beyond the 2**63 range handled here.
    from .unfold import li

    li_x = li(float(x)) + 1.045163780117492784844588889194613  # li(2)
    return abs(pi_x - li_x) < math.sqrt(x) * math.log(x) / (8 * math.pi)


def primes_after_index(k: int, count: int, checkpoint: Optional[Checkpoint] = None,
                       segment_size: int = DEFAULT_SEGMENT_SIZE,
                       workers: int = 1) -> PrimeSequence:
    """Primes p_{k+1}, ..., p_{k+count}.

    The exact index is established by streaming prime counting up to a point
    safely below p_k (3% under the R-inverse estimate), or from the best
    verified checkpoint, then sieving forward.
    """
    if k < 0 or count < 1:
        raise DomainError(f"primes_after_index needs k >= 0 and count >= 1, got {k}, {count}")
    if k == 0:
        return first_n_primes(count, segment_size, workers)

    base = checkpoint.best_below_index(k) if checkpoint is not None else None
    if base is not None:
        checkpoint.verify(*base, segment_size=segment_size)
        x0, pi0 = base
    else:
        x0 = max(2, int(nth_prime_estimate(k) * 0.97))
        pi0 = prime_count(x0, segment_size, workers)
        while pi0 > k:
            x0 = max(2, int(x0 * 0.9))
            pi0 = prime_count(x0, segment_size, workers)

    # walk forward from x0 (exclusive); the next prime found has index pi0 + 1
    need_first = k + 1 - pi0  # 1-based position of p_{k+1} among primes > x0
    est_hi = nth_prime_estimate(k + count) * 1.03 + 1000
    chunk = max(2 * segment_size, int(est_hi - x0) // 8 + 1)
    sv = _Sieve(int(est_hi) * 2)
    seen = 0
    collected = []
    have = 0
    lo = x0 + 1
    while have < count:
        hi = lo + chunk
        if hi > sv.bound:
            sv = _Sieve(2 * hi)
        segs = list(_segments(lo, hi, segment_size))
        counts = _ordered_map(sv.count, segs, workers)
        for (a, b), c in zip(segs, counts):
            if have >= count:
                break
            if seen + c < need_first:
                seen += c
                continue
            ps = sv.primes(a, b)
            skip = max(0, need_first - 1 - seen)
            take = ps[skip : skip + (count - have)]
            collected.append(take)
            have += len(take)
            seen += len(ps)
        lo = hi
    return PrimeSequence(k + 1, np.concatenate(collected))
