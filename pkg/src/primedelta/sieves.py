"""Segmented sieves for d(n), mu(n), Lambda(n) and primality on [lo, hi)."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import Kernel, njit, resolve_threads
from .errors import DomainError, SizingError

DEFAULT_CAPACITY = 1 << 20
MAX_N = 1 << 63


@lru_cache(maxsize=8)
def _small_primes_cached(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.setflags(write=False)
    return primes


def base_primes(limit: int) -> np.ndarray:
    """Primes up to ``limit`` (inclusive); cached by power-of-two bucket."""
    bucket = 1 << max(limit, 1).bit_length()
    primes = _small_primes_cached(bucket)
    return primes[: np.searchsorted(primes, limit, side="right")]


# -- divisor counts -----------------------------------------------------------
# Each divisor a <= sqrt(n) is paired with n/a: +2 for a < n/a, +1 at a^2 = n.


@njit
def _divisor_counts_nb(lo, hi, out):
    for i in range(hi - lo):
        out[i] = 0
    a = 1
    while a * a < hi:
        start = max(lo, a * a)
        rem = start % a
        if rem:
            start += a - rem
        if start == a * a:
            out[start - lo] += 1
            start += a
        for n in range(start, hi, a):
            out[n - lo] += 2
        a += 1
    return out


def _divisor_counts_np(lo, hi, out):
    out[:] = 0
    a = 1
    while a * a < hi:
        start = max(lo, a * a)
        start += (-start) % a
        if start == a * a:
            out[start - lo] += 1
            start += a
        if start < hi:
            out[start - lo :: a] += 2
        a += 1
    return out


divisor_counts_kernel = Kernel("divisor_counts", _divisor_counts_nb, _divisor_counts_np)


# -- factor sieve: mu, prime-power base/exponent ------------------------------


@njit
def _factor_sieve_nb(lo, hi, primes, mu, base, expo):
    size = hi - lo
    rem = np.empty(size, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int8)
    for i in range(size):
        rem[i] = lo + i
        mu[i] = 1
        base[i] = 0
        expo[i] = 0
    for p in primes:
        if p * p >= hi:
            break
        start = lo + (-lo) % p
        for n in range(start, hi, p):
            i = n - lo
            k = 0
            r = rem[i]
            while r % p == 0:
                r //= p
                k += 1
            rem[i] = r
            omega[i] += 1
            base[i] = p
            expo[i] = k
            if k >= 2:
                mu[i] = 0
            else:
                mu[i] = -mu[i]
    for i in range(size):
        if rem[i] > 1:
            omega[i] += 1
            mu[i] = -mu[i]
            base[i] = rem[i]
            expo[i] = 1
    for i in range(size):
        if omega[i] != 1:
            base[i] = 0
            expo[i] = 0


def _factor_sieve_np(lo, hi, primes, mu, base, expo):
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int8)
    mu[:] = 1
    base[:] = 0
    expo[:] = 0
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        start = (-lo) % p
        if start >= size:
            continue
        sl = slice(start, size, p)
        omega[sl] += 1
        mu[sl] = -mu[sl]
        base[sl] = p
        expo[sl] = 0
        pk = p
        while pk < hi:
            s = (-lo) % pk
            if s >= size:
                break
            sk = slice(s, size, pk)
            rem[sk] //= p
            expo[sk] += 1
            if pk > p:
                mu[sk] = 0
            pk *= p
    big = rem > 1
    omega[big] += 1
    mu[big] = -mu[big]
    base[big] = rem[big]
    expo[big] = 1
    single = omega == 1
    base[~single] = 0
    expo[~single] = 0


factor_sieve_kernel = Kernel("factor_sieve", _factor_sieve_nb, _factor_sieve_np)


@dataclass(frozen=True)
class DivisorSegment:
    """Exact arithmetic-function values for the integers in [lo, hi).

    ``lambda_base[i]``/``lambda_exp[i]`` hold (p, k) when n = p**k and 0/0
    otherwise; Lambda(n) = log p is evaluated on demand so the segment stays
    exact.
    """

    lo: int
    hi: int
    d_values: np.ndarray
    mu_values: np.ndarray
    lambda_base: np.ndarray
    lambda_exp: np.ndarray
    is_prime: np.ndarray

    def __len__(self):
        return self.hi - self.lo

    def index(self, n: int) -> int:
        if not self.lo <= n < self.hi:
            raise IndexError(n)
        return n - self.lo

    def d(self, n: int) -> int:
        return int(self.d_values[self.index(n)])

    def mu(self, n: int) -> int:
        return int(self.mu_values[self.index(n)])

    def von_mangoldt(self, n: int) -> float:
        i = self.index(n)
        p = int(self.lambda_base[i])
        return math.log(p) if p else 0.0

    def lambda_values(self) -> np.ndarray:
        out = np.zeros(len(self), dtype=np.float64)
        mask = self.lambda_base > 0
        out[mask] = np.log(self.lambda_base[mask].astype(np.float64))
        return out


def _check_window(lo: int, hi: int, capacity: int | None) -> None:
    if lo < 1:
        raise DomainError(f"sieve window must start at n >= 1, got lo={lo}")
    if hi <= lo:
        raise DomainError(f"empty window [{lo}, {hi})")
    if hi > MAX_N:
        raise SizingError("sieving beyond 2**63 is not supported")
    if capacity is not None and hi - lo > capacity:
        raise SizingError(
            f"window of {hi - lo} exceeds segment capacity {capacity}; "
            "split the range or raise the capacity"
        )


def divisor_counts(lo: int, hi: int) -> np.ndarray:
    """d(n) for n in [lo, hi) as uint16 (max d(n) below 1e9 is 1344)."""
    _check_window(lo, hi, None)
    out = np.empty(hi - lo, dtype=np.uint16)
    divisor_counts_kernel(lo, hi, out)
    return out


def sieve_segment(lo: int, hi: int, capacity: int = DEFAULT_CAPACITY) -> DivisorSegment:
    _check_window(lo, hi, capacity)
    size = hi - lo
    d_values = np.empty(size, dtype=np.uint16)
    divisor_counts_kernel(lo, hi, d_values)
    mu = np.empty(size, dtype=np.int8)
    base = np.empty(size, dtype=np.int64)
    expo = np.empty(size, dtype=np.int8)
    factor_sieve_kernel(lo, hi, base_primes(math.isqrt(hi - 1) + 1), mu, base, expo)
    is_prime = (expo == 1) & (base > 0)
    for arr in (d_values, mu, base, expo, is_prime):
        arr.setflags(write=False)
    return DivisorSegment(lo, hi, d_values, mu, base, expo, is_prime)


def iter_windows(lo: int, hi: int, size: int):
    for a in range(lo, hi, size):
        yield a, min(a + size, hi)


def map_windows(fn, lo: int, hi: int, size: int, threads: int | None = None, prefetch: int = 4):
    """Yield ``fn(a, b)`` for consecutive windows, in window order.

    Windows are computed by up to ``threads`` workers (the jitted kernels
    release the GIL) while results are consumed strictly in order, so the
    output never depends on the worker count.
    """
    workers = resolve_threads(threads)
    windows = iter_windows(lo, hi, size)
    if workers == 1:
        for a, b in windows:
            yield fn(a, b)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending = []
        for a, b in windows:
            pending.append(pool.submit(fn, a, b))
            if len(pending) > workers * prefetch:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


def _prime_window(lo: int, hi: int) -> np.ndarray:
    flags = np.ones(hi - lo, dtype=bool)
    if lo < 2:
        flags[: 2 - lo] = False
    for p in base_primes(math.isqrt(hi - 1)):
        p = int(p)
        start = max(p * p, lo + (-lo) % p)
        if start < hi:
            flags[start - lo :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo


def primes_in(lo: int, hi: int, threads: int | None = None) -> np.ndarray:
    """The primes in [lo, hi), ascending."""
    if lo < 1 or hi <= lo:
        raise DomainError(f"invalid range [{lo}, {hi})")
    if hi > MAX_N:
        raise SizingError("sieving beyond 2**63 is not supported")
    parts = list(map_windows(_prime_window, lo, hi, DEFAULT_CAPACITY * 4, threads))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
