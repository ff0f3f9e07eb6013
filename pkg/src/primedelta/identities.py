"""Heath-Brown's identity for the von Mangoldt function.

For n <= 2 z^k,

    Lambda(n) = sum_{j=1}^{k} (-1)^{j-1} C(k, j)
                sum_{n_1 ... n_{2j} = n, n_{j+1}, ..., n_{2j} <= z}
                (log n_1) mu(n_{j+1}) ... mu(n_{2j}).

Grouping on n_1 turns the right side into sum_{m | n} log(m) W(n/m) with an
integer weight W, so every log(m) splits into exact integer multiples of
log p and the comparison with Lambda(n) is exact up to the final fsum.
"""

from __future__ import annotations

import math
from collections import defaultdict
from functools import lru_cache

import numpy as np

from ._backend import Kernel, njit
from .errors import BudgetExceeded, PreconditionError
from .sieves import sieve_segment

MAX_VERIFY_N = 10**6


def _check_range(n_max: int, k: int, z: float) -> None:
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    if z < 1:
        raise PreconditionError(f"z must be >= 1, got {z}")
    if n_max > 2 * z**k:
        raise PreconditionError(
            f"n={n_max} lies outside the validity range n <= 2 z^k = {2 * z**k:g}"
        )


def minimal_admissible_z(n_max: int, k: int) -> float:
    """Smallest double z >= 1 with n_max <= 2 z^k."""
    z = max(1.0, (n_max / 2) ** (1.0 / k))
    while n_max > 2 * z**k:
        z = math.nextafter(z, math.inf)
    while z > 1.0 and n_max <= 2 * math.nextafter(z, 0.0) ** k:
        z = math.nextafter(z, 0.0)
    return z


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _divisors(fac: dict[int, int]) -> list[int]:
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _mobius(m: int) -> int:
    fac = _factorize(m)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def _weights_on_divisors(n: int, k: int, z: float) -> dict[int, int]:
    """W(r) for every r | n, by recursion over the divisor lattice of n.

    W = sum_j (-1)^{j-1} C(k, j) (1^{*(j-1)} * mu_z^{*j}) where mu_z is mu
    cut off at z; the (j-1) unrestricted factors n_2 .. n_j give 1^{*(j-1)}.
    """
    divs = _divisors(_factorize(n))
    mu_z = {r: (_mobius(r) if r <= z else 0) for r in divs}
    sub = {r: [e for e in divs if r % e == 0] for r in divs}

    def convolve(f, g):
        return {r: sum(f[e] * g[r // e] for e in sub[r]) for r in divs}

    one = {r: 1 for r in divs}
    delta_fn = {r: int(r == 1) for r in divs}
    weights = {r: 0 for r in divs}
    ones_pow = delta_fn  # 1^{*(j-1)}
    mu_pow = mu_z  # mu_z^{*j}
    for j in range(1, k + 1):
        term = convolve(ones_pow, mu_pow)
        sign = math.comb(k, j) * (-1) ** (j - 1)
        for r in divs:
            weights[r] += sign * term[r]
        ones_pow = convolve(ones_pow, one)
        mu_pow = convolve(mu_pow, mu_z)
    return weights


def heath_brown_log_coefficients(n: int, k: int, z: float) -> dict[int, int]:
    """Integer c_p with rhs(n) = sum_p c_p log p (zero entries dropped)."""
    _check_range(n, k, z)
    if n == 1:
        return {}
    weights = _weights_on_divisors(n, k, z)
    coeffs: dict[int, int] = defaultdict(int)
    for m, w in ((m, weights[n // m]) for m in weights):
        if w == 0 or m == 1:
            continue
        for p, e in _factorize(m).items():
            coeffs[p] += e * w
    return {p: c for p, c in sorted(coeffs.items()) if c}


def heath_brown_rhs(n: int, k: int, z: float) -> float:
    """Right-hand side of the identity at a single n."""
    coeffs = heath_brown_log_coefficients(n, k, z)
    return math.fsum(c * _log(p) for p, c in coeffs.items())


@lru_cache(maxsize=None)
def _log(p: int) -> float:
    return math.log(p)


def heath_brown_rhs_naive(n: int, k: int, z: float) -> float:
    """Literal enumeration of ordered 2j-factorisations (small n only)."""
    _check_range(n, k, z)

    def factorizations(m, parts):
        if parts == 1:
            yield (m,)
            return
        for a in range(1, m + 1):
            if m % a == 0:
                for rest in factorizations(m // a, parts - 1):
                    yield (a,) + rest

    total = 0.0
    for j in range(1, k + 1):
        inner = 0.0
        for fac in factorizations(n, 2 * j):
            tail = fac[j:]
            if any(t > z for t in tail):
                continue
            prod = 1
            for t in tail:
                prod *= _mobius(t)
            if prod:
                inner += math.log(fac[0]) * prod
        total += (-1) ** (j - 1) * math.comb(k, j) * inner
    return total


# -- whole-range verification via Dirichlet convolution of integer arrays ------


@njit
def _dirichlet_nb(f, g, out):
    n_max = f.shape[0] - 1
    for i in range(n_max + 1):
        out[i] = 0
    for a in range(1, n_max + 1):
        fa = f[a]
        if fa == 0:
            continue
        for b in range(1, n_max // a + 1):
            out[a * b] += fa * g[b]
    return out


def _dirichlet_np(f, g, out):
    n_max = f.shape[0] - 1
    out[:] = 0
    for a in np.flatnonzero(f[1:]) + 1:
        m = n_max // a
        out[a : a * m + 1 : a] += f[a] * g[1 : m + 1]
    return out


dirichlet_kernel = Kernel("dirichlet", _dirichlet_nb, _dirichlet_np)


@njit
def _log_convolve_nb(logs, w, out):
    n_max = w.shape[0] - 1
    comp = np.zeros(n_max + 1)
    for i in range(n_max + 1):
        out[i] = 0.0
    for m in range(2, n_max + 1):
        lm = logs[m]
        for q in range(1, n_max // m + 1):
            wq = w[q]
            if wq != 0:
                i = m * q
                term = lm * wq
                t = out[i] + term
                if abs(out[i]) >= abs(term):
                    comp[i] += (out[i] - t) + term
                else:
                    comp[i] += (term - t) + out[i]
                out[i] = t
    for i in range(n_max + 1):
        out[i] += comp[i]
    return out


def _log_convolve_np(logs, w, out):
    n_max = w.shape[0] - 1
    out[:] = 0.0
    for m in range(2, n_max + 1):
        q = n_max // m
        out[m : m * q + 1 : m] += logs[m] * w[1 : q + 1]
    return out


log_convolve_kernel = Kernel("log_convolve", _log_convolve_nb, _log_convolve_np)


def heath_brown_weights(n_max: int, k: int, z: float) -> np.ndarray:
    """Integer weight W(r) for r = 0..n_max (index 0 unused)."""
    seg = sieve_segment(1, n_max + 1, capacity=MAX_VERIFY_N)
    mu_z = np.zeros(n_max + 1, dtype=np.int64)
    cut = min(n_max, math.floor(z))
    mu_z[1 : cut + 1] = seg.mu_values[:cut]
    ones = np.zeros(n_max + 1, dtype=np.int64)
    ones[1:] = 1
    ones_pow = np.zeros(n_max + 1, dtype=np.int64)
    ones_pow[1] = 1
    mu_pow = mu_z.copy()
    weights = np.zeros(n_max + 1, dtype=np.int64)
    buf = np.empty(n_max + 1, dtype=np.int64)
    for j in range(1, k + 1):
        dirichlet_kernel(ones_pow, mu_pow, buf)
        weights += math.comb(k, j) * (-1) ** (j - 1) * buf
        if j < k:
            ones_pow = dirichlet_kernel(ones_pow, ones, np.empty_like(buf))
            mu_pow = dirichlet_kernel(mu_pow, mu_z, np.empty_like(buf))
    return weights


def heath_brown_table(n_max: int, k: int, z: float) -> np.ndarray:
    """Right-hand side for every n <= n_max (index 0 unused)."""
    _check_range(n_max, k, z)
    if n_max > MAX_VERIFY_N:
        raise BudgetExceeded(f"n_max={n_max} exceeds the verification budget {MAX_VERIFY_N}")
    weights = heath_brown_weights(n_max, k, z)
    logs = np.zeros(n_max + 1)
    logs[1:] = np.log(np.arange(1, n_max + 1, dtype=np.float64))
    return log_convolve_kernel(logs, weights, np.empty(n_max + 1))


def verify_heath_brown(n_max: int, k: int, z: float) -> float:
    """max_{n <= n_max} |rhs(n) - Lambda(n)|."""
    rhs = heath_brown_table(n_max, k, z)
    lam = sieve_segment(1, n_max + 1, capacity=MAX_VERIFY_N).lambda_values()
    return float(np.max(np.abs(rhs[1:] - lam)))
