"""Truncated Voronoi expansion of Delta(x) and its residual."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dd
from ._backend import Kernel, njit
from .errors import DomainError
from .sieves import divisor_counts
from .summatory import delta, divisor_summatory, delta_values

_PREFACTOR = 1.0 / (math.sqrt(2.0) * math.pi)


@njit
def _voronoi_nb(xs, d_table, n_terms, out):
    # d_table[k] = d(k + 1)
    for i in range(xs.shape[0]):
        x = xs[i]
        acc = 0.0
        comp = 0.0
        for k in range(n_terms):
            n = k + 1.0
            h, l = dd.dd_sqrt_prod(n, x)
            # 4 pi sqrt(nx) mod 2 pi = 2 pi * frac(2 sqrt(nx))
            f = dd.frac_dd(2.0 * h, 2.0 * l)
            term = d_table[k] * n ** -0.75 * np.cos(2.0 * np.pi * f - 0.25 * np.pi)
            t = acc + term
            if abs(acc) >= abs(term):
                comp += (acc - t) + term
            else:
                comp += (term - t) + acc
            acc = t
        out[i] = x ** 0.25 * _PREFACTOR * (acc + comp)
    return out


def _voronoi_np(xs, d_table, n_terms, out):
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    weights = d_table[:n_terms] * n ** -0.75
    for i in range(xs.shape[0]):
        x = xs[i]
        h, l = dd.dd_sqrt_prod(n, np.full(n_terms, x))
        f = dd.frac_dd(2.0 * h, 2.0 * l)
        terms = weights * np.cos(2.0 * np.pi * f - 0.25 * np.pi)
        out[i] = x ** 0.25 * _PREFACTOR * math.fsum(terms)
    return out


voronoi_kernel = Kernel("voronoi", _voronoi_nb, _voronoi_np)


def _check(x: float, n_terms: int) -> None:
    if not x >= 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if n_terms < 1 or n_terms > x:
        raise DomainError(f"truncation N={n_terms} must satisfy 1 <= N <= x={x}")


def _d_table(n_terms: int) -> np.ndarray:
    return divisor_counts(1, n_terms + 1).astype(np.float64)


def delta1_many(xs, n_terms: int) -> np.ndarray:
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    for x in (xs.min(), xs.max()):
        _check(float(x), n_terms)
    out = np.empty(xs.shape[0], dtype=np.float64)
    return voronoi_kernel(xs, _d_table(n_terms), n_terms, out)


def delta1(x: float, n_terms: int) -> float:
    """(x^{1/4} / (sqrt2 pi)) sum_{n<=N} d(n) n^{-3/4} cos(4 pi sqrt(nx) - pi/4)."""
    _check(x, n_terms)
    return float(delta1_many(np.array([float(x)]), n_terms)[0])


def delta1_naive(x: float, n_terms: int) -> float:
    """Reference loop: plain double phase, divisor counts by trial division."""
    total = 0.0
    for n in range(1, n_terms + 1):
        dn = sum(1 for k in range(1, n + 1) if n % k == 0)
        total += dn * n ** -0.75 * math.cos(4 * math.pi * math.sqrt(n * x) - math.pi / 4)
    return x ** 0.25 * _PREFACTOR * total


@dataclass(frozen=True)
class VoronoiEval:
    x: float
    n_trunc: int
    delta1: float
    delta2: float
    sup_ratio: float


def delta2(x: float, n_terms: int, quarter: bool = True) -> VoronoiEval:
    """Residual Delta(x) - delta1(x, N) and |delta2| / (x^{1/2} N^{-1/2})."""
    d1 = delta1(x, n_terms)
    d2 = delta(x, quarter) - d1
    return VoronoiEval(float(x), n_terms, d1, d2, abs(d2) / math.sqrt(x / n_terms))


@dataclass(frozen=True)
class ResidualStats:
    T: int
    n_trunc: int
    samples: int
    sup_ratio_max: float
    mean_first_power: float
    mean_square: float
    bound: float


def residual_grid(T: int, samples: int) -> np.ndarray:
    if samples == 1:
        return np.array([float(T)])
    return T + T * np.arange(samples, dtype=np.float64) / (samples - 1)


def delta2_many(xs: np.ndarray, n_terms: int, quarter: bool = True) -> np.ndarray:
    counts = np.array([divisor_summatory(int(math.floor(x))) for x in xs], dtype=np.float64)
    return delta_values(counts, xs, quarter) - delta1_many(xs, n_terms)


def voronoi_residual_stats(T: int, n_terms: int, samples: int, quarter: bool = True) -> ResidualStats:
    """Sup ratio and trapezoid integrals of delta2 and delta2^2 over [T, 2T].

    Both integrals are divided by T^{3/2} log^3 T / N^{1/2} + T log^4 T.  A
    single sample degenerates to the point value (integrals by the rectangle
    T * f(T)).
    """
    if T < 2:
        raise DomainError("T must be >= 2")
    if samples < 1:
        raise DomainError("samples must be >= 1")
    xs = residual_grid(T, samples)
    r = delta2_many(xs, n_terms, quarter)
    sup = float(np.max(np.abs(r) / np.sqrt(xs / n_terms)))
    if samples == 1:
        first, square = r[0] * T, r[0] ** 2 * T
    else:
        first = float(np.trapezoid(r, xs))
        square = float(np.trapezoid(r * r, xs))
    log_t = math.log(T)
    bound = T ** 1.5 * log_t ** 3 / math.sqrt(n_terms) + T * log_t ** 4
    return ResidualStats(T, n_terms, samples, sup, first / bound, square / bound, bound)
