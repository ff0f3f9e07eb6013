"""Exact D(x) = sum_{n<=x} d(n) and the error term Delta(x).

Delta(x) = D(x) - x log x - (2 gamma - 1) x - 1/4 by default.  The smooth part
is evaluated in double-double so the cancellation against D(x) (about 2e10 vs
1e3 near x = 1e9) costs nothing; the result is Delta rounded to a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import dd
from ._backend import Kernel, njit
from .errors import BudgetExceeded, DomainError, SizingError
from .sieves import DEFAULT_CAPACITY, divisor_counts_kernel, map_windows

QUARTER = 0.25
# D(x) < x (log x + 1) must stay below 2**53 to be held exactly in a double
MAX_STREAM_X = 200_000_000_000_000
MAX_HYPERBOLA_X = 10**17
_HYPERBOLA_CHUNK = 1 << 22


def quarter_value(quarter: bool) -> float:
    return QUARTER if quarter else 0.0


def divisor_summatory(x: int) -> int:
    """D(x) by the hyperbola method: 2 sum_{n<=sqrt x} floor(x/n) - floor(sqrt x)^2."""
    x = int(x)
    if x < 1:
        raise DomainError(f"D(x) needs x >= 1, got {x}")
    if x > MAX_HYPERBOLA_X:
        raise BudgetExceeded(f"D(x) needs x <= {MAX_HYPERBOLA_X:.0e}, got {x}")
    r = math.isqrt(x)
    total = 0
    for lo in range(1, r + 1, _HYPERBOLA_CHUNK):
        n = np.arange(lo, min(lo + _HYPERBOLA_CHUNK, r + 1), dtype=np.int64)
        # each chunk sum is at most x log(chunk + 1) < 2**63 for x <= 1e17
        total += int((x // n).sum())
    return 2 * total - r * r


@njit
def _delta_kernel_nb(big_d, x, quarter, out):
    for i in range(x.shape[0]):
        out[i] = dd.delta_from_count(big_d[i], x[i], quarter)
    return out


def _delta_kernel_np(big_d, x, quarter, out):
    out[:] = dd.delta_from_count(big_d, x, quarter)
    return out


delta_kernel = Kernel("delta", _delta_kernel_nb, _delta_kernel_np)


def delta_values(big_d: np.ndarray, x: np.ndarray, quarter: bool = True) -> np.ndarray:
    """Vectorised Delta from exact counts ``big_d`` = D(floor x)."""
    big_d = np.ascontiguousarray(big_d, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.float64)
    return delta_kernel(big_d, x, quarter_value(quarter), out)


@dataclass(frozen=True)
class DeltaSample:
    x: float
    big_d: int
    delta: float
    quarter_convention: bool = True


def delta(x: float, quarter: bool = True) -> float:
    """Delta(x) for real x >= 1; D is taken at floor(x)."""
    if not x >= 1:
        raise DomainError(f"Delta(x) needs x >= 1, got {x}")
    xf = float(x)
    big_d = divisor_summatory(math.floor(xf))
    if big_d >= 1 << 53:
        raise SizingError("D(x) exceeds the exactly representable range")
    return float(delta_values(np.array([big_d]), np.array([xf]), quarter)[0])


def delta_sample(x: float, quarter: bool = True) -> DeltaSample:
    xf = float(x)
    if not xf >= 1:
        raise DomainError(f"Delta(x) needs x >= 1, got {x}")
    big_d = divisor_summatory(math.floor(xf))
    value = float(delta_values(np.array([big_d]), np.array([xf]), quarter)[0])
    return DeltaSample(xf, big_d, value, quarter)


@dataclass(frozen=True)
class DeltaBlock:
    """Consecutive samples n = lo .. hi-1 of a Delta stream."""

    lo: int
    hi: int
    d_values: np.ndarray
    big_d: np.ndarray
    delta: np.ndarray
    quarter_convention: bool

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    def samples(self) -> Iterator[DeltaSample]:
        for i, n in enumerate(range(self.lo, self.hi)):
            yield DeltaSample(float(n), int(self.big_d[i]), float(self.delta[i]), self.quarter_convention)


def _check_stream(x_max: int, segment_size: int) -> None:
    if x_max < 1:
        raise DomainError(f"x_max must be >= 1, got {x_max}")
    if segment_size < 1 or segment_size > 1 << 26:
        raise SizingError(f"segment size {segment_size} outside [1, 2**26]")
    if x_max > MAX_STREAM_X:
        raise SizingError(
            f"x_max={x_max} would push D(x) past 2**53; exact streaming stops at {MAX_STREAM_X}"
        )


def _sieve_window(lo, hi):
    d = np.empty(hi - lo, dtype=np.uint16)
    divisor_counts_kernel(lo, hi, d)
    return lo, hi, d


def delta_stream(
    x_max: int,
    segment_size: int = DEFAULT_CAPACITY,
    quarter: bool = True,
    start: int = 1,
    threads: int | None = None,
) -> Iterator[DeltaBlock]:
    """Delta(n) for every n = start .. x_max, in ascending blocks.

    Divisor counts are sieved per window (possibly in parallel) and folded
    into a running exact D(n) in window order.  Each value equals the
    per-point ``delta(n)`` bit for bit.
    """
    q = quarter_value(quarter)
    for lo, hi, d, big_d in count_stream(x_max, segment_size, start, threads):
        n = np.arange(lo, hi, dtype=np.float64)
        values = np.empty(hi - lo, dtype=np.float64)
        delta_kernel(big_d.astype(np.float64), n, q, values)
        yield DeltaBlock(lo, hi, d, big_d, values, quarter)


def count_stream(
    x_max: int,
    segment_size: int = DEFAULT_CAPACITY,
    start: int = 1,
    threads: int | None = None,
) -> Iterator[tuple[int, int, np.ndarray, np.ndarray]]:
    """(lo, hi, d(n), D(n)) for n in [lo, hi), ascending windows covering start .. x_max.

    D is the running exact accumulator (int64), seeded by the hyperbola
    method when ``start > 1``.
    """
    _check_stream(x_max, segment_size)
    if start < 1:
        raise DomainError("stream must start at n >= 1")
    if start > x_max:
        return
    running = divisor_summatory(start - 1) if start > 1 else 0
    for lo, hi, d in map_windows(_sieve_window, start, x_max + 1, segment_size, threads):
        big_d = np.cumsum(d, dtype=np.int64)
        big_d += running
        running = int(big_d[-1])
        yield lo, hi, d, big_d


def iter_delta_samples(x_max: int, segment_size: int = DEFAULT_CAPACITY, quarter: bool = True) -> Iterator[DeltaSample]:
    for block in delta_stream(x_max, segment_size, quarter):
        yield from block.samples()


def delta_array(x_max: int, quarter: bool = True, segment_size: int = DEFAULT_CAPACITY,
                threads: int | None = None) -> np.ndarray:
    """Delta(n) for n = 1..x_max in one array (index 0 holds n = 1)."""
    out = np.empty(x_max, dtype=np.float64)
    for block in delta_stream(x_max, segment_size, quarter, threads=threads):
        out[block.lo - 1 : block.hi - 1] = block.delta
    return out
