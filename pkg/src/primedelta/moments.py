"""Mean values of Delta: the constant C, continuous and discrete mean squares,
the discrete/continuous difference, a shifted moment, and the sum of
Delta^2 over primes against its main term."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from ._backend import Kernel, njit
from .csvio import format_row
from .dd import EULER_GAMMA, Neumaier
from .errors import BudgetExceeded, CheckpointError, DomainError, PreconditionError
from .sieves import DEFAULT_CAPACITY, divisor_counts, iter_windows
from .summatory import delta, delta_stream, divisor_summatory, quarter_value

GAMMA = float(EULER_GAMMA)
MAX_CONTINUOUS_T = 10**8
MAX_DISCRETE_X = 10**8
MAX_FURUYA_X = 10**7
MAX_SHIFT_T = 10**7
MAX_SHIFT_WORK = 2 * 10**9
MAX_SWEEP_X = 10**9
HUXLEY_EXP = 131 / 416
HUXLEY_LOG_EXP = 26497 / 8320
ERROR_EXP = 23 / 16


# -- the constant C = sum d(n)^2 n^{-3/2} = zeta(3/2)^4 / zeta(3) -------------------


def zeta_euler_maclaurin(s, dps: int = 40, cutoff: int = 30, terms: int = 30):
    """zeta(s) for real s > 1 by Euler-Maclaurin, at ``dps`` digits."""
    with mpmath.workdps(dps + 10):
        s = mpmath.mpf(s)
        N = mpmath.mpf(cutoff)
        total = mpmath.fsum(mpmath.mpf(n) ** -s for n in range(1, cutoff))
        total += N ** (1 - s) / (s - 1) + N**-s / 2
        rising = s  # s (s+1) ... (s+2k-2)
        for k in range(1, terms + 1):
            total += mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * rising * N ** (-s - 2 * k + 1)
            rising *= (s + 2 * k - 1) * (s + 2 * k)
        return +total


@lru_cache(maxsize=None)
def mean_square_constant() -> float:
    """zeta(3/2)^4 / zeta(3), correctly rounded from 40 digits."""
    with mpmath.workdps(40):
        return float(zeta_euler_maclaurin(1.5) ** 4 / zeta_euler_maclaurin(3))


@lru_cache(maxsize=None)
def _square_count_polynomial() -> tuple[float, ...]:
    """Coefficients P_j with sum_{n<=t} d(n)^2 ~ t sum_j P_j log^j t.

    Residue of zeta(s)^4 t^s / (zeta(2s) s) at s = 1, from the Laurent data of
    (s-1) zeta(s) (Stieltjes constants) and the Taylor series of 1/zeta(2s).
    """
    with mpmath.workdps(30):
        g = [mpmath.stieltjes(k) for k in range(4)]
        z1 = [mpmath.mpf(1)] + [(-1) ** k * g[k] / mpmath.factorial(k) for k in range(3)]

        def mul(a, b):
            return [mpmath.fsum(a[i] * b[j - i] for i in range(j + 1)) for j in range(4)]

        z4 = mul(mul(z1, z1), mul(z1, z1))
        inv2 = mpmath.taylor(lambda s: 1 / mpmath.zeta(2 * s), 1, 3)
        h = mul(mul(z4, inv2), [(-1) ** j for j in range(4)])
        return tuple(float(h[3 - j] / mpmath.factorial(j)) for j in range(4))


def _log_moments(N: float, shift: float, degree: int) -> list[float]:
    # I_j = int_N^inf t^{-3/2} (shift + log t)^j dt = 2 N^{-1/2} L^j + 2 j I_{j-1}
    L = shift + math.log(N)
    out = [2.0 / math.sqrt(N)]
    for j in range(1, degree + 1):
        out.append(2.0 / math.sqrt(N) * L**j + 2.0 * j * out[-1])
    return out


@dataclass(frozen=True)
class ConstantC:
    n_terms: int
    partial: float
    tail_estimate: float
    value: float
    tail_bound: float
    oracle: float

    @property
    def difference(self) -> float:
        return self.value - self.oracle


def constant_C(n_terms: int, segment_size: int = DEFAULT_CAPACITY) -> ConstantC:
    """C from the first n_terms terms plus the tail.

    ``tail_estimate`` is the smoothed tail -A(N) N^{-3/2} + (3/2) int_N^inf M(t) t^{-5/2} dt
    with A(N) the exact partial count of d^2 and M(t) its asymptotic main term.
    ``tail_bound`` is a proven majorant of the tail: d^2 <= d_4 and
    sum_{n<=t} d_4(n) <= t (1 + log t)^3.
    """
    if n_terms < 1000:
        raise DomainError("n_terms must be >= 1000")
    if n_terms > MAX_SWEEP_X:
        raise BudgetExceeded(f"n_terms exceeds {MAX_SWEEP_X}")
    sums = []
    count = 0
    for lo, hi in iter_windows(1, n_terms + 1, segment_size):
        d = divisor_counts(lo, hi).astype(np.int64)
        sq = d * d
        count += int(sq.sum())
        n = np.arange(lo, hi, dtype=np.float64)
        sums.extend((sq / (n * np.sqrt(n))).tolist())
    partial = math.fsum(sums)
    N = float(n_terms)
    P = _square_count_polynomial()
    I = _log_moments(N, 0.0, 3)
    tail = -count * N**-1.5 + 1.5 * math.fsum(P[j] * I[j] for j in range(4))
    bound = 1.5 * _log_moments(N, 1.0, 3)[3]
    return ConstantC(n_terms, partial, tail, partial + tail, bound, mean_square_constant())


# -- continuous mean square ---------------------------------------------------------

_SERIES_FROM = 64
_SERIES_TERMS = 11
_GL5_X, _GL5_W = np.polynomial.legendre.leggauss(5)


def _interval_exact(n: int, big_d: int, quarter: bool) -> float:
    """int_n^{n+1} (A - t log t - B t)^2 dt from closed-form antiderivatives."""
    with mpmath.workdps(40):
        A = mpmath.mpf(big_d) - (mpmath.mpf(1) / 4 if quarter else 0)
        B = 2 * mpmath.mpf(EULER_GAMMA) - 1

        def F(t):
            t = mpmath.mpf(t)
            L = mpmath.log(t)
            t2, t3 = t * t, t * t * t
            return (
                A * A * t
                - 2 * A * (t2 * L / 2 - t2 / 4)
                - A * B * t2
                + (t3 * L * L / 3 - 2 * t3 * L / 9 + 2 * t3 / 27)
                + 2 * B * (t3 * L / 3 - t3 / 9)
                + B * B * t3 / 3
            )

        return float(F(n + 1) - F(n))


def _interval_series(n: np.ndarray, delta_n: np.ndarray) -> np.ndarray:
    # Delta(n + u) = sum_j a_j u^j on [0, 1); integrate the square termwise
    a = [delta_n, -(np.log(n) + 2.0 * GAMMA)]
    for j in range(2, _SERIES_TERMS):
        a.append(-((-1.0) ** j) / (j * (j - 1)) * n ** (1.0 - j))
    out = np.zeros_like(delta_n)
    for j in range(_SERIES_TERMS - 1, -1, -1):
        for k in range(_SERIES_TERMS - 1, -1, -1):
            out += a[j] * a[k] / (j + k + 1)
    return out


def _interval_quadrature(n: np.ndarray, delta_n: np.ndarray) -> np.ndarray:
    out = np.zeros_like(delta_n)
    log_n = np.log(n) + 2.0 * GAMMA
    for x, w in zip(_GL5_X, _GL5_W):
        u = 0.5 * (x + 1.0)
        e = (n + u) * np.log1p(u / n) - u
        out += 0.5 * w * (delta_n - u * log_n - e) ** 2
    return out


def _continuous(T: int, quarter: bool, method: str, segment_size: int, threads) -> float:
    if T < 1:
        raise DomainError("T must be >= 1")
    if T > MAX_CONTINUOUS_T:
        raise BudgetExceeded(f"T exceeds {MAX_CONTINUOUS_T}")
    if T == 1:
        return 0.0
    parts = []
    for block in delta_stream(T - 1, segment_size, quarter, threads=threads):
        n = block.n
        if method == "closed":
            small = n < _SERIES_FROM
            for i in np.flatnonzero(small):
                parts.append(_interval_exact(int(n[i]), int(block.big_d[i]), quarter))
            big = ~small
            parts.extend(_interval_series(n[big], block.delta[big]).tolist())
        else:
            parts.extend(_interval_quadrature(n, block.delta).tolist())
    return math.fsum(parts)


def continuous_mean_square(T: int, quarter: bool = True, segment_size: int = DEFAULT_CAPACITY,
                           threads: int | None = None) -> float:
    """int_1^T Delta(t)^2 dt, exact per unit interval."""
    return _continuous(T, quarter, "closed", segment_size, threads)


def continuous_mean_square_quadrature(T: int, quarter: bool = True, segment_size: int = DEFAULT_CAPACITY,
                                      threads: int | None = None) -> float:
    """Same integral by 5-point Gauss-Legendre on each unit interval."""
    return _continuous(T, quarter, "quadrature", segment_size, threads)


# -- discrete mean square and the difference formula -----------------------------------


def discrete_mean_square(x: int, quarter: bool = True, segment_size: int = DEFAULT_CAPACITY,
                         threads: int | None = None) -> float:
    """sum_{n<=x} Delta(n)^2, correctly rounded (independent of segmentation)."""
    if x < 1:
        raise DomainError("x must be >= 1")
    if x > MAX_DISCRETE_X:
        raise BudgetExceeded(f"x exceeds {MAX_DISCRETE_X}")
    blocks = delta_stream(x, segment_size, quarter, threads=threads)
    return math.fsum(itertools.chain.from_iterable((b.delta * b.delta).tolist() for b in blocks))


FURUYA_LOG2 = 1.0 / 6.0
FURUYA_LOG1 = (8.0 * GAMMA - 1.0) / 12.0
FURUYA_LOG0 = (8.0 * GAMMA * GAMMA - 2.0 * GAMMA + 1.0) / 12.0


@dataclass(frozen=True)
class FuruyaResult:
    x: int
    discrete: float
    continuous: float
    residual: float
    normalized: float


def furuya_check(x: int, segment_size: int = DEFAULT_CAPACITY, threads: int | None = None) -> FuruyaResult:
    """D_2(x) - C_2(x) minus its three secondary terms, also over x^{3/4} log x.

    Both mean squares use Delta without the 1/4 shift: the secondary
    coefficients belong to that normalisation.
    """
    if x < 1:
        raise DomainError("x must be >= 1")
    if x > MAX_FURUYA_X:
        raise BudgetExceeded(f"x exceeds {MAX_FURUYA_X}")
    d2 = discrete_mean_square(x, False, segment_size, threads)
    c2 = continuous_mean_square(x, False, segment_size, threads)
    L = math.log(x)
    residual = math.fsum([d2, -c2, -FURUYA_LOG2 * x * L * L, -FURUYA_LOG1 * x * L, -FURUYA_LOG0 * x])
    normalized = residual / (x**0.75 * L) if x > 1 else math.nan
    return FuruyaResult(x, d2, c2, residual, normalized)


# -- shifted moment ------------------------------------------------------------------


@njit
def _shift_max_nb(values, count, hmax, out):
    for i in range(count):
        best = 0.0
        base = values[i]
        for h in range(1, hmax + 1):
            diff = values[i + h] - base
            sq = diff * diff
            if sq > best:
                best = sq
        out[i] = best
    return out


def _shift_max_np(values, count, hmax, out):
    out[:] = 0.0
    base = values[:count]
    for h in range(1, hmax + 1):
        diff = values[h : h + count] - base
        np.maximum(out, diff * diff, out=out)
    return out


shift_max_kernel = Kernel("shift_max", _shift_max_nb, _shift_max_np)


def _check_shift(T: int, Hmax: int) -> None:
    if T < 2:
        raise DomainError("T must be >= 2")
    if T > MAX_SHIFT_T:
        raise BudgetExceeded(f"T exceeds {MAX_SHIFT_T}")
    if not 1 <= Hmax <= T:
        raise DomainError("need 1 <= Hmax <= T")
    if T * Hmax > MAX_SHIFT_WORK:
        raise BudgetExceeded(f"T*Hmax exceeds {MAX_SHIFT_WORK}")


def shifted_delta_sum(T: int, Hmax: int, threads: int | None = None) -> float:
    """sum_{T<n<=2T} max_{1<=h<=Hmax} (Delta(n+h) - Delta(n))^2."""
    _check_shift(T, Hmax)
    values = np.concatenate([b.delta for b in delta_stream(2 * T + Hmax, start=T + 1, threads=threads)])
    out = np.empty(T, dtype=np.float64)
    shift_max_kernel(values, T, Hmax, out)
    return math.fsum(out.tolist())


def shifted_delta_moment(T: int, Hmax: int, threads: int | None = None) -> float:
    """The shifted sum divided by Hmax T log^5 T."""
    return shifted_delta_sum(T, Hmax, threads) / (Hmax * T * math.log(T) ** 5)


def shifted_delta_sum_naive(T: int, Hmax: int) -> float:
    total = []
    for n in range(T + 1, 2 * T + 1):
        base = delta(n)
        total.append(max((delta(n + h) - base) ** 2 for h in range(1, Hmax + 1)))
    return math.fsum(total)


# -- sum of Delta^2 over primes --------------------------------------------------------

SWEEP_HEADER = ("x", "S", "main", "ratio", "scaled_error", "sup_huxley_ratio")
_FOLD_CHUNK = 1 << 16


@dataclass(frozen=True)
class SweepRow:
    x: int
    S: float
    main: float
    sup_huxley_ratio: float

    @property
    def ratio(self) -> float | None:
        return self.S / self.main if self.main > 0 else None

    @property
    def scaled_error(self) -> float:
        return (self.S - self.main) / self.x**ERROR_EXP

    def fields(self) -> tuple:
        return (self.x, self.S, self.main, self.ratio, self.scaled_error, self.sup_huxley_ratio)

    def csv_line(self) -> str:
        return format_row(self.fields())


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    quarter_convention: bool = True

    def to_csv(self) -> str:
        return ",".join(SWEEP_HEADER) + "\n" + "".join(r.csv_line() for r in self.rows)

    def row(self, x: int) -> SweepRow:
        for r in self.rows:
            if r.x == x:
                return r
        raise KeyError(x)


def default_grid(x_max: int, start: int = 10**4) -> list[int]:
    """Decades times {1, 2, 5} from ``start`` up to x_max."""
    grid = []
    decade = start
    while decade <= x_max:
        for m in (1, 2, 5):
            if decade * m <= x_max:
                grid.append(decade * m)
        decade *= 10
    return grid


def _validate_grid(x_grid) -> list[int]:
    grid = [int(x) for x in x_grid]
    if any(int(x) != x for x in x_grid):
        raise DomainError("grid points must be integers")
    if any(x < 1 for x in grid):
        raise DomainError("grid points must be >= 1")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly ascending")
    if grid and grid[-1] > MAX_SWEEP_X:
        raise BudgetExceeded(f"grid exceeds {MAX_SWEEP_X}")
    return grid


def _parse_row(line: str, lineno: int) -> SweepRow:
    parts = line.split(",")
    if len(parts) != len(SWEEP_HEADER):
        raise CheckpointError(f"line {lineno}: expected {len(SWEEP_HEADER)} fields, got {len(parts)}")
    try:
        row = SweepRow(int(parts[0]), float(parts[1]), float(parts[2]), float(parts[5]))
    except ValueError as exc:
        raise CheckpointError(f"line {lineno}: {exc}") from None
    if line + "\n" != row.csv_line():
        raise CheckpointError(f"line {lineno}: derived columns do not match the stored state")
    return row


def read_checkpoint(path: str) -> tuple[list[SweepRow], int]:
    """Complete rows of a checkpoint and the byte length they occupy.

    A trailing line without its newline is an interrupted write and is ignored.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        raise CheckpointError(f"{path}: not an ASCII CSV") from None
    header = ",".join(SWEEP_HEADER) + "\n"
    if not text.startswith(header):
        if header.startswith(text):  # header itself was cut short
            return [], 0
        raise CheckpointError(f"{path}: unexpected header")
    end = text.rfind("\n") + 1
    rows = []
    for i, line in enumerate(text[len(header) : end].splitlines(), start=2):
        rows.append(_parse_row(line, i))
    for a, b in zip(rows, rows[1:]):
        if b.x <= a.x or b.S < a.S or b.main < a.main or b.sup_huxley_ratio < a.sup_huxley_ratio:
            raise CheckpointError(f"{path}: rows are not monotone")
    return rows, end


class _PrimeFold:
    """Running S, main and sup, folded in fixed chunks of n so the result
    depends only on the grid, never on segmentation or resumption."""

    def __init__(self, S: float, main: float, sup: float, c4: float):
        self.S = Neumaier(S)
        self.main = Neumaier(main)
        self.sup = sup
        self.c4 = c4
        self.pending_S: list[np.ndarray] = []
        self.pending_main: list[np.ndarray] = []

    def feed(self, n: np.ndarray, d: np.ndarray, values: np.ndarray) -> None:
        if n.size == 0:
            return
        keep = n >= 2
        if keep.any():
            nn = n[keep]
            ratio = np.abs(values[keep]) / (nn**HUXLEY_EXP * np.log(nn) ** HUXLEY_LOG_EXP)
            self.sup = max(self.sup, float(ratio.max()))
        prime = d == 2
        v = values[prime]
        self.pending_S.append(v * v)
        self.pending_main.append(self.c4 * np.sqrt(n[prime]))

    def flush(self) -> None:
        if self.pending_S:
            self.S.add(math.fsum(np.concatenate(self.pending_S).tolist()))
            self.main.add(math.fsum(np.concatenate(self.pending_main).tolist()))
        self.pending_S = []
        self.pending_main = []

    def emit(self, x: int) -> SweepRow:
        self.flush()
        row = SweepRow(x, self.S.value(), self.main.value(), self.sup)
        # restart the compensation from the emitted state so a resumed run matches
        self.S = Neumaier(row.S)
        self.main = Neumaier(row.main)
        return row


def prime_moment_sweep(
    x_grid,
    segment_size: int = DEFAULT_CAPACITY,
    checkpoint: str | os.PathLike | None = None,
    quarter: bool = True,
    threads: int | None = None,
) -> SweepReport:
    """S(x) = sum_{p<=x} Delta(p)^2 against (C/4 pi^2) sum_{p<=x} sqrt(p) at each grid point.

    With ``checkpoint`` the rows are appended to that CSV as they are produced,
    and an existing file is resumed from its last complete row.
    """
    grid = _validate_grid(x_grid)
    c4 = mean_square_constant() / (4.0 * math.pi**2)
    rows: list[SweepRow] = []
    fh = None
    if checkpoint is not None:
        checkpoint = os.fspath(checkpoint)
        if os.path.exists(checkpoint):
            rows, keep = read_checkpoint(checkpoint)
            if [r.x for r in rows] != grid[: len(rows)]:
                raise CheckpointError(f"{checkpoint}: rows do not match the requested grid")
            fh = open(checkpoint, "r+b")
            fh.truncate(keep)
            fh.seek(keep)
        else:
            fh = open(checkpoint, "wb")
        if not rows:
            fh.seek(0)
            fh.truncate(0)
            fh.write((",".join(SWEEP_HEADER) + "\n").encode())
            fh.flush()
    try:
        last = rows[-1] if rows else SweepRow(0, 0.0, 0.0, 0.0)
        todo = grid[len(rows) :]
        if todo:
            fold = _PrimeFold(last.S, last.main, last.sup_huxley_ratio, c4)
            targets = iter(todo)
            target = next(targets)
            for block in delta_stream(todo[-1], segment_size, quarter, start=last.x + 1, threads=threads):
                n, d, values = block.n, block.d_values, block.delta
                cuts = {block.hi - block.lo}
                first = -(-block.lo // _FOLD_CHUNK) * _FOLD_CHUNK
                cuts.update(range(first - block.lo, block.hi - block.lo, _FOLD_CHUNK))
                cuts.update(g + 1 - block.lo for g in todo if block.lo <= g < block.hi)
                start = 0
                for cut in sorted(c for c in cuts if c > 0):
                    fold.feed(n[start:cut], d[start:cut], values[start:cut])
                    start = cut
                    end_n = block.lo + cut - 1
                    if target is not None and end_n == target:
                        row = fold.emit(target)
                        rows.append(row)
                        if fh is not None:
                            fh.write(row.csv_line().encode())
                            fh.flush()
                            os.fsync(fh.fileno())
                        target = next(targets, None)
                    elif (end_n + 1) % _FOLD_CHUNK == 0:
                        fold.flush()
    finally:
        if fh is not None:
            fh.close()
    return SweepReport(tuple(rows), quarter)
