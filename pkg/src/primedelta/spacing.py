"""Counting problems for real values of the shape (m1^a - m2^a) h^b.

All counters sort the values once and count, for each element, the window of
partners within the tolerance.  Window membership is decided on the rounded
difference ``fl(u - v) <= tol``; rounding is monotone, so the same predicate
drives both the two-pointer kernel and the O(K^2) reference loops, and the
two always agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import Kernel, njit
from .errors import BudgetExceeded, DomainError

ULP_SLACK = 4
MAX_TRIPLES = 10**7
MAX_QUAD_M = 3000
MAX_CLOSE_N = 10**6
MAX_PROXIMITY = 10**5
MAX_TSUM = 10**8


def effective_tolerance(tol: float, values) -> float:
    """tol widened by ULP_SLACK ulps of the largest |value|.

    Mathematically tied values can land a few ulps apart after rounding;
    the slack keeps such ties inside the window.
    """
    values = np.asarray(values, dtype=np.float64)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return float(tol) + ULP_SLACK * float(np.spacing(scale))


def power_diff(a, b, alpha: float):
    """a^alpha - b^alpha without cancellation; exactly antisymmetric in (a, b)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    big = np.maximum(a, b)
    small = np.minimum(a, b)
    mag = small**alpha * np.expm1(alpha * np.log1p((big - small) / small))
    return np.where(a >= b, mag, -mag)


# -- window kernels ---------------------------------------------------------------


@njit
def _window_bounds_nb(a, b, tol, lo, hi):
    # a, b ascending; lo[i] = first j with a[i] - b[j] <= tol,
    # hi[i] = first j with b[j] - a[i] > tol
    nb = b.shape[0]
    jl = 0
    jh = 0
    for i in range(a.shape[0]):
        ai = a[i]
        while jl < nb and ai - b[jl] > tol:
            jl += 1
        if jh < jl:
            jh = jl
        while jh < nb and b[jh] - ai <= tol:
            jh += 1
        lo[i] = jl
        hi[i] = jh


def _window_bounds_np(a, b, tol, lo, hi):
    nb = b.shape[0]
    # bisection on the same rounded-difference predicates
    left = np.zeros(a.shape[0], dtype=np.int64)
    right = np.full(a.shape[0], nb, dtype=np.int64)
    while True:
        active = left < right
        if not active.any():
            break
        mid = (left + right) // 2
        mid_c = np.minimum(mid, nb - 1)
        outside = (a - b[mid_c]) > tol
        go_right = active & outside
        left = np.where(go_right, mid + 1, left)
        right = np.where(active & ~outside, mid, right)
    lo[:] = left
    left = lo.copy()
    right = np.full(a.shape[0], nb, dtype=np.int64)
    while True:
        active = left < right
        if not active.any():
            break
        mid = (left + right) // 2
        mid_c = np.minimum(mid, nb - 1)
        inside = (b[mid_c] - a) <= tol
        left = np.where(active & inside, mid + 1, left)
        right = np.where(active & ~inside, mid, right)
    hi[:] = left


window_bounds_kernel = Kernel("window_bounds", _window_bounds_nb, _window_bounds_np)


def window_bounds(a_sorted: np.ndarray, b_sorted: np.ndarray, tol: float):
    a_sorted = np.ascontiguousarray(a_sorted, dtype=np.float64)
    b_sorted = np.ascontiguousarray(b_sorted, dtype=np.float64)
    lo = np.empty(a_sorted.shape[0], dtype=np.int64)
    hi = np.empty(a_sorted.shape[0], dtype=np.int64)
    if a_sorted.size:
        window_bounds_kernel(a_sorted, b_sorted, float(tol), lo, hi)
    return lo, hi


def count_cross_within(a, b, tol: float) -> int:
    """#{(r, s) : |a_r - b_s| <= tol} (ordered)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    lo, hi = window_bounds(a, b, tol)
    return int(np.maximum(hi - lo, 0).sum())


def count_self_within(values, tol: float) -> int:
    """#{(i, j) : |v_i - v_j| <= tol}, ordered, diagonal included."""
    return count_cross_within(values, values, tol)


def weighted_self_within(values, weights, tol: float) -> float:
    """sum over |v_i - v_j| <= tol of w_i w_j (weights nonnegative)."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = np.asarray(weights, dtype=np.float64)[order]
    lo, hi = window_bounds(v, v, tol)
    prefix = np.concatenate(([0.0], np.cumsum(w)))
    return float(np.dot(w, prefix[hi] - prefix[lo]))


def count_pairs_naive(values, tol: float) -> int:
    v = [float(x) for x in values]
    return sum(1 for x in v for y in v if abs(x - y) <= tol)


# -- the spacing problem -----------------------------------------------------------


@dataclass(frozen=True)
class SpacingInstance:
    M1: int
    M2: int
    H: int
    alpha: float
    beta: float
    tol: float

    def __post_init__(self):
        if min(self.M1, self.M2, self.H) < 1:
            raise DomainError("M1, M2, H must be >= 1")
        if not (0 < self.alpha <= 1 and 0 < self.beta <= 1):
            raise DomainError("alpha and beta must lie in (0, 1]")
        if self.tol < 0:
            raise DomainError("tolerance must be >= 0")


def dyadic(M: int) -> np.ndarray:
    """The integers m ~ M, i.e. M < m <= 2M."""
    return np.arange(M + 1, 2 * M + 1, dtype=np.int64)


def t_value(h, m1, m2, alpha: float, beta: float):
    """(m1^alpha - m2^alpha) h^beta."""
    h = np.asarray(h, dtype=np.float64)
    out = power_diff(m1, m2, alpha) * h**beta
    return float(out) if out.ndim == 0 else out


def spacing_triples(inst: SpacingInstance):
    m1 = dyadic(inst.M1)
    m2 = dyadic(inst.M2)
    h = dyadic(inst.H)
    g1, g2 = np.meshgrid(m1, m2, indexing="ij")
    keep = g1 != g2
    g1, g2 = g1[keep], g2[keep]
    return g1, g2, h


def spacing_values(inst: SpacingInstance) -> np.ndarray:
    """t(h, m1, m2) over all admissible triples (m1 != m2)."""
    if inst.M1 * inst.M2 * inst.H > MAX_TRIPLES:
        raise BudgetExceeded(
            f"M1*M2*H = {inst.M1 * inst.M2 * inst.H} exceeds {MAX_TRIPLES}; "
            "shrink a range (cost grows as the product)"
        )
    g1, g2, h = spacing_triples(inst)
    diff = power_diff(g1, g2, inst.alpha)
    return (diff[:, None] * (h.astype(np.float64) ** inst.beta)[None, :]).ravel()


def count_spacing_B(inst: SpacingInstance) -> int:
    """Ordered pairs of triples with |t - t~| <= tol (sixtuplet count)."""
    values = spacing_values(inst)
    return count_self_within(values, effective_tolerance(inst.tol, values))


def count_spacing_B_naive(inst: SpacingInstance) -> int:
    values = spacing_values(inst)
    return count_pairs_naive(values, effective_tolerance(inst.tol, values))


def proposition_bound(inst: SpacingInstance) -> float:
    """Three-term bound for the sixtuplet count with every epsilon set to 0."""
    M1, M2, H = float(inst.M1), float(inst.M2), float(inst.H)
    a, b, tol = inst.alpha, inst.beta, inst.tol
    first = (M1 * M2) ** 1.5 * H**1.5
    second = M1 ** (2 - a / 4) * M2**1.5 * tol**0.25 * H ** (1.5 - b / 4)
    third = (M1 * M2) ** (2 - a / 2) * H ** (2 - b) * tol
    return first + second + third


# -- Robert-Sargos quadruplets ---------------------------------------------------


def quadruplet_pair_sums(M: int, alpha: float) -> np.ndarray:
    p = dyadic(M).astype(np.float64) ** alpha
    return (p[:, None] + p[None, :]).ravel()


def count_quadruplets_N(M: int, delta: float, alpha: float) -> int:
    """#{m in (M, 2M]^4 : |m1^a + m2^a - m3^a - m4^a| <= delta M^a}."""
    if M < 1:
        raise DomainError("M must be >= 1")
    if M > MAX_QUAD_M:
        raise BudgetExceeded(f"M={M} exceeds the sort budget {MAX_QUAD_M}")
    sums = quadruplet_pair_sums(M, alpha)
    return count_self_within(sums, effective_tolerance(delta * float(M) ** alpha, sums))


def count_quadruplets_N_naive(M: int, delta: float, alpha: float) -> int:
    sums = quadruplet_pair_sums(M, alpha)
    return count_pairs_naive(sums, effective_tolerance(delta * float(M) ** alpha, sums))


def robert_sargos_bound(M: int, delta: float) -> float:
    return float(M) ** 2 + delta * float(M) ** 4


# -- Iwaniec-Sarkozy close pairs --------------------------------------------------


def close_pair_values(N: int) -> np.ndarray:
    return np.sqrt(dyadic(N).astype(np.float64))


def count_close_pairs(N: int, X: float) -> int:
    """v(N, X) = #{n1, n2 in (N, 2N] : |sqrt n1 - sqrt n2| <= 1/(2X)}."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > MAX_CLOSE_N:
        raise BudgetExceeded(f"N={N} exceeds {MAX_CLOSE_N}")
    if X <= 0:
        raise DomainError("X must be positive")
    roots = close_pair_values(N)
    return count_self_within(roots, effective_tolerance(1.0 / (2.0 * X), roots))


def count_close_pairs_naive(N: int, X: float) -> int:
    roots = close_pair_values(N)
    return count_pairs_naive(roots, effective_tolerance(1.0 / (2.0 * X), roots))


def close_pairs_bound(N: int, X: float) -> float:
    return (1.0 + 2.0 * math.sqrt(2.0 * N) / X) * N


# -- Zhai's pair proximity inequality --------------------------------------------


@dataclass(frozen=True)
class ProximityResult:
    lhs: int
    self_a: int
    self_b: int
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def pair_proximity_check(a, b, delta: float) -> ProximityResult:
    """#{|a_r - b_s| <= d} against 3 (#{|a_r - a_r'| <= d})^{1/2} (#{|b_s - b_s'| <= d})^{1/2}."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise DomainError("both sequences must be nonempty")
    if max(a.size, b.size) > MAX_PROXIMITY:
        raise BudgetExceeded(f"sequences longer than {MAX_PROXIMITY}")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    lhs = count_cross_within(a, b, delta)
    sa = count_self_within(a, delta)
    sb = count_self_within(b, delta)
    return ProximityResult(lhs, sa, sb, 3.0 * math.sqrt(sa) * math.sqrt(sb))


# -- T(N1, N2, alpha, beta) -------------------------------------------------------


@njit
def _tsum_nb(n1s, n2s, alpha, beta, out):
    # out = [sigma1, sigma2]: the near-diagonal part |n1^a - n2^a| <= (n1 n2)^{a/2}/100
    # and the rest; both Neumaier-compensated
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    for i in range(n1s.shape[0]):
        x = n1s[i]
        for j in range(n2s.shape[0]):
            y = n2s[j]
            if x == y:
                continue
            big = max(x, y)
            small = min(x, y)
            gap = small**alpha * np.expm1(alpha * np.log1p((big - small) / small))
            term = gap ** (-beta)
            if gap <= (x * y) ** (0.5 * alpha) / 100.0:
                t = s1 + term
                if abs(s1) >= term:
                    c1 += (s1 - t) + term
                else:
                    c1 += (term - t) + s1
                s1 = t
            else:
                t = s2 + term
                if abs(s2) >= term:
                    c2 += (s2 - t) + term
                else:
                    c2 += (term - t) + s2
                s2 = t
    out[0] = s1 + c1
    out[1] = s2 + c2
    return out


def _tsum_np(n1s, n2s, alpha, beta, out):
    s1 = []
    s2 = []
    for x in n1s:
        y = n2s[n2s != x]
        gap = np.abs(power_diff(np.full(y.shape, x), y, alpha))
        term = gap ** (-beta)
        near = gap <= (x * y) ** (0.5 * alpha) / 100.0
        s1.append(math.fsum(term[near]))
        s2.append(math.fsum(term[~near]))
    out[0] = math.fsum(s1)
    out[1] = math.fsum(s2)
    return out


tsum_kernel = Kernel("tsum", _tsum_nb, _tsum_np)


@dataclass(frozen=True)
class TSumResult:
    value: float
    sigma1: float
    sigma2: float
    bound: float

    @property
    def bound_ratio(self) -> float:
        return self.value / self.bound


def T_sum(N1: int, N2: int, alpha: float, beta: float) -> TSumResult:
    """sum_{n1 ~ N1, n2 ~ N2, n1 != n2} |n1^a - n2^a|^{-b} and its bound ratio."""
    if N1 < 1 or N2 < 1:
        raise DomainError("N1, N2 must be >= 1")
    if not (0 < alpha <= 1 and 0 < beta <= 1):
        raise DomainError("alpha and beta must lie in (0, 1]")
    if N1 * N2 > MAX_TSUM:
        raise BudgetExceeded(f"N1*N2 = {N1 * N2} exceeds {MAX_TSUM}")
    out = np.zeros(2)
    tsum_kernel(dyadic(N1).astype(np.float64), dyadic(N2).astype(np.float64), alpha, beta, out)
    value = float(out[0] + out[1])
    bound = (N1 * N2) ** (1 - alpha * beta / 2) * math.log(2 + N1) * math.log(2 + N2)
    return TSumResult(value, float(out[0]), float(out[1]), bound)
