"""Seeded random instances for the inequality checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expsums import (
    BilinearInstance,
    PhaseFunction,
    double_large_sieve_check,
    exp_integral,
    exp_sum,
    first_derivative_check,
    second_derivative_ratio,
    sum_to_integral_residual,
)
from .spacing import pair_proximity_check

DEFAULT_SEED = 20240517


@dataclass(frozen=True)
class SuiteRow:
    suite: str
    index: int
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def fields(self) -> tuple:
        return (self.suite, self.index, self.lhs, self.rhs, int(self.holds))


def _unimodular(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(size))


def random_bilinear(rng: np.random.Generator) -> BilinearInstance:
    R, S = rng.integers(1, 60, size=2)
    X, Y = 10.0 ** rng.uniform(-1.0, 1.5, size=2)
    x = rng.uniform(-X, X, size=R)
    y = rng.uniform(-Y, Y, size=S)
    if rng.random() < 0.3:  # clustered points stress the proximity counts
        x = np.round(x, 1)
        y = np.round(y, 1)
    return BilinearInstance(x, y, _unimodular(rng, R), _unimodular(rng, S), float(X), float(Y))


def random_proximity(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, float]:
    R, S = rng.integers(1, 200, size=2)
    span = 10.0 ** rng.uniform(0.0, 2.0)
    a = rng.uniform(0.0, span, size=R)
    b = rng.uniform(0.0, span, size=S)
    if rng.random() < 0.3:
        a = np.round(a)
        b = np.round(b)
    return a, b, float(10.0 ** rng.uniform(-3.0, 0.0))


def random_first_derivative(rng: np.random.Generator) -> tuple[PhaseFunction, float, float]:
    kind = rng.integers(0, 3)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    a = float(rng.uniform(1.0, 100.0))
    b = a + float(rng.uniform(1.0, 100.0))
    if kind == 0:
        return PhaseFunction.linear(sign * rng.uniform(0.5, 20.0)), a, b
    if kind == 1:
        theta = rng.uniform(0.2, 0.9) if rng.random() < 0.5 else rng.uniform(1.1, 1.8)
        return PhaseFunction.power(sign * rng.uniform(0.5, 10.0), theta), a, b
    m1, m2 = rng.choice(np.arange(1, 101), size=2, replace=False)
    return PhaseFunction.sqrt_bilinear(int(m1), int(m2)), a, b


def double_large_sieve_suite(count: int, seed: int = DEFAULT_SEED) -> list[SuiteRow]:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        check = double_large_sieve_check(random_bilinear(rng))
        rows.append(SuiteRow("double_large_sieve", i, check.lhs, check.bound))
    return rows


def pair_proximity_suite(count: int, seed: int = DEFAULT_SEED) -> list[SuiteRow]:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        res = pair_proximity_check(*random_proximity(rng))
        rows.append(SuiteRow("pair_proximity", i, float(res.lhs), res.rhs))
    return rows


def first_derivative_suite(count: int, seed: int = DEFAULT_SEED) -> list[SuiteRow]:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        check = first_derivative_check(*random_first_derivative(rng))
        rows.append(SuiteRow("first_derivative", i, check.lhs, check.bound))
    return rows


def exp_sum_rows() -> list[SuiteRow]:
    """Fixed sums and integrals; lhs is the modulus, rhs the trivial bound."""
    rows = []
    cases = [
        (PhaseFunction.constant(0.0), 0.0, 10.0),
        (PhaseFunction.linear(0.5), 0.0, 4.0),
        (PhaseFunction.power(1.0, 0.5), 100.0, 200.0),
        (PhaseFunction.sqrt_bilinear(3, 2), 1000.0, 2000.0),
    ]
    for i, (f, a, b) in enumerate(cases):
        rows.append(SuiteRow("exp_sum", i, abs(exp_sum(f, a, b)), float(int(b) - int(a))))
    integrals = [
        (PhaseFunction.linear(1.0), 0.0, 2 * np.pi),
        (PhaseFunction.constant(0.0), 0.0, 1.0),
        (PhaseFunction.power(2.0, 0.5), 10.0, 50.0),
    ]
    for i, (F, a, b) in enumerate(integrals):
        rows.append(SuiteRow("exp_integral", i, abs(exp_integral(F, a, b)), b - a))
    return rows


SUM_TO_INTEGRAL_GRID = [(c, N) for c in (0.25, 0.5, 1.0) for N in (100, 1000, 10000)]


def sum_to_integral_rows() -> list[SuiteRow]:
    """theta-normalised residuals of c sqrt(x) on [N, 2N] with theta = 1/2."""
    rows = []
    for i, (c, N) in enumerate(SUM_TO_INTEGRAL_GRID):
        # |f'| = c / (2 sqrt x) <= 1/2 on [N, 2N] for every grid point
        res = sum_to_integral_residual(PhaseFunction.power(c, 0.5), N, 2 * N, 0.5)
        rows.append(SuiteRow("sum_to_integral", i, res, float("inf")))
    return rows


SECOND_DERIVATIVE_GRID = [(c, N) for c in (1.0, 10.0, 100.0) for N in (1000, 10000, 100000)]


def second_derivative_rows() -> list[SuiteRow]:
    rows = []
    for i, (c, N) in enumerate(SECOND_DERIVATIVE_GRID):
        res = second_derivative_ratio(PhaseFunction.power(c, 0.5), N, 2 * N)
        rows.append(SuiteRow("second_derivative", i, res.ratio, float("inf")))
    return rows


def expsum_suite(count: int, seed: int = DEFAULT_SEED) -> list[SuiteRow]:
    """Every exponential-sum check: fixed cases plus ``count`` random instances
    of each inequality (first-derivative uses count // 10)."""
    rows = exp_sum_rows()
    rows += sum_to_integral_rows()
    rows += second_derivative_rows()
    rows += first_derivative_suite(max(1, count // 10), seed)
    rows += double_large_sieve_suite(count, seed)
    return rows
